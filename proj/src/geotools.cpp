#include "urbankg/geotools.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "urbankg/planar.hpp"
#include "urbankg/text_util.hpp"

namespace urbankg::tools {

using geo::Coordinate;
using geo::Geometry;
using geo::GeometryKind;

std::string_view tool_name(ToolName t) {
    switch (t) {
        case ToolName::Geohash: return "Geohash";
        case ToolName::Distance: return "Distance";
        case ToolName::Point2Polygon: return "Point2Polygon";
        case ToolName::Point4Linestring: return "Point4Linestring";
        case ToolName::Linestring2Polygon: return "Linestring2Polygon";
        case ToolName::Linestring4Polygon: return "Linestring4Polygon";
        case ToolName::Polygon2Polygon: return "Polygon2Polygon";
        case ToolName::Polygon4Polygon: return "Polygon4Polygon";
    }
    return "?";
}

std::string_view tool_description(ToolName t) {
    switch (t) {
        case ToolName::Geohash: return "Geohash encoding";
        case ToolName::Distance: return "Calculate the distance between two geo entities.";
        case ToolName::Point2Polygon: return "Identify if a point belongs to a polygon";
        case ToolName::Point4Linestring: return "Identify if a point intersects a linestring";
        case ToolName::Linestring2Polygon: return "Identify if a linestring belongs to a polygon";
        case ToolName::Linestring4Polygon: return "Identify if a linestring intersects a polygon";
        case ToolName::Polygon2Polygon: return "Identify if a polygon belongs to a polygon";
        case ToolName::Polygon4Polygon: return "Identify if a polygon intersects a polygon";
    }
    return "?";
}

std::optional<ToolName> tool_from_name(std::string_view name) {
    std::string folded = text::fold(name);
    for (ToolName t : kAllTools)
        if (folded == text::fold(tool_name(t))) return t;
    return std::nullopt;
}

size_t tool_arity(ToolName t) { return t == ToolName::Geohash ? 1u : 2u; }

std::array<std::optional<GeometryKind>, 2> tool_input_kinds(ToolName t) {
    using K = GeometryKind;
    switch (t) {
        case ToolName::Geohash: return {std::nullopt, std::nullopt};
        case ToolName::Distance: return {std::nullopt, std::nullopt};
        case ToolName::Point2Polygon: return {K::Point, K::Polygon};
        case ToolName::Point4Linestring: return {K::Point, K::LineString};
        case ToolName::Linestring2Polygon: return {K::LineString, K::Polygon};
        case ToolName::Linestring4Polygon: return {K::LineString, K::Polygon};
        case ToolName::Polygon2Polygon: return {K::Polygon, K::Polygon};
        case ToolName::Polygon4Polygon: return {K::Polygon, K::Polygon};
    }
    return {std::nullopt, std::nullopt};
}

std::string_view rcc5_code(Rcc5Relation r) {
    switch (r) {
        case Rcc5Relation::DC: return "DC";
        case Rcc5Relation::EC: return "EC";
        case Rcc5Relation::PO: return "PO";
        case Rcc5Relation::EQ: return "EQ";
        case Rcc5Relation::IN: return "IN";
    }
    return "?";
}

std::optional<Rcc5Relation> rcc5_from_code(std::string_view code) {
    for (Rcc5Relation r : kAllRcc5)
        if (code == rcc5_code(r)) return r;
    return std::nullopt;
}

std::string render_tool_result(const ToolResult& r) {
    std::string out = "tool(";
    out += tool_name(r.tool);
    out += ")=";
    if (std::holds_alternative<std::string>(r.value))
        out += std::get<std::string>(r.value);
    else if (std::holds_alternative<double>(r.value))
        out += text::format_double(std::get<double>(r.value));
    else
        out += std::get<bool>(r.value) ? "true" : "false";
    return out;
}

Coordinate representative_point(const Geometry& g) {
    if (g.kind == GeometryKind::Point) return g.point();
    size_t n = g.coords.size();
    if (g.kind == GeometryKind::Polygon) --n; // skip the closing duplicate
    double lon = 0.0, lat = 0.0;
    for (size_t i = 0; i < n; ++i) {
        lon += g.coords[i].lon;
        lat += g.coords[i].lat;
    }
    return {lon / static_cast<double>(n), lat / static_cast<double>(n)};
}

namespace {
constexpr char kBase32[] = "0123456789bcdefghjkmnpqrstuvwxyz";
}

std::string geohash_encode(const Geometry& g, int precision) {
    if (precision < 1 || precision > 12)
        throw ToolError("geohash precision must be in [1, 12]");
    Coordinate p = representative_point(g);
    double lon_lo = -180.0, lon_hi = 180.0, lat_lo = -90.0, lat_hi = 90.0;
    std::string out;
    out.reserve(static_cast<size_t>(precision));
    bool lon_turn = true;
    int bits = 0, value = 0;
    while (out.size() < static_cast<size_t>(precision)) {
        if (lon_turn) {
            double mid = (lon_lo + lon_hi) / 2.0;
            value <<= 1;
            if (p.lon >= mid) {
                value |= 1;
                lon_lo = mid;
            } else {
                lon_hi = mid;
            }
        } else {
            double mid = (lat_lo + lat_hi) / 2.0;
            value <<= 1;
            if (p.lat >= mid) {
                value |= 1;
                lat_lo = mid;
            } else {
                lat_hi = mid;
            }
        }
        lon_turn = !lon_turn;
        if (++bits == 5) {
            out.push_back(kBase32[value]);
            bits = 0;
            value = 0;
        }
    }
    return out;
}

double distance_km(const Geometry& a, const Geometry& b) {
    constexpr double deg = std::numbers::pi / 180.0;
    Coordinate pa = representative_point(a);
    Coordinate pb = representative_point(b);
    double phi1 = pa.lat * deg, phi2 = pb.lat * deg;
    double dphi = (pb.lat - pa.lat) * deg;
    double dlam = (pb.lon - pa.lon) * deg;
    double s1 = std::sin(dphi / 2.0), s2 = std::sin(dlam / 2.0);
    double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

namespace {

void require_kind(const Geometry& g, GeometryKind k, const char* which) {
    if (g.kind != k)
        throw KindMismatch(std::string(which) + " must be a " + std::string(kind_name(k)) +
                           ", got " + std::string(kind_name(g.kind)));
}

using Ring = std::vector<Coordinate>;

// Boundary-inclusive point in closed ring (ray casting).
bool ring_contains(const Ring& ring, const Coordinate& p) {
    size_t n = ring.size() - 1;
    for (size_t i = 0; i < n; ++i)
        if (planar::on_segment(ring[i], ring[i + 1], p)) return true;
    bool inside = false;
    for (size_t i = 0; i < n; ++i) {
        const Coordinate& a = ring[i];
        const Coordinate& b = ring[i + 1];
        if ((a.lat > p.lat) != (b.lat > p.lat)) {
            double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
            if (p.lon < x) inside = !inside;
        }
    }
    return inside;
}

bool ring_contains_strict(const Ring& ring, const Coordinate& p) {
    size_t n = ring.size() - 1;
    for (size_t i = 0; i < n; ++i)
        if (planar::on_segment(ring[i], ring[i + 1], p)) return false;
    return ring_contains(ring, p);
}

// All parameters t in [0,1] where a+(b-a)t touches segment [c,d].
void collect_crossing_params(const Coordinate& a, const Coordinate& b,
                             const Coordinate& c, const Coordinate& d,
                             std::vector<double>& ts) {
    double d1x = b.lon - a.lon, d1y = b.lat - a.lat;
    double d2x = d.lon - c.lon, d2y = d.lat - c.lat;
    double denom = d1x * d2y - d1y * d2x;
    if (denom != 0.0) {
        double t = ((c.lon - a.lon) * d2y - (c.lat - a.lat) * d2x) / denom;
        double u = ((c.lon - a.lon) * d1y - (c.lat - a.lat) * d1x) / denom;
        if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) ts.push_back(t);
        return;
    }
    if (planar::orientation(a, b, c) != 0) return;
    // Collinear: project the other segment's endpoints onto [a,b].
    double len2 = d1x * d1x + d1y * d1y;
    if (len2 == 0.0) return;
    for (const Coordinate& q : {c, d}) {
        double t = ((q.lon - a.lon) * d1x + (q.lat - a.lat) * d1y) / len2;
        if (t >= 0.0 && t <= 1.0) ts.push_back(t);
    }
}

// Every point of [a,b] inside the closed region bounded by ring: split the
// segment at boundary crossings and test interval midpoints.
bool segment_in_ring(const Coordinate& a, const Coordinate& b, const Ring& ring) {
    if (!ring_contains(ring, a) || !ring_contains(ring, b)) return false;
    std::vector<double> ts{0.0, 1.0};
    size_t n = ring.size() - 1;
    for (size_t i = 0; i < n; ++i)
        collect_crossing_params(a, b, ring[i], ring[i + 1], ts);
    std::sort(ts.begin(), ts.end());
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
        double tm = (ts[i] + ts[i + 1]) / 2.0;
        Coordinate m{a.lon + tm * (b.lon - a.lon), a.lat + tm * (b.lat - a.lat)};
        if (!ring_contains(ring, m)) return false;
    }
    return true;
}

bool rings_share_point(const Ring& ra, const Ring& rb) {
    for (const Coordinate& v : ra)
        if (ring_contains(rb, v)) return true;
    for (const Coordinate& v : rb)
        if (ring_contains(ra, v)) return true;
    size_t na = ra.size() - 1, nb = rb.size() - 1;
    for (size_t i = 0; i < na; ++i)
        for (size_t j = 0; j < nb; ++j)
            if (planar::segments_intersect(ra[i], ra[i + 1], rb[j], rb[j + 1])) return true;
    return false;
}

} // namespace

bool point_in_polygon(const Geometry& point, const Geometry& polygon) {
    require_kind(point, GeometryKind::Point, "first argument");
    require_kind(polygon, GeometryKind::Polygon, "second argument");
    return ring_contains(polygon.ring(), point.point());
}

bool point_intersects_linestring(const Geometry& point, const Geometry& linestring) {
    require_kind(point, GeometryKind::Point, "first argument");
    require_kind(linestring, GeometryKind::LineString, "second argument");
    const auto& path = linestring.path();
    for (size_t i = 0; i + 1 < path.size(); ++i)
        if (planar::on_segment(path[i], path[i + 1], point.point())) return true;
    return false;
}

bool linestring_in_polygon(const Geometry& linestring, const Geometry& polygon) {
    require_kind(linestring, GeometryKind::LineString, "first argument");
    require_kind(polygon, GeometryKind::Polygon, "second argument");
    const auto& path = linestring.path();
    for (size_t i = 0; i + 1 < path.size(); ++i)
        if (!segment_in_ring(path[i], path[i + 1], polygon.ring())) return false;
    return true;
}

bool linestring_intersects_polygon(const Geometry& linestring, const Geometry& polygon) {
    require_kind(linestring, GeometryKind::LineString, "first argument");
    require_kind(polygon, GeometryKind::Polygon, "second argument");
    const auto& path = linestring.path();
    const auto& ring = polygon.ring();
    for (const Coordinate& v : path)
        if (ring_contains(ring, v)) return true;
    size_t n = ring.size() - 1;
    for (size_t i = 0; i + 1 < path.size(); ++i)
        for (size_t j = 0; j < n; ++j)
            if (planar::segments_intersect(path[i], path[i + 1], ring[j], ring[j + 1])) return true;
    return false;
}

bool polygon_in_polygon(const Geometry& inner, const Geometry& outer) {
    require_kind(inner, GeometryKind::Polygon, "first argument");
    require_kind(outer, GeometryKind::Polygon, "second argument");
    const auto& ring = inner.ring();
    for (size_t i = 0; i + 1 < ring.size(); ++i)
        if (!segment_in_ring(ring[i], ring[i + 1], outer.ring())) return false;
    return true;
}

bool polygon_intersects_polygon(const Geometry& a, const Geometry& b) {
    require_kind(a, GeometryKind::Polygon, "first argument");
    require_kind(b, GeometryKind::Polygon, "second argument");
    return rings_share_point(a.ring(), b.ring());
}

// ---------------------------------------------------------------------------
// RCC-5 classification.
//
// Both geometries become regions: a polygon keeps its ring, a point becomes
// an axis-aligned square of half-width eps, a linestring becomes one buffered
// rectangle per segment (union semantics). The cascade then decides
// DC -> EQ -> IN -> PO -> EC from three symmetric predicates: minimum region
// distance, mutual containment within an eps-dilation, and interior overlap
// deeper than the eps band.
// ---------------------------------------------------------------------------

namespace {

struct Region {
    std::vector<Ring> pieces;
    double min_lon = 0, max_lon = 0, min_lat = 0, max_lat = 0;
};

Ring square_ring(const Coordinate& c, double half) {
    return {{c.lon - half, c.lat - half},
            {c.lon + half, c.lat - half},
            {c.lon + half, c.lat + half},
            {c.lon - half, c.lat + half},
            {c.lon - half, c.lat - half}};
}

Ring segment_rect(const Coordinate& a, const Coordinate& b, double half) {
    double dx = b.lon - a.lon, dy = b.lat - a.lat;
    double len = std::hypot(dx, dy);
    double ux = dx / len, uy = dy / len;     // along the segment
    double nx = -uy, ny = ux;                // lateral
    Coordinate a2{a.lon - ux * half, a.lat - uy * half};
    Coordinate b2{b.lon + ux * half, b.lat + uy * half};
    return {{a2.lon + nx * half, a2.lat + ny * half},
            {a2.lon - nx * half, a2.lat - ny * half},
            {b2.lon - nx * half, b2.lat - ny * half},
            {b2.lon + nx * half, b2.lat + ny * half},
            {a2.lon + nx * half, a2.lat + ny * half}};
}

Region make_region(const Geometry& g, double eps) {
    Region r;
    switch (g.kind) {
        case GeometryKind::Point:
            r.pieces.push_back(square_ring(g.point(), eps));
            break;
        case GeometryKind::LineString:
            for (size_t i = 0; i + 1 < g.coords.size(); ++i)
                r.pieces.push_back(segment_rect(g.coords[i], g.coords[i + 1], eps));
            break;
        case GeometryKind::Polygon:
            r.pieces.push_back(g.ring());
            break;
    }
    r.min_lon = r.min_lat = std::numeric_limits<double>::infinity();
    r.max_lon = r.max_lat = -std::numeric_limits<double>::infinity();
    for (const Ring& ring : r.pieces)
        for (const Coordinate& c : ring) {
            r.min_lon = std::min(r.min_lon, c.lon);
            r.max_lon = std::max(r.max_lon, c.lon);
            r.min_lat = std::min(r.min_lat, c.lat);
            r.max_lat = std::max(r.max_lat, c.lat);
        }
    return r;
}

double ring_boundary_dist(const Ring& ring, const Coordinate& p) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < ring.size(); ++i)
        best = std::min(best, planar::point_segment_distance(p, ring[i], ring[i + 1]));
    return best;
}

// Negative inside, positive outside, zero on the boundary. For a union the
// sign is exact and the positive magnitude is the true distance; both are
// 1-Lipschitz, which is what the subdivision bounds rely on.
double region_signed_dist(const Region& r, const Coordinate& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const Ring& ring : r.pieces) {
        double d = ring_boundary_dist(ring, p);
        best = std::min(best, ring_contains(ring, p) ? -d : d);
    }
    return best;
}

double region_min_dist(const Region& a, const Region& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const Ring& ra : a.pieces)
        for (const Ring& rb : b.pieces) {
            if (rings_share_point(ra, rb)) return 0.0;
            size_t na = ra.size() - 1, nb = rb.size() - 1;
            for (size_t i = 0; i < na; ++i)
                for (size_t j = 0; j < nb; ++j)
                    best = std::min(best, planar::segment_segment_distance(ra[i], ra[i + 1],
                                                                           rb[j], rb[j + 1]));
        }
    return best;
}

// max of f over [a,b] is bounded by max(f(a),f(b)) + |ab|/2 for 1-Lipschitz f.
bool segment_stays_below(const Coordinate& a, double fa, const Coordinate& b, double fb,
                         const Region& r, double tol) {
    if (fa > tol || fb > tol) return false;
    double half = planar::dist(a, b) / 2.0;
    if (std::max(fa, fb) + half <= tol) return true;
    if (half < 1e-12) return true;
    Coordinate m{(a.lon + b.lon) / 2.0, (a.lat + b.lat) / 2.0};
    double fm = region_signed_dist(r, m);
    if (fm > tol) return false;
    return segment_stays_below(a, fa, m, fm, r, tol) && segment_stays_below(m, fm, b, fb, r, tol);
}

Coordinate piece_interior_point(const Ring& ring) {
    size_t n = ring.size() - 1;
    Coordinate c{0, 0};
    for (size_t i = 0; i < n; ++i) {
        c.lon += ring[i].lon;
        c.lat += ring[i].lat;
    }
    c.lon /= static_cast<double>(n);
    c.lat /= static_cast<double>(n);
    if (ring_contains_strict(ring, c)) return c;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 2; j < n; ++j) {
            Coordinate m{(ring[i].lon + ring[j].lon) / 2.0, (ring[i].lat + ring[j].lat) / 2.0};
            if (ring_contains_strict(ring, m)) return m;
        }
    return ring[0];
}

// inner within outer dilated by tol: the bound of every inner piece stays
// within tol of outer, plus one interior witness per piece (dilations of a
// multi-piece union may not be simply connected).
bool region_contains(const Region& outer, const Region& inner, double tol) {
    for (const Ring& ring : inner.pieces) {
        Coordinate w = piece_interior_point(ring);
        if (region_signed_dist(outer, w) > tol) return false;
        for (size_t i = 0; i + 1 < ring.size(); ++i) {
            double fa = region_signed_dist(outer, ring[i]);
            double fb = region_signed_dist(outer, ring[i + 1]);
            if (!segment_stays_below(ring[i], fa, ring[i + 1], fb, outer, tol)) return false;
        }
    }
    return true;
}

// Canonical crossing point of two segments, computed in a fixed argument
// order so that swapped regions see bit-identical seeds.
std::optional<Coordinate> crossing_point(Coordinate a, Coordinate b, Coordinate c, Coordinate d) {
    auto less = [](const Coordinate& x, const Coordinate& y) {
        return x.lon < y.lon || (x.lon == y.lon && x.lat < y.lat);
    };
    if (less(b, a)) std::swap(a, b);
    if (less(d, c)) std::swap(c, d);
    if (less(c, a) || (!less(a, c) && !less(c, a) && less(d, b))) {
        std::swap(a, c);
        std::swap(b, d);
    }
    double d1x = b.lon - a.lon, d1y = b.lat - a.lat;
    double d2x = d.lon - c.lon, d2y = d.lat - c.lat;
    double denom = d1x * d2y - d1y * d2x;
    if (denom == 0.0) return std::nullopt;
    double t = ((c.lon - a.lon) * d2y - (c.lat - a.lat) * d2x) / denom;
    double u = ((c.lon - a.lon) * d1y - (c.lat - a.lat) * d1x) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return Coordinate{a.lon + t * d1x, a.lat + t * d1y};
}

// Is there a point strictly inside both regions, deeper than `band`?
// Seeds (vertices, crossings, witnesses) catch deep overlaps immediately; a
// deterministic best-first subdivision over the joint bounding box settles
// near-tangent cases. One-sided within the band by construction.
bool interiors_overlap(const Region& a, const Region& b, double band) {
    auto depth = [&](const Coordinate& p) {
        return std::min(-region_signed_dist(a, p), -region_signed_dist(b, p));
    };

    std::vector<Coordinate> seeds;
    for (const Region* r : {&a, &b}) {
        for (const Ring& ring : r->pieces) {
            seeds.insert(seeds.end(), ring.begin(), ring.end() - 1);
            seeds.push_back(piece_interior_point(ring));
        }
    }
    for (const Ring& ra : a.pieces)
        for (const Ring& rb : b.pieces)
            for (size_t i = 0; i + 1 < ra.size(); ++i)
                for (size_t j = 0; j + 1 < rb.size(); ++j)
                    if (auto x = crossing_point(ra[i], ra[i + 1], rb[j], rb[j + 1]))
                        seeds.push_back(*x);
    std::sort(seeds.begin(), seeds.end(), [](const Coordinate& x, const Coordinate& y) {
        return x.lon < y.lon || (x.lon == y.lon && x.lat < y.lat);
    });
    for (const Coordinate& s : seeds)
        if (depth(s) > band) return true;

    double lo_x = std::max(a.min_lon, b.min_lon), hi_x = std::min(a.max_lon, b.max_lon);
    double lo_y = std::max(a.min_lat, b.min_lat), hi_y = std::min(a.max_lat, b.max_lat);
    if (lo_x > hi_x || lo_y > hi_y) return false;

    struct Cell {
        double bound, x, y, half;
        bool operator<(const Cell& o) const {
            if (bound != o.bound) return bound < o.bound; // max-heap on bound
            if (x != o.x) return x > o.x;
            if (y != o.y) return y > o.y;
            return half < o.half;
        }
    };
    std::priority_queue<Cell> queue;
    auto push = [&](double x, double y, double half) -> bool {
        double d = depth({x, y});
        if (d > band) return true;
        double bound = d + half * std::numbers::sqrt2;
        if (bound > band && half >= band / 8.0) queue.push({bound, x, y, half});
        return false;
    };
    if (push((lo_x + hi_x) / 2.0, (lo_y + hi_y) / 2.0,
             std::max(hi_x - lo_x, hi_y - lo_y) / 2.0))
        return true;
    int budget = 200000;
    while (!queue.empty() && budget-- > 0) {
        Cell c = queue.top();
        queue.pop();
        double h = c.half / 2.0;
        for (double sx : {-1.0, 1.0})
            for (double sy : {-1.0, 1.0})
                if (push(c.x + sx * h, c.y + sy * h, h)) return true;
    }
    return false;
}

} // namespace

Rcc5Relation classify_rcc5(const Geometry& a, const Geometry& b, double eps) {
    if (!(eps > 0.0)) throw ToolError("rcc eps must be positive");
    if (a == b) return Rcc5Relation::EQ;
    Region ra = make_region(a, eps);
    Region rb = make_region(b, eps);
    if (region_min_dist(ra, rb) > eps) return Rcc5Relation::DC;
    bool b_in_a = region_contains(ra, rb, eps);
    bool a_in_b = region_contains(rb, ra, eps);
    if (b_in_a && a_in_b) return Rcc5Relation::EQ;
    if (b_in_a || a_in_b) return Rcc5Relation::IN;
    if (interiors_overlap(ra, rb, eps / 2.0)) return Rcc5Relation::PO;
    return Rcc5Relation::EC;
}

ToolResult invoke_tool(ToolName name, std::span<const Geometry> args) {
    size_t want = tool_arity(name);
    if (args.size() != want)
        throw ArityMismatch(std::string(tool_name(name)) + " expects " + std::to_string(want) +
                            " geometries, got " + std::to_string(args.size()));
    auto kinds = tool_input_kinds(name);
    for (size_t i = 0; i < want; ++i)
        if (kinds[i] && args[i].kind != *kinds[i])
            throw KindMismatch(std::string(tool_name(name)) + " argument " + std::to_string(i + 1) +
                               " must be a " + std::string(kind_name(*kinds[i])) + ", got " +
                               std::string(kind_name(args[i].kind)));

    ToolResult result{name, {args.begin(), args.end()}, false};
    switch (name) {
        case ToolName::Geohash: result.value = geohash_encode(args[0]); break;
        case ToolName::Distance: result.value = distance_km(args[0], args[1]); break;
        case ToolName::Point2Polygon: result.value = point_in_polygon(args[0], args[1]); break;
        case ToolName::Point4Linestring:
            result.value = point_intersects_linestring(args[0], args[1]);
            break;
        case ToolName::Linestring2Polygon:
            result.value = linestring_in_polygon(args[0], args[1]);
            break;
        case ToolName::Linestring4Polygon:
            result.value = linestring_intersects_polygon(args[0], args[1]);
            break;
        case ToolName::Polygon2Polygon: result.value = polygon_in_polygon(args[0], args[1]); break;
        case ToolName::Polygon4Polygon:
            result.value = polygon_intersects_polygon(args[0], args[1]);
            break;
    }
    return result;
}

} // namespace urbankg::tools
