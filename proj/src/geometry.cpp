#include "urbankg/geometry.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "urbankg/planar.hpp"
#include "urbankg/text_util.hpp"

namespace urbankg::geo {

std::string_view kind_name(GeometryKind k) {
    switch (k) {
        case GeometryKind::Point: return "Point";
        case GeometryKind::LineString: return "LineString";
        case GeometryKind::Polygon: return "Polygon";
    }
    return "?";
}

std::string ValidationReport::summary() const {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v.code;
        if (!v.detail.empty()) out += " (" + v.detail + ")";
    }
    return out;
}

namespace {

bool coordinate_ok(const Coordinate& c, std::vector<Violation>& out, size_t idx) {
    bool ok = true;
    auto at = [&] { return "coordinate " + std::to_string(idx); };
    if (!std::isfinite(c.lon) || !std::isfinite(c.lat)) {
        out.push_back({"non_finite", at()});
        return false;
    }
    if (!(c.lon > -180.0 && c.lon <= 180.0)) {
        out.push_back({"lon_out_of_range", at() + " lon=" + text::format_double(c.lon)});
        ok = false;
    }
    if (!(c.lat >= -90.0 && c.lat <= 90.0)) {
        out.push_back({"lat_out_of_range", at() + " lat=" + text::format_double(c.lat)});
        ok = false;
    }
    return ok;
}

void check_ring_simple(const std::vector<Coordinate>& ring, std::vector<Violation>& out) {
    // ring is closed: segment i = (ring[i], ring[i+1]) for i in [0, n-1].
    size_t n = ring.size() - 1;
    // Spikes: consecutive segments that double back along the same line.
    for (size_t i = 0; i < n; ++i) {
        const auto& a = ring[i];
        const auto& b = ring[(i + 1) % n];
        const auto& c = ring[(i + 2) % n];
        if (planar::orientation(a, b, c) == 0) {
            double dot = (b.lon - a.lon) * (c.lon - b.lon) + (b.lat - a.lat) * (c.lat - b.lat);
            if (dot < 0) {
                out.push_back({"self_intersection", "spike at vertex " + std::to_string((i + 1) % n)});
                return;
            }
        }
    }
    // Non-adjacent segment pairs must not touch at all.
    for (size_t i = 0; i + 1 < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (planar::segments_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1])) {
                out.push_back({"self_intersection",
                               "segments " + std::to_string(i) + " and " + std::to_string(j)});
                return;
            }
        }
    }
}

} // namespace

ValidationReport validate(const Geometry& g) {
    ValidationReport report;
    auto& out = report.violations;
    bool coords_ok = true;
    for (size_t i = 0; i < g.coords.size(); ++i)
        coords_ok &= coordinate_ok(g.coords[i], out, i);

    switch (g.kind) {
        case GeometryKind::Point:
            if (g.coords.size() != 1)
                out.push_back({"bad_vertex_count", "POINT requires exactly 1 coordinate"});
            break;
        case GeometryKind::LineString:
            if (g.coords.size() < 2)
                out.push_back({"too_few_points", "LINESTRING requires >= 2 coordinates"});
            for (size_t i = 0; i + 1 < g.coords.size(); ++i)
                if (g.coords[i] == g.coords[i + 1]) {
                    out.push_back({"duplicate_consecutive", "at index " + std::to_string(i)});
                    break;
                }
            break;
        case GeometryKind::Polygon: {
            bool closed = g.coords.size() >= 2 && g.coords.front() == g.coords.back();
            if (g.coords.size() < 4)
                out.push_back({"too_few_points", "POLYGON ring requires >= 4 coordinates"});
            if (!closed)
                out.push_back({"ring_not_closed", "first coordinate must equal last"});
            bool dup = false;
            for (size_t i = 0; i + 1 < g.coords.size(); ++i)
                if (g.coords[i] == g.coords[i + 1]) {
                    out.push_back({"duplicate_consecutive", "at index " + std::to_string(i)});
                    dup = true;
                    break;
                }
            if (closed && !dup && coords_ok && g.coords.size() >= 4)
                check_ring_simple(g.coords, out);
            break;
        }
    }
    return report;
}

namespace {

Geometry checked(Geometry g) {
    auto report = validate(g);
    if (!report.ok())
        throw InvalidGeometry("invalid " + std::string(kind_name(g.kind)) + ": " + report.summary());
    return g;
}

} // namespace

Geometry make_point(double lon, double lat) {
    return checked(Geometry{GeometryKind::Point, {{lon, lat}}});
}

Geometry make_linestring(std::vector<Coordinate> path) {
    return checked(Geometry{GeometryKind::LineString, std::move(path)});
}

Geometry make_polygon(std::vector<Coordinate> ring) {
    if (ring.size() >= 2 && !(ring.front() == ring.back()) &&
        planar::dist(ring.front(), ring.back()) <= kRingSnapTolerance)
        ring.back() = ring.front();
    return checked(Geometry{GeometryKind::Polygon, std::move(ring)});
}

namespace {

// Cursor-based WKT scanner: whitespace-insensitive, case-insensitive
// keywords, numbers via from_chars.
class WktScanner {
public:
    explicit WktScanner(std::string_view text) : text_(text) {}

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

    std::string keyword() {
        skip_ws();
        std::string word;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])))
            word.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(text_[pos_++]))));
        return word;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c)
            throw MalformedWkt("expected '" + std::string(1, c) + "' at offset " + std::to_string(pos_));
        ++pos_;
    }

    bool try_consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double number() {
        skip_ws();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
        if (ec != std::errc() || ptr == text_.data() + pos_)
            throw MalformedWkt("expected number at offset " + std::to_string(pos_));
        pos_ = static_cast<size_t>(ptr - text_.data());
        if (!std::isfinite(value))
            throw MalformedWkt("non-finite number at offset " + std::to_string(pos_));
        return value;
    }

    size_t offset() const { return pos_; }

private:
    std::string_view text_;
    size_t pos_ = 0;
};

Coordinate parse_coordinate(WktScanner& sc, bool swap_axes) {
    double first = sc.number();
    double second = sc.number();
    return swap_axes ? Coordinate{second, first} : Coordinate{first, second};
}

std::vector<Coordinate> parse_coordinate_list(WktScanner& sc, bool swap_axes) {
    std::vector<Coordinate> coords;
    sc.expect('(');
    coords.push_back(parse_coordinate(sc, swap_axes));
    while (sc.try_consume(','))
        coords.push_back(parse_coordinate(sc, swap_axes));
    sc.expect(')');
    return coords;
}

} // namespace

Geometry parse_wkt(std::string_view text, const WktOptions& opts) {
    WktScanner sc(text);
    if (sc.at_end()) throw MalformedWkt("empty input");

    std::string kw = sc.keyword();
    GeometryKind kind;
    if (kw == "POINT") kind = GeometryKind::Point;
    else if (kw == "LINESTRING") kind = GeometryKind::LineString;
    else if (kw == "POLYGON") kind = GeometryKind::Polygon;
    else if (kw == "MULTIPOINT" || kw == "MULTILINESTRING" || kw == "MULTIPOLYGON" ||
             kw == "GEOMETRYCOLLECTION")
        throw UnsupportedKind(kw + " is not supported");
    else if (kw.empty())
        throw MalformedWkt("expected geometry keyword");
    else
        throw MalformedWkt("unknown geometry keyword '" + kw + "'");

    {
        // Peek for EMPTY before the opening paren.
        WktScanner probe = sc;
        if (probe.keyword() == "EMPTY")
            throw UnsupportedKind(kw + " EMPTY is not supported");
    }

    Geometry g;
    g.kind = kind;
    switch (kind) {
        case GeometryKind::Point: {
            sc.expect('(');
            g.coords.push_back(parse_coordinate(sc, opts.swap_axes));
            sc.expect(')');
            break;
        }
        case GeometryKind::LineString:
            g.coords = parse_coordinate_list(sc, opts.swap_axes);
            break;
        case GeometryKind::Polygon: {
            sc.expect('(');
            g.coords = parse_coordinate_list(sc, opts.swap_axes);
            // Interior rings are parsed for syntax but only the exterior
            // ring is retained.
            while (sc.try_consume(','))
                parse_coordinate_list(sc, opts.swap_axes);
            sc.expect(')');
            break;
        }
    }
    if (!sc.at_end())
        throw MalformedWkt("trailing content at offset " + std::to_string(sc.offset()));

    if (kind == GeometryKind::Polygon && g.coords.size() >= 2 &&
        !(g.coords.front() == g.coords.back()) &&
        planar::dist(g.coords.front(), g.coords.back()) <= kRingSnapTolerance)
        g.coords.back() = g.coords.front();

    auto report = validate(g);
    if (!report.ok())
        throw InvalidGeometry("invalid " + std::string(kind_name(kind)) + ": " + report.summary());
    return g;
}

namespace {

void append_coordinate(std::string& out, const Coordinate& c) {
    out += text::format_double(c.lon);
    out += ' ';
    out += text::format_double(c.lat);
}

void append_coordinate_list(std::string& out, const std::vector<Coordinate>& coords) {
    out += '(';
    for (size_t i = 0; i < coords.size(); ++i) {
        if (i) out += ", ";
        append_coordinate(out, coords[i]);
    }
    out += ')';
}

} // namespace

std::string serialize_wkt(const Geometry& g) {
    std::string out;
    switch (g.kind) {
        case GeometryKind::Point:
            out = "POINT (";
            append_coordinate(out, g.point());
            out += ')';
            break;
        case GeometryKind::LineString:
            out = "LINESTRING ";
            append_coordinate_list(out, g.coords);
            break;
        case GeometryKind::Polygon:
            out = "POLYGON (";
            append_coordinate_list(out, g.coords);
            out += ')';
            break;
    }
    return out;
}

} // namespace urbankg::geo
