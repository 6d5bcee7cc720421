#pragma once

#include <algorithm>
#include <cmath>

#include "urbankg/geometry.hpp"

// Small exact-ish planar primitives shared by geometry validation and the
// geospatial toolkit. All arithmetic is plain double on lon-lat degrees.
namespace urbankg::planar {

using geo::Coordinate;

inline double cross(const Coordinate& o, const Coordinate& a, const Coordinate& b) {
    return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

// -1 clockwise, 0 collinear, +1 counter-clockwise
inline int orientation(const Coordinate& o, const Coordinate& a, const Coordinate& b) {
    double c = cross(o, a, b);
    if (c > 0) return 1;
    if (c < 0) return -1;
    return 0;
}

// p collinear with [a,b] assumed; is p within the segment's bounding box?
inline bool within_box(const Coordinate& a, const Coordinate& b, const Coordinate& p) {
    return std::min(a.lon, b.lon) <= p.lon && p.lon <= std::max(a.lon, b.lon) &&
           std::min(a.lat, b.lat) <= p.lat && p.lat <= std::max(a.lat, b.lat);
}

inline bool on_segment(const Coordinate& a, const Coordinate& b, const Coordinate& p) {
    return orientation(a, b, p) == 0 && within_box(a, b, p);
}

// Closed segment intersection test (shared endpoints and collinear overlap
// both count).
inline bool segments_intersect(const Coordinate& a, const Coordinate& b,
                               const Coordinate& c, const Coordinate& d) {
    int o1 = orientation(a, b, c);
    int o2 = orientation(a, b, d);
    int o3 = orientation(c, d, a);
    int o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && within_box(a, b, c)) return true;
    if (o2 == 0 && within_box(a, b, d)) return true;
    if (o3 == 0 && within_box(c, d, a)) return true;
    if (o4 == 0 && within_box(c, d, b)) return true;
    return false;
}

// Both segment interiors cross, or an endpoint of one lies strictly inside
// the other; excludes mere shared endpoints.
inline bool segments_intersect_properly(const Coordinate& a, const Coordinate& b,
                                        const Coordinate& c, const Coordinate& d) {
    int o1 = orientation(a, b, c);
    int o2 = orientation(a, b, d);
    int o3 = orientation(c, d, a);
    int o4 = orientation(c, d, b);
    return o1 != o2 && o3 != o4 && (o1 != 0 || o2 != 0) && (o3 != 0 || o4 != 0);
}

inline double dist(const Coordinate& a, const Coordinate& b) {
    return std::hypot(a.lon - b.lon, a.lat - b.lat);
}

inline double point_segment_distance(const Coordinate& p, const Coordinate& a, const Coordinate& b) {
    double dx = b.lon - a.lon, dy = b.lat - a.lat;
    double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) return dist(p, a);
    double t = ((p.lon - a.lon) * dx + (p.lat - a.lat) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.lon - (a.lon + t * dx), p.lat - (a.lat + t * dy));
}

inline double segment_segment_distance(const Coordinate& a, const Coordinate& b,
                                       const Coordinate& c, const Coordinate& d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                     point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

} // namespace urbankg::planar
