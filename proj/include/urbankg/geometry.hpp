#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace urbankg::geo {

// WGS84 lon-lat pair, longitude first everywhere (parser, serializer,
// predicates). lon in (-180, 180], lat in [-90, 90].
struct Coordinate {
    double lon = 0.0;
    double lat = 0.0;
    bool operator==(const Coordinate&) const = default;
};

enum class GeometryKind { Point, LineString, Polygon };

std::string_view kind_name(GeometryKind k);

// Tagged geometry value. `coords` holds the single point, the path, or the
// closed exterior ring depending on `kind`. The struct itself is open so
// invalid shapes can be built and handed to validate(); use the factories
// or parse_wkt() when a validated value is required.
struct Geometry {
    GeometryKind kind = GeometryKind::Point;
    std::vector<Coordinate> coords;

    bool operator==(const Geometry&) const = default;

    const Coordinate& point() const { return coords.front(); }
    const std::vector<Coordinate>& path() const { return coords; }
    const std::vector<Coordinate>& ring() const { return coords; }
};

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class MalformedWkt : public GeometryError {
public:
    using GeometryError::GeometryError;
};
class InvalidGeometry : public GeometryError {
public:
    using GeometryError::GeometryError;
};
class UnsupportedKind : public GeometryError {
public:
    using GeometryError::GeometryError;
};

struct Violation {
    std::string code;   // stable identifier, e.g. "ring_not_closed"
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

// Lists every invariant violation; never throws. Ring simplicity is decided
// by pairwise segment intersection.
ValidationReport validate(const Geometry& g);

// Validating factories; throw InvalidGeometry when the report is non-empty.
Geometry make_point(double lon, double lat);
Geometry make_linestring(std::vector<Coordinate> path);
Geometry make_polygon(std::vector<Coordinate> ring);

// Closing vertices within this distance of the first vertex are snapped onto
// it instead of being rejected; real exports often round the closing vertex.
inline constexpr double kRingSnapTolerance = 1e-9;

struct WktOptions {
    // Input coordinates are written latitude-first; swap each pair before
    // validation. Off by default: the canonical order is longitude-first.
    bool swap_axes = false;
};

Geometry parse_wkt(std::string_view text, const WktOptions& opts = {});

// Uppercase keywords, lon-lat order, shortest round-trip number formatting:
// parse_wkt(serialize_wkt(g)) == g at full stored precision.
std::string serialize_wkt(const Geometry& g);

} // namespace urbankg::geo
