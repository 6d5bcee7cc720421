#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "urbankg/geometry.hpp"

namespace urbankg::tools {

// The eight geospatial tool interfaces. "...2..." tools test containment,
// "...4..." tools test intersection.
enum class ToolName {
    Geohash,
    Distance,
    Point2Polygon,
    Point4Linestring,
    Linestring2Polygon,
    Linestring4Polygon,
    Polygon2Polygon,
    Polygon4Polygon,
};

inline constexpr std::array<ToolName, 8> kAllTools = {
    ToolName::Geohash,           ToolName::Distance,
    ToolName::Point2Polygon,     ToolName::Point4Linestring,
    ToolName::Linestring2Polygon, ToolName::Linestring4Polygon,
    ToolName::Polygon2Polygon,   ToolName::Polygon4Polygon,
};

std::string_view tool_name(ToolName t);
std::string_view tool_description(ToolName t);
std::optional<ToolName> tool_from_name(std::string_view name); // case-insensitive
size_t tool_arity(ToolName t);
// Expected input kinds; empty optional means any geometry kind is accepted.
std::array<std::optional<geo::GeometryKind>, 2> tool_input_kinds(ToolName t);

enum class Rcc5Relation { DC, EC, PO, EQ, IN };

inline constexpr std::array<Rcc5Relation, 5> kAllRcc5 = {
    Rcc5Relation::DC, Rcc5Relation::EC, Rcc5Relation::PO, Rcc5Relation::EQ, Rcc5Relation::IN};

std::string_view rcc5_code(Rcc5Relation r);
std::optional<Rcc5Relation> rcc5_from_code(std::string_view code);

struct ToolResult {
    ToolName tool;
    std::vector<geo::Geometry> inputs;
    std::variant<std::string, double, bool> value;
};

// "tool(Distance)=111.19..." / "tool(Point2Polygon)=true" / "tool(Geohash)=u4pruydq"
std::string render_tool_result(const ToolResult& r);

class ToolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ArityMismatch : public ToolError {
public:
    using ToolError::ToolError;
};
class KindMismatch : public ToolError {
public:
    using ToolError::ToolError;
};

// Representative point of a geometry: the point itself, or the vertex
// centroid (closing vertex excluded for rings).
geo::Coordinate representative_point(const geo::Geometry& g);

// Standard base-32 geohash of the representative point; 8 characters by
// default. Truncating to k characters equals encoding at precision k.
std::string geohash_encode(const geo::Geometry& g, int precision = 8);

// Haversine great-circle distance between representative points, km.
inline constexpr double kEarthRadiusKm = 6371.0;
double distance_km(const geo::Geometry& a, const geo::Geometry& b);

// Planar predicates on lon-lat degrees; boundary contact counts for both
// containment and intersection.
bool point_in_polygon(const geo::Geometry& point, const geo::Geometry& polygon);
bool point_intersects_linestring(const geo::Geometry& point, const geo::Geometry& linestring);
bool linestring_in_polygon(const geo::Geometry& linestring, const geo::Geometry& polygon);
bool linestring_intersects_polygon(const geo::Geometry& linestring, const geo::Geometry& polygon);
bool polygon_in_polygon(const geo::Geometry& inner, const geo::Geometry& outer);
bool polygon_intersects_polygon(const geo::Geometry& a, const geo::Geometry& b);

// Degrees of inflation applied to points (squares of this half-width) and
// linestrings (per-segment buffered rectangles) before RCC-5 classification;
// also the tolerance band used to separate EC from DC and PO.
inline constexpr double kDefaultRccEps = 1e-4;

// Exactly one of the five relations per pair. Symmetric: swapping the
// arguments yields the same relation (IN covers proper part in either
// direction).
Rcc5Relation classify_rcc5(const geo::Geometry& a, const geo::Geometry& b,
                           double eps = kDefaultRccEps);

ToolResult invoke_tool(ToolName name, std::span<const geo::Geometry> args);

} // namespace urbankg::tools
