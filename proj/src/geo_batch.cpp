#include "urbankg/geo_batch.hpp"

#include <stdexcept>

namespace urbankg::tools::batch {

using geo::Geometry;

namespace {

void require_same_size(std::span<const Geometry> as, std::span<const Geometry> bs) {
    if (as.size() != bs.size())
        throw std::invalid_argument("batch inputs must have equal length");
}

bool run_predicate(ToolName tool, const Geometry& a, const Geometry& b) {
    switch (tool) {
        case ToolName::Point2Polygon: return point_in_polygon(a, b);
        case ToolName::Point4Linestring: return point_intersects_linestring(a, b);
        case ToolName::Linestring2Polygon: return linestring_in_polygon(a, b);
        case ToolName::Linestring4Polygon: return linestring_intersects_polygon(a, b);
        case ToolName::Polygon2Polygon: return polygon_in_polygon(a, b);
        case ToolName::Polygon4Polygon: return polygon_intersects_polygon(a, b);
        default: throw ToolError("not a boolean predicate tool");
    }
}

} // namespace

std::vector<Rcc5Relation> classify_rcc5_serial(std::span<const Geometry> as,
                                               std::span<const Geometry> bs, double eps) {
    require_same_size(as, bs);
    std::vector<Rcc5Relation> out(as.size());
    for (size_t i = 0; i < as.size(); ++i)
        out[i] = classify_rcc5(as[i], bs[i], eps);
    return out;
}

std::vector<Rcc5Relation> classify_rcc5_parallel(std::span<const Geometry> as,
                                                 std::span<const Geometry> bs, double eps) {
    require_same_size(as, bs);
    std::vector<Rcc5Relation> out(as.size());
    const long n = static_cast<long>(as.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i)
        out[i] = classify_rcc5(as[i], bs[i], eps);
    return out;
}

std::vector<double> distance_km_serial(std::span<const Geometry> as, std::span<const Geometry> bs) {
    require_same_size(as, bs);
    std::vector<double> out(as.size());
    for (size_t i = 0; i < as.size(); ++i)
        out[i] = distance_km(as[i], bs[i]);
    return out;
}

std::vector<double> distance_km_parallel(std::span<const Geometry> as,
                                         std::span<const Geometry> bs) {
    require_same_size(as, bs);
    std::vector<double> out(as.size());
    const long n = static_cast<long>(as.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        out[i] = distance_km(as[i], bs[i]);
    return out;
}

std::vector<std::string> geohash_serial(std::span<const Geometry> gs, int precision) {
    std::vector<std::string> out(gs.size());
    for (size_t i = 0; i < gs.size(); ++i)
        out[i] = geohash_encode(gs[i], precision);
    return out;
}

std::vector<std::string> geohash_parallel(std::span<const Geometry> gs, int precision) {
    std::vector<std::string> out(gs.size());
    const long n = static_cast<long>(gs.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        out[i] = geohash_encode(gs[i], precision);
    return out;
}

std::vector<unsigned char> predicate_serial(ToolName tool, std::span<const Geometry> as,
                                            std::span<const Geometry> bs) {
    require_same_size(as, bs);
    std::vector<unsigned char> out(as.size());
    for (size_t i = 0; i < as.size(); ++i)
        out[i] = run_predicate(tool, as[i], bs[i]) ? 1 : 0;
    return out;
}

std::vector<unsigned char> predicate_parallel(ToolName tool, std::span<const Geometry> as,
                                              std::span<const Geometry> bs) {
    require_same_size(as, bs);
    std::vector<unsigned char> out(as.size());
    const long n = static_cast<long>(as.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (long i = 0; i < n; ++i)
        out[i] = run_predicate(tool, as[i], bs[i]) ? 1 : 0;
    return out;
}

} // namespace urbankg::tools::batch
