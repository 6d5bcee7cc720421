#pragma once

#include <span>
#include <string>
#include <vector>

#include "urbankg/geotools.hpp"

// Batch kernels over geometry arrays. Each kernel comes in an OpenMP-parallel
// flavor and a serial reference flavor; tests assert element-wise equality
// and tools/bench_geo.cpp compares their throughput. Without OpenMP the
// parallel entry points degrade to the serial loops.
namespace urbankg::tools::batch {

std::vector<Rcc5Relation> classify_rcc5_serial(std::span<const geo::Geometry> as,
                                               std::span<const geo::Geometry> bs,
                                               double eps = kDefaultRccEps);
std::vector<Rcc5Relation> classify_rcc5_parallel(std::span<const geo::Geometry> as,
                                                 std::span<const geo::Geometry> bs,
                                                 double eps = kDefaultRccEps);

std::vector<double> distance_km_serial(std::span<const geo::Geometry> as,
                                       std::span<const geo::Geometry> bs);
std::vector<double> distance_km_parallel(std::span<const geo::Geometry> as,
                                         std::span<const geo::Geometry> bs);

std::vector<std::string> geohash_serial(std::span<const geo::Geometry> gs, int precision = 8);
std::vector<std::string> geohash_parallel(std::span<const geo::Geometry> gs, int precision = 8);

// Boolean predicate evaluation (any of the six containment/intersection
// tools); result stored as 0/1 bytes so rows can be written concurrently.
std::vector<unsigned char> predicate_serial(ToolName tool, std::span<const geo::Geometry> as,
                                            std::span<const geo::Geometry> bs);
std::vector<unsigned char> predicate_parallel(ToolName tool, std::span<const geo::Geometry> as,
                                              std::span<const geo::Geometry> bs);

} // namespace urbankg::tools::batch
