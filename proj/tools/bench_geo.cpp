// Throughput comparison of the serial reference kernels against the
// OpenMP-parallel ones on randomized geometry workloads.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "urbankg/geo_batch.hpp"
#include "urbankg/geometry.hpp"

using urbankg::geo::Coordinate;
using urbankg::geo::Geometry;
namespace batch = urbankg::tools::batch;

namespace {

Geometry random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> lon(-74.2, -73.6), lat(40.4, 41.0);
    return urbankg::geo::make_point(lon(rng), lat(rng));
}

Geometry random_box(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> lon(-74.2, -73.6), lat(40.4, 41.0);
    std::uniform_real_distribution<double> size(0.001, 0.05);
    double x = lon(rng), y = lat(rng), w = size(rng), h = size(rng);
    return urbankg::geo::make_polygon(
        {{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}, {x, y}});
}

template <typename F>
double time_s(F&& f) {
    auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const char* name, double serial_s, double parallel_s) {
    std::printf("%-22s serial %8.3f s   parallel %8.3f s   speedup %.2fx\n", name, serial_s,
                parallel_s, serial_s / parallel_s);
}

} // namespace

int main(int argc, char** argv) {
    size_t n = argc > 1 ? std::stoul(argv[1]) : 20000;
#ifdef _OPENMP
    std::printf("threads: %d, pairs: %zu\n", omp_get_max_threads(), n);
#else
    std::printf("OpenMP unavailable, pairs: %zu\n", n);
#endif

    std::mt19937_64 rng(7);
    std::vector<Geometry> points_a, points_b, boxes_a, boxes_b;
    for (size_t i = 0; i < n; ++i) {
        points_a.push_back(random_point(rng));
        points_b.push_back(random_point(rng));
        boxes_a.push_back(random_box(rng));
        boxes_b.push_back(random_box(rng));
    }

    std::vector<double> d1, d2;
    report("distance_km",
           time_s([&] { d1 = batch::distance_km_serial(points_a, points_b); }),
           time_s([&] { d2 = batch::distance_km_parallel(points_a, points_b); }));

    std::vector<std::string> g1, g2;
    report("geohash",
           time_s([&] { g1 = batch::geohash_serial(points_a); }),
           time_s([&] { g2 = batch::geohash_parallel(points_a); }));

    std::vector<unsigned char> p1, p2;
    report("polygon4polygon",
           time_s([&] {
               p1 = batch::predicate_serial(urbankg::tools::ToolName::Polygon4Polygon, boxes_a,
                                            boxes_b);
           }),
           time_s([&] {
               p2 = batch::predicate_parallel(urbankg::tools::ToolName::Polygon4Polygon, boxes_a,
                                              boxes_b);
           }));

    std::vector<urbankg::tools::Rcc5Relation> r1, r2;
    report("classify_rcc5",
           time_s([&] { r1 = batch::classify_rcc5_serial(boxes_a, boxes_b); }),
           time_s([&] { r2 = batch::classify_rcc5_parallel(boxes_a, boxes_b); }));

    bool same = d1 == d2 && g1 == g2 && p1 == p2 && r1 == r2;
    std::printf("serial/parallel outputs identical: %s\n", same ? "yes" : "NO");
    return same ? 0 : 1;
}
