#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "urbankg/geo_batch.hpp"
#include "oracles.hpp"

using namespace urbankg;
using namespace urbankg::tools;
using geo::Geometry;

namespace {

struct Workload {
    std::vector<Geometry> points_a, points_b, polys_a, polys_b;
};

Workload make_workload(size_t n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    Workload w;
    for (size_t i = 0; i < n; ++i) {
        w.points_a.push_back(oracle::random_point(rng));
        w.points_b.push_back(oracle::random_point(rng));
        w.polys_a.push_back(oracle::random_polygon(rng));
        w.polys_b.push_back(oracle::random_polygon(rng));
    }
    return w;
}

} // namespace

TEST_CASE("parallel kernels match the serial reference exactly") {
    Workload w = make_workload(500, 99);

    CHECK(batch::distance_km_parallel(w.points_a, w.points_b) ==
          batch::distance_km_serial(w.points_a, w.points_b));
    CHECK(batch::geohash_parallel(w.points_a) == batch::geohash_serial(w.points_a));
    CHECK(batch::predicate_parallel(ToolName::Polygon4Polygon, w.polys_a, w.polys_b) ==
          batch::predicate_serial(ToolName::Polygon4Polygon, w.polys_a, w.polys_b));
    CHECK(batch::predicate_parallel(ToolName::Polygon2Polygon, w.polys_a, w.polys_b) ==
          batch::predicate_serial(ToolName::Polygon2Polygon, w.polys_a, w.polys_b));
    CHECK(batch::classify_rcc5_parallel(w.polys_a, w.polys_b) ==
          batch::classify_rcc5_serial(w.polys_a, w.polys_b));
}

TEST_CASE("batch kernels validate input sizes") {
    Workload w = make_workload(3, 7);
    std::vector<Geometry> short_side(w.points_a.begin(), w.points_a.begin() + 2);
    CHECK_THROWS_AS(batch::distance_km_parallel(w.points_a, short_side), std::invalid_argument);
    CHECK_THROWS_AS(batch::predicate_serial(ToolName::Geohash, w.polys_a, w.polys_b), ToolError);
}

TEST_CASE("kernels propagate per-element semantics") {
    Workload w = make_workload(64, 123);
    auto relations = batch::classify_rcc5_parallel(w.polys_a, w.polys_a);
    for (Rcc5Relation r : relations) CHECK(r == Rcc5Relation::EQ);
    auto distances = batch::distance_km_serial(w.points_a, w.points_a);
    for (double d : distances) CHECK(d == 0.0);
}
