#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "segiso/errors.hpp"
#include "segiso/geo_knn.hpp"
#include "segiso/rng.hpp"
#include "support/oracles.hpp"

using namespace segiso;

namespace {

std::vector<SpatialIndex::Entry> random_entries(std::size_t n, std::uint64_t seed,
                                                double lat0 = 30.0, double lon0 = -100.0,
                                                double span = 4.0) {
    Rng rng(seed);
    std::vector<SpatialIndex::Entry> entries;
    entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        entries.push_back({static_cast<VoterId>(i + 1),
                           GeoPoint{lat0 + span * rng.uniform(), lon0 + span * rng.uniform()}});
    }
    return entries;
}

}  // namespace

TEST_CASE("haversine analytic cases") {
    CHECK(haversine_km({0, 0}, {0, 0}) == 0.0);

    // Quarter great circle: pi*R/2.
    const double quarter = haversine_km({0, 0}, {0, 90});
    CHECK(std::abs(quarter - 10007.557) < 1e-3);
    CHECK(std::abs(quarter - std::numbers::pi * kEarthRadiusKm / 2.0) /
              (std::numbers::pi * kEarthRadiusKm / 2.0) <
          1e-6);

    // Antipodal: pi*R.
    const double antipodal = haversine_km({0, 0}, {0, 180});
    CHECK(std::abs(antipodal - std::numbers::pi * kEarthRadiusKm) /
              (std::numbers::pi * kEarthRadiusKm) <
          1e-6);
}

TEST_CASE("haversine matches spherical law of cosines") {
    const GeoPoint nyc{40.7128, -74.0060};
    const GeoPoint la{34.0522, -118.2437};
    const double hav = haversine_km(nyc, la);
    const double slc = test::slc_distance_km(nyc, la);
    CHECK(std::abs(hav - slc) / slc < 1e-6);

    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const GeoPoint a{-80 + 160 * rng.uniform(), -179 + 358 * rng.uniform()};
        const GeoPoint b{-80 + 160 * rng.uniform(), -179 + 358 * rng.uniform()};
        const double h = haversine_km(a, b);
        const double s = test::slc_distance_km(a, b);
        if (s > 1.0) CHECK(std::abs(h - s) / s < 1e-6);
    }
}

TEST_CASE("haversine rejects non-finite input") {
    CHECK_THROWS_AS(haversine_km({std::nan(""), 0}, {0, 0}), Error);
    CHECK_THROWS_AS(make_geo_point(91.0, 0.0), Error);
    CHECK_THROWS_AS(make_geo_point(0.0, std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("longitude normalizes into (-180, 180]") {
    CHECK(make_geo_point(0, -180).lon == 180.0);
    CHECK(make_geo_point(0, 540).lon == 180.0);
    CHECK(make_geo_point(0, -190).lon == 170.0);
    CHECK(haversine_km(make_geo_point(10, -180), make_geo_point(10, 180)) == 0.0);
}

TEST_CASE("metric sanity: symmetry and triangle inequality") {
    Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        const GeoPoint a{-85 + 170 * rng.uniform(), -179 + 358 * rng.uniform()};
        const GeoPoint b{-85 + 170 * rng.uniform(), -179 + 358 * rng.uniform()};
        const GeoPoint c{-85 + 170 * rng.uniform(), -179 + 358 * rng.uniform()};
        CHECK(haversine_km(a, b) == haversine_km(b, a));
        CHECK(haversine_km(a, c) <= haversine_km(a, b) + haversine_km(b, c) + 1e-9);
    }
}

TEST_CASE("build rejects empty and duplicate-id inputs") {
    CHECK_THROWS_AS(SpatialIndex::build({}, "S1"), Error);
    std::vector<SpatialIndex::Entry> dup{{1, {10, 10}}, {1, {11, 11}}};
    CHECK_THROWS_AS(SpatialIndex::build(dup, "S1"), Error);
}

TEST_CASE("singleton population returns an empty neighbor list") {
    const SpatialIndex index = SpatialIndex::build({{7, {10, 10}}}, "S1");
    const NeighborList result = index.knn(7, 5);
    CHECK(result.neighbors.empty());
    CHECK(result.k_requested == 5);
    CHECK(result.k_returned == 0);
}

TEST_CASE("unknown ego id is a not-found error") {
    const SpatialIndex index = SpatialIndex::build({{1, {10, 10}}, {2, {11, 11}}}, "S1");
    CHECK_THROWS_AS(index.knn(99, 1), Error);
}

TEST_CASE("ties at equal distance break by ascending voter id") {
    // Three co-located candidates; k=2 picks the two smallest ids.
    std::vector<SpatialIndex::Entry> entries{
        {10, {25, -90}}, {42, {25.5, -90.5}}, {17, {25.5, -90.5}}, {5, {25.5, -90.5}}};
    const SpatialIndex index = SpatialIndex::build(entries, "S1");
    const NeighborList result = index.knn(10, 2);
    REQUIRE(result.neighbors.size() == 2);
    CHECK(result.neighbors[0].id == 5);
    CHECK(result.neighbors[1].id == 17);
    CHECK(result.neighbors[0].distance_km == result.neighbors[1].distance_km);
}

TEST_CASE("k larger than population returns all others") {
    const auto entries = random_entries(6, 3);
    const SpatialIndex index = SpatialIndex::build(entries, "S1");
    const NeighborList result = index.knn(1, 50);
    CHECK(result.k_requested == 50);
    CHECK(result.k_returned == 5);
    CHECK(result.neighbors.size() == 5);
}

TEST_CASE("knn equals brute force on random points") {
    const auto entries = random_entries(500, 21);
    const SpatialIndex index = SpatialIndex::build(entries, "S1");
    for (std::size_t ego = 1; ego <= entries.size(); ego += 7) {
        const NeighborList got = index.knn(static_cast<VoterId>(ego), 50);
        const auto want = test::brute_force_knn(entries, static_cast<VoterId>(ego), 50);
        REQUIRE(got.neighbors.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(got.neighbors[i].id == want[i].id);
            CHECK(got.neighbors[i].distance_km == want[i].distance_km);
        }
    }
}

TEST_CASE("neighbor distances are non-decreasing and exclude the ego") {
    const auto entries = random_entries(300, 33);
    const SpatialIndex index = SpatialIndex::build(entries, "S1");
    for (VoterId ego = 1; ego <= 300; ego += 13) {
        const NeighborList result = index.knn(ego, 40);
        for (std::size_t i = 0; i < result.neighbors.size(); ++i) {
            CHECK(result.neighbors[i].id != ego);
            if (i > 0) {
                CHECK(result.neighbors[i].distance_km >= result.neighbors[i - 1].distance_km);
            }
        }
    }
}

TEST_CASE("identical inputs give bit-identical neighbor lists") {
    const auto entries = random_entries(400, 5);
    const SpatialIndex a = SpatialIndex::build(entries, "S1");
    const SpatialIndex b = SpatialIndex::build(entries, "S1");
    for (VoterId ego : {1, 57, 200, 400}) {
        const NeighborList ra = a.knn(ego, 25);
        const NeighborList rb = b.knn(ego, 25);
        REQUIRE(ra.neighbors.size() == rb.neighbors.size());
        for (std::size_t i = 0; i < ra.neighbors.size(); ++i) {
            CHECK(ra.neighbors[i].id == rb.neighbors[i].id);
            CHECK(ra.neighbors[i].distance_km == rb.neighbors[i].distance_km);
        }
    }
}
