#include <benchmark/benchmark.h>

#include "segiso/geo_knn.hpp"
#include "segiso/rng.hpp"

using namespace segiso;

namespace {

std::vector<SpatialIndex::Entry> make_points(std::size_t n) {
    Rng rng(99);
    std::vector<SpatialIndex::Entry> entries;
    entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        entries.push_back({static_cast<VoterId>(i + 1),
                           GeoPoint{30.0 + 3.0 * rng.uniform(), -100.0 + 3.0 * rng.uniform()}});
    }
    return entries;
}

}  // namespace

static void BM_BuildIndex(benchmark::State& state) {
    const auto points = make_points(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        SpatialIndex index = SpatialIndex::build(points, "S0");
        benchmark::DoNotOptimize(index.size());
    }
}
BENCHMARK(BM_BuildIndex)->Arg(2000)->Arg(10000)->Arg(50000);

static void BM_KnnQuery(benchmark::State& state) {
    const auto points = make_points(10000);
    const SpatialIndex index = SpatialIndex::build(points, "S0");
    const std::size_t k = static_cast<std::size_t>(state.range(0));
    VoterId ego = 1;
    for (auto _ : state) {
        const NeighborList result = index.knn(ego, k);
        benchmark::DoNotOptimize(result.k_returned);
        ego = ego % 10000 + 1;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_KnnQuery)->Arg(1)->Arg(50)->Arg(500)->Arg(1000);
