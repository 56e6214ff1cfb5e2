#include <benchmark/benchmark.h>

#include "segiso/ideology_ca.hpp"
#include "segiso/rng.hpp"

using namespace segiso;

namespace {

FollowMatrix random_matrix(std::size_t rows, std::size_t cols, double density,
                           std::uint64_t seed) {
    Rng rng(seed);
    EliteFollows follows;
    std::vector<AccountId> elites;
    for (std::size_t j = 0; j < cols; ++j) elites.push_back(static_cast<AccountId>(j + 1));
    for (std::size_t i = 0; i < rows; ++i) {
        std::vector<AccountId> followed;
        for (std::size_t j = 0; j < cols; ++j) {
            if (rng.bernoulli(density)) followed.push_back(elites[j]);
        }
        if (followed.empty()) followed.push_back(elites[rng.below(cols)]);
        follows[static_cast<AccountId>(i + 1)] = std::move(followed);
    }
    return build_follow_matrix(follows, elites);
}

}  // namespace

static void BM_FitCa(benchmark::State& state) {
    const FollowMatrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 80, 0.2, 17);
    for (auto _ : state) {
        CaFit fit = fit_ca(m, 3, {});
        benchmark::DoNotOptimize(fit.model.singular_values[0]);
    }
}
BENCHMARK(BM_FitCa)->Arg(1000)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

static void BM_Project(benchmark::State& state) {
    const FollowMatrix m = random_matrix(2000, 80, 0.2, 18);
    const CaFit fit = fit_ca(m, 3, {});
    std::vector<AccountId> row{1, 5, 9, 13, 17, 21, 25, 29};
    for (auto _ : state) {
        auto score = project(fit.model, row, 3);
        benchmark::DoNotOptimize(score);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Project);
