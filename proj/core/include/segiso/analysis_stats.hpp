#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segiso/types.hpp"

namespace segiso {

// Linear-interpolation percentile of an unsorted sample, p in [0, 100].
double percentile(std::vector<double> values, double p);
double median(std::vector<double> values);

inline const std::vector<double> kProfilePercentiles{1, 10, 25, 50, 75, 90, 99};

struct PercentileProfile {
    std::string group;
    std::vector<double> percentiles;
    std::vector<double> values;  // non-decreasing
};

PercentileProfile percentile_profile(std::span<const double> scores,
                                     std::span<const double> percentiles);

struct BinnedCurve {
    std::vector<double> edges;          // bins+1, strictly increasing
    std::vector<double> mean_y;         // NaN-free; 0 for empty bins
    std::vector<std::uint64_t> count;   // empty bins emitted with count 0
};

// Equal-width bins over [min(x), max(x)], mean of y per bin.
BinnedCurve binned_means(std::span<const double> x, std::span<const double> y,
                         std::size_t bins = 500);

struct BootstrapResult {
    double statistic{};  // median of (offline - online)
    double ci_low{};
    double ci_high{};
    std::size_t n{};
};

// Percentile bootstrap of the median paired difference. Resample b draws
// its indices from Rng::stream(seed, stream_key, b); the stream derivation
// is part of the artifact contract so independent implementations can
// reproduce CI endpoints exactly. The interval is widened to contain the
// point estimate when the raw percentile interval misses it.
BootstrapResult bootstrap_median_diff(std::span<const double> offline_values,
                                      std::span<const double> online_values,
                                      std::size_t replicates, double level, std::uint64_t seed,
                                      std::string_view stream_key);

enum class StateType : std::uint8_t { dem_leaning, rep_leaning, swing };

constexpr std::string_view state_type_name(StateType t) {
    switch (t) {
        case StateType::dem_leaning: return "dem_leaning";
        case StateType::rep_leaning: return "rep_leaning";
        case StateType::swing: return "swing";
    }
    return "?";
}

// Swing when the two-party share gap is at most the threshold (default
// 3 points). Accepts fractional or percent shares.
StateType classify_state(double share_dem, double share_rep, double swing_threshold = 0.03);

class StateResultsTable {
public:
    void add(std::string state, double share_dem, double share_rep);
    std::optional<StateType> type_of(const std::string& state, double swing_threshold) const;
    std::size_t size() const { return shares_.size(); }

private:
    std::map<std::string, std::pair<double, double>> shares_;
};

struct PanelRow {
    VoterId voter_id{};
    Party party = Party::ind;
    std::string gender;
    std::string race;
    std::optional<int> age;
    std::string state;
    double offline_value{};
    double online_value{};
};

struct SubgroupDiff {
    std::string party;
    std::string dimension;  // all | gender | race | age | state_type
    std::string level;
    double median_diff{};
    double ci_low{};
    double ci_high{};
    std::size_t n{};
};

struct SubgroupConfig {
    std::vector<std::string> dimensions{"all", "gender", "race", "age", "state_type"};
    std::vector<int> age_band_lowers{18, 35, 51, 63};
    double swing_threshold = 0.03;
    std::size_t replicates = 1000;
    double level = 0.99;
    std::uint64_t seed = 1;
    std::size_t min_group_size = 2;
};

// Party x subgroup bootstrap medians of (offline - online). Unknown
// dimension names are a configuration error.
std::vector<SubgroupDiff> subgroup_split(std::span<const PanelRow> panel,
                                         const SubgroupConfig& config,
                                         const StateResultsTable& state_results);

}  // namespace segiso
