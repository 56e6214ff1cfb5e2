#include "segiso/analysis_stats.hpp"

#include <algorithm>
#include <cmath>

#include "segiso/errors.hpp"
#include "segiso/parallel.hpp"
#include "segiso/partisan.hpp"
#include "segiso/rng.hpp"

namespace segiso {

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw_error(Errc::insufficient_data, "percentile of empty sample");
    if (!(p >= 0.0 && p <= 100.0)) {
        throw_error(Errc::invalid_argument, "percentile p must be in [0, 100]");
    }
    std::sort(values.begin(), values.end());
    const double h = (p / 100.0) * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0 || lo + 1 >= values.size()) return values[lo];
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

double median(std::vector<double> values) { return percentile(std::move(values), 50.0); }

PercentileProfile percentile_profile(std::span<const double> scores,
                                     std::span<const double> percentiles) {
    if (scores.empty()) throw_error(Errc::insufficient_data, "percentile_profile: empty sample");
    PercentileProfile out;
    out.percentiles.assign(percentiles.begin(), percentiles.end());
    std::vector<double> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end());
    out.values.reserve(percentiles.size());
    for (double p : percentiles) {
        if (!(p >= 0.0 && p <= 100.0)) {
            throw_error(Errc::invalid_argument, "percentile p must be in [0, 100]");
        }
        const double h = (p / 100.0) * static_cast<double>(sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(h);
        const double frac = h - static_cast<double>(lo);
        out.values.push_back((frac == 0.0 || lo + 1 >= sorted.size())
                                 ? sorted[lo]
                                 : sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]));
    }
    return out;
}

BinnedCurve binned_means(std::span<const double> x, std::span<const double> y,
                         std::size_t bins) {
    if (x.size() != y.size()) {
        throw_error(Errc::invalid_argument, "binned_means: x/y length mismatch");
    }
    if (x.empty()) throw_error(Errc::insufficient_data, "binned_means: empty input");
    if (bins < 1) throw_error(Errc::invalid_argument, "binned_means: bins must be >= 1");

    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) {
        throw_error(Errc::insufficient_data, "binned_means: degenerate x-range");
    }
    const double width = (hi - lo) / static_cast<double>(bins);

    BinnedCurve curve;
    curve.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
        curve.edges[b] = lo + width * static_cast<double>(b);
    }
    curve.edges[bins] = hi;
    curve.mean_y.assign(bins, 0.0);
    curve.count.assign(bins, 0);

    std::vector<double> sums(bins, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t b = static_cast<std::size_t>((x[i] - lo) / width);
        if (b >= bins) b = bins - 1;
        sums[b] += y[i];
        ++curve.count[b];
    }
    for (std::size_t b = 0; b < bins; ++b) {
        if (curve.count[b] > 0) curve.mean_y[b] = sums[b] / static_cast<double>(curve.count[b]);
    }
    return curve;
}

BootstrapResult bootstrap_median_diff(std::span<const double> offline_values,
                                      std::span<const double> online_values,
                                      std::size_t replicates, double level, std::uint64_t seed,
                                      std::string_view stream_key) {
    if (offline_values.size() != online_values.size()) {
        throw_error(Errc::invalid_argument, "bootstrap: paired vectors differ in length");
    }
    const std::size_t n = offline_values.size();
    if (n < 2) throw_error(Errc::insufficient_data, "bootstrap: need at least 2 pairs");
    if (replicates < 1) throw_error(Errc::invalid_argument, "bootstrap: replicates must be >= 1");
    if (!(level > 0.0 && level < 1.0)) {
        throw_error(Errc::invalid_argument, "bootstrap: level must be in (0, 1)");
    }

    std::vector<double> diffs(n);
    for (std::size_t i = 0; i < n; ++i) diffs[i] = offline_values[i] - online_values[i];

    BootstrapResult result;
    result.n = n;
    result.statistic = median(diffs);

    std::vector<double> medians(replicates);
    const std::string key(stream_key);
    parallel_for(replicates, [&](std::size_t begin, std::size_t end) {
        std::vector<double> resample(n);
        for (std::size_t b = begin; b < end; ++b) {
            Rng rng = Rng::stream(seed, key, b);
            for (std::size_t i = 0; i < n; ++i) {
                resample[i] = diffs[rng.below(n)];
            }
            medians[b] = median(resample);
        }
    });

    const double alpha = 1.0 - level;
    result.ci_low = percentile(medians, 100.0 * (alpha / 2.0));
    result.ci_high = percentile(std::move(medians), 100.0 * (1.0 - alpha / 2.0));
    // The interval always contains the point estimate.
    result.ci_low = std::min(result.ci_low, result.statistic);
    result.ci_high = std::max(result.ci_high, result.statistic);
    return result;
}

StateType classify_state(double share_dem, double share_rep, double swing_threshold) {
    if (share_dem < 0.0 || share_rep < 0.0) {
        throw_error(Errc::invalid_argument, "state shares must be non-negative");
    }
    double dem = share_dem;
    double rep = share_rep;
    // Percent-scale rows (e.g. 51 / 49) normalize to fractions.
    if (dem > 1.0 || rep > 1.0) {
        dem /= 100.0;
        rep /= 100.0;
    }
    // Small slack keeps exact-boundary gaps (e.g. 0.515 - 0.485) inside.
    if (std::abs(dem - rep) <= swing_threshold + 1e-12) return StateType::swing;
    return dem > rep ? StateType::dem_leaning : StateType::rep_leaning;
}

void StateResultsTable::add(std::string state, double share_dem, double share_rep) {
    if (!shares_.emplace(std::move(state), std::make_pair(share_dem, share_rep)).second) {
        throw_error(Errc::schema, "duplicate state in results table");
    }
}

std::optional<StateType> StateResultsTable::type_of(const std::string& state,
                                                    double swing_threshold) const {
    auto it = shares_.find(state);
    if (it == shares_.end()) return std::nullopt;
    return classify_state(it->second.first, it->second.second, swing_threshold);
}

namespace {

std::string panel_level(const PanelRow& row, const std::string& dimension,
                        const SubgroupConfig& config, const StateResultsTable& states) {
    if (dimension == "all") return "all";
    if (dimension == "gender") return row.gender.empty() ? std::string() : row.gender;
    if (dimension == "race") return row.race.empty() ? std::string() : row.race;
    if (dimension == "age") {
        return row.age ? age_band_label(*row.age, config.age_band_lowers) : std::string();
    }
    if (dimension == "state_type") {
        auto type = states.type_of(row.state, config.swing_threshold);
        return type ? std::string(state_type_name(*type)) : std::string();
    }
    throw_error(Errc::config, "unknown subgroup dimension '" + dimension + "'");
}

}  // namespace

std::vector<SubgroupDiff> subgroup_split(std::span<const PanelRow> panel,
                                         const SubgroupConfig& config,
                                         const StateResultsTable& state_results) {
    std::vector<SubgroupDiff> out;
    for (const std::string& dimension : config.dimensions) {
        // group rows by (party, level); empty level means unclassifiable.
        std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>>
            groups;
        for (const PanelRow& row : panel) {
            if (row.party == Party::ind) continue;
            const std::string level = panel_level(row, dimension, config, state_results);
            if (level.empty()) continue;
            auto& [off, on] = groups[{std::string(party_name(row.party)), level}];
            off.push_back(row.offline_value);
            on.push_back(row.online_value);
        }
        for (const auto& [key, values] : groups) {
            const auto& [off, on] = values;
            if (off.size() < config.min_group_size) continue;
            const std::string stream_key = key.first + "|" + dimension + "|" + key.second;
            BootstrapResult boot = bootstrap_median_diff(off, on, config.replicates, config.level,
                                                         config.seed, stream_key);
            SubgroupDiff diff;
            diff.party = key.first;
            diff.dimension = dimension;
            diff.level = key.second;
            diff.median_diff = boot.statistic;
            diff.ci_low = boot.ci_low;
            diff.ci_high = boot.ci_high;
            diff.n = boot.n;
            out.push_back(std::move(diff));
        }
    }
    return out;
}

}  // namespace segiso
