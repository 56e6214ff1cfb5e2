#include "support/oracles.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "segiso/rng.hpp"

namespace segiso::test {

double slc_distance_km(const GeoPoint& a, const GeoPoint& b) {
    constexpr double deg = std::numbers::pi / 180.0;
    const double phi1 = a.lat * deg;
    const double phi2 = b.lat * deg;
    const double dl = (b.lon - a.lon) * deg;
    double cos_angle =
        std::sin(phi1) * std::sin(phi2) + std::cos(phi1) * std::cos(phi2) * std::cos(dl);
    cos_angle = std::clamp(cos_angle, -1.0, 1.0);
    return kEarthRadiusKm * std::acos(cos_angle);
}

std::vector<Neighbor> brute_force_knn(std::span<const SpatialIndex::Entry> entries,
                                      VoterId ego_id, std::size_t k) {
    const SpatialIndex::Entry* ego = nullptr;
    for (const auto& e : entries) {
        if (e.id == ego_id) ego = &e;
    }
    std::vector<Neighbor> all;
    all.reserve(entries.size());
    for (const auto& e : entries) {
        if (e.id == ego_id) continue;
        all.push_back(Neighbor{e.id, haversine_km(ego->point, e.point)});
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.distance_km != b.distance_km) return a.distance_km < b.distance_km;
        return a.id < b.id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

double percentile_oracle(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const double h = (p / 100.0) * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0 || lo + 1 >= values.size()) return values[lo];
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

BootstrapOracleResult bootstrap_oracle(std::span<const double> offline_values,
                                       std::span<const double> online_values,
                                       std::size_t replicates, double level, std::uint64_t seed,
                                       std::string_view stream_key) {
    const std::size_t n = offline_values.size();
    std::vector<double> diffs(n);
    for (std::size_t i = 0; i < n; ++i) diffs[i] = offline_values[i] - online_values[i];

    BootstrapOracleResult out{};
    out.statistic = percentile_oracle(diffs, 50.0);

    std::vector<double> medians(replicates);
    std::vector<double> resample(n);
    for (std::size_t b = 0; b < replicates; ++b) {
        Rng rng = Rng::stream(seed, stream_key, b);
        for (std::size_t i = 0; i < n; ++i) resample[i] = diffs[rng.below(n)];
        medians[b] = percentile_oracle(resample, 50.0);
    }
    const double alpha = 1.0 - level;
    out.ci_low = percentile_oracle(medians, 100.0 * (alpha / 2.0));
    out.ci_high = percentile_oracle(medians, 100.0 * (1.0 - alpha / 2.0));
    if (out.statistic < out.ci_low) out.ci_low = out.statistic;
    if (out.statistic > out.ci_high) out.ci_high = out.statistic;
    return out;
}

BinOracleResult binned_means_oracle(std::span<const double> x, std::span<const double> y,
                                    std::size_t bins) {
    BinOracleResult out;
    double lo = x[0];
    double hi = x[0];
    for (double v : x) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    out.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) out.edges[b] = lo + width * static_cast<double>(b);
    out.edges[bins] = hi;
    out.mean_y.assign(bins, 0.0);
    out.count.assign(bins, 0);
    std::vector<double> sums(bins, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::size_t b = static_cast<std::size_t>((x[i] - lo) / width);
        if (b >= bins) b = bins - 1;
        sums[b] += y[i];
        ++out.count[b];
    }
    for (std::size_t b = 0; b < bins; ++b) {
        if (out.count[b] > 0) out.mean_y[b] = sums[b] / static_cast<double>(out.count[b]);
    }
    return out;
}

std::vector<LinkedPair> link_oracle(std::span<const VoterRecord> voters,
                                    std::span<const SocialAccount> accounts) {
    auto key_of = [](std::string_view first, std::string_view last, std::string_view city,
                     std::string_view state) {
        const std::string f = normalize_key_component(first);
        const std::string l = normalize_key_component(last);
        const std::string c = normalize_key_component(city);
        const std::string s = normalize_key_component(state);
        if (f.empty() || l.empty() || c.empty() || s.empty()) return std::string();
        return f + "\x1f" + l + "\x1f" + c + "\x1f" + s;
    };
    std::unordered_map<std::string, std::vector<VoterId>> voter_keys;
    for (const VoterRecord& v : voters) {
        const std::string key = key_of(v.first, v.last, v.city, v.state);
        if (!key.empty()) voter_keys[key].push_back(v.id);
    }
    std::unordered_map<std::string, std::vector<AccountId>> account_keys;
    for (const SocialAccount& a : accounts) {
        const std::string key = key_of(a.first, a.last, a.city, a.state);
        if (!key.empty()) account_keys[key].push_back(a.id);
    }
    std::vector<LinkedPair> pairs;
    for (const auto& [key, voter_ids] : voter_keys) {
        if (voter_ids.size() != 1) continue;
        auto it = account_keys.find(key);
        if (it == account_keys.end() || it->second.size() != 1) continue;
        pairs.push_back(LinkedPair{voter_ids[0], it->second[0]});
    }
    std::sort(pairs.begin(), pairs.end(), [](const LinkedPair& a, const LinkedPair& b) {
        return a.voter_id < b.voter_id;
    });
    return pairs;
}

CaOracleResult ca_oracle(const FollowMatrix& matrix, int dims) {
    const Eigen::Index n = static_cast<Eigen::Index>(matrix.row_ids.size());
    const Eigen::Index p = static_cast<Eigen::Index>(matrix.col_ids.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (std::uint32_t j : matrix.rows[static_cast<std::size_t>(i)]) {
            M(i, static_cast<Eigen::Index>(j)) = 1.0;
        }
    }
    const double total = M.sum();
    const Eigen::MatrixXd P = M / total;
    const Eigen::VectorXd r = P.rowwise().sum();
    const Eigen::VectorXd c = P.colwise().sum();
    Eigen::MatrixXd S = P - r * c.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            S(i, j) /= std::sqrt(r[i] * c[j]);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    int kept = 0;
    while (kept < dims && kept < sigma.size() && sigma[kept] > 1e-12 * sigma[0]) ++kept;

    CaOracleResult out;
    out.dims = kept;
    out.row_principal.assign(static_cast<std::size_t>(n), {});
    out.col_principal.assign(static_cast<std::size_t>(p), {});
    out.col_standard.assign(static_cast<std::size_t>(p), {});
    for (int d = 0; d < kept; ++d) {
        out.singular_values[static_cast<std::size_t>(d)] = sigma[d];
        for (Eigen::Index i = 0; i < n; ++i) {
            out.row_principal[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] =
                svd.matrixU()(i, d) * sigma[d] / std::sqrt(r[i]);
        }
        for (Eigen::Index j = 0; j < p; ++j) {
            const double standard = svd.matrixV()(j, d) / std::sqrt(c[j]);
            out.col_standard[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] = standard;
            out.col_principal[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] =
                standard * sigma[d];
        }
    }
    return out;
}

namespace {

std::vector<double> ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> out(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) out[order[k]] = rank;
        i = j + 1;
    }
    return out;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
    const std::vector<double> ra = ranks(a);
    const std::vector<double> rb = ranks(b);
    const std::size_t n = ra.size();
    double mean_a = 0.0;
    double mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += ra[i];
        mean_b += rb[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);
    double cov = 0.0;
    double var_a = 0.0;
    double var_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = ra[i] - mean_a;
        const double db = rb[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    return cov / std::sqrt(var_a * var_b);
}

double sign_align(std::span<const double> reference, std::span<const double> candidate) {
    double dot = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) dot += reference[i] * candidate[i];
    return dot < 0.0 ? -1.0 : 1.0;
}

}  // namespace segiso::test
