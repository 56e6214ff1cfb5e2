#include "segiso/ideology_ca.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "segiso/analysis_stats.hpp"
#include "segiso/csv.hpp"
#include "segiso/errors.hpp"
#include "segiso/rng.hpp"

namespace segiso {

namespace {

FollowMatrix matrix_from_selected(const EliteFollows& follows,
                                  const std::vector<AccountId>& selected_users,
                                  std::span<const AccountId> elite_universe) {
    std::unordered_map<AccountId, std::uint32_t> universe_index;
    universe_index.reserve(elite_universe.size());
    std::vector<AccountId> universe_sorted(elite_universe.begin(), elite_universe.end());
    std::sort(universe_sorted.begin(), universe_sorted.end());
    universe_sorted.erase(std::unique(universe_sorted.begin(), universe_sorted.end()),
                          universe_sorted.end());
    for (std::uint32_t j = 0; j < universe_sorted.size(); ++j) {
        universe_index.emplace(universe_sorted[j], j);
    }

    // First pass: entries over the full universe, dropping users with none.
    std::vector<std::pair<AccountId, std::vector<std::uint32_t>>> kept;
    std::vector<std::size_t> col_counts(universe_sorted.size(), 0);
    kept.reserve(selected_users.size());
    for (AccountId user : selected_users) {
        auto it = follows.find(user);
        if (it == follows.end()) continue;
        std::vector<std::uint32_t> cols;
        cols.reserve(it->second.size());
        for (AccountId elite : it->second) {
            auto jt = universe_index.find(elite);
            if (jt != universe_index.end()) cols.push_back(jt->second);
        }
        if (cols.empty()) continue;
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        for (std::uint32_t j : cols) ++col_counts[j];
        kept.emplace_back(user, std::move(cols));
    }

    // Drop never-followed columns; removing them cannot empty a kept row.
    std::vector<std::uint32_t> remap(universe_sorted.size(), UINT32_MAX);
    FollowMatrix out;
    for (std::uint32_t j = 0; j < universe_sorted.size(); ++j) {
        if (col_counts[j] > 0) {
            remap[j] = static_cast<std::uint32_t>(out.col_ids.size());
            out.col_ids.push_back(universe_sorted[j]);
        }
    }
    out.row_ids.reserve(kept.size());
    out.rows.reserve(kept.size());
    for (auto& [user, cols] : kept) {
        for (auto& j : cols) j = remap[j];
        out.nnz += cols.size();
        out.row_ids.push_back(user);
        out.rows.push_back(std::move(cols));
    }
    return out;
}

}  // namespace

FollowMatrix build_follow_matrix(const EliteFollows& follows,
                                 std::span<const AccountId> elite_universe) {
    std::vector<AccountId> users;
    users.reserve(follows.size());
    for (const auto& [user, elites] : follows) users.push_back(user);
    return matrix_from_selected(follows, users, elite_universe);
}

TrainingSelection select_training(const EliteFollows& follows,
                                  std::span<const AccountId> elite_universe,
                                  std::size_t min_elites, std::size_t n, std::uint64_t seed,
                                  std::size_t min_qualifying) {
    std::vector<AccountId> universe_sorted(elite_universe.begin(), elite_universe.end());
    std::sort(universe_sorted.begin(), universe_sorted.end());

    std::vector<AccountId> qualifying;
    for (const auto& [user, elites] : follows) {
        std::size_t count = 0;
        for (AccountId elite : elites) {
            if (std::binary_search(universe_sorted.begin(), universe_sorted.end(), elite)) ++count;
        }
        if (count >= min_elites) qualifying.push_back(user);
    }
    if (qualifying.size() < min_qualifying) {
        throw_error(Errc::insufficient_training,
                    "only " + std::to_string(qualifying.size()) + " users follow >= " +
                        std::to_string(min_elites) + " elites (need " +
                        std::to_string(min_qualifying) + ")");
    }

    std::vector<AccountId> selected;
    if (qualifying.size() <= n) {
        selected = qualifying;
    } else {
        // Partial Fisher-Yates over the id-sorted pool.
        Rng rng = Rng::stream(seed, "ca_training", 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + rng.below(qualifying.size() - i);
            std::swap(qualifying[i], qualifying[j]);
        }
        selected.assign(qualifying.begin(), qualifying.begin() + static_cast<std::ptrdiff_t>(n));
        std::sort(selected.begin(), selected.end());
    }

    TrainingSelection out;
    out.n_qualifying = qualifying.size();
    out.matrix = matrix_from_selected(follows, selected, elite_universe);
    return out;
}

std::optional<std::size_t> CaModel::col_index(AccountId elite) const {
    auto it = lookup_.find(elite);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

void CaModel::rebuild_lookup() {
    lookup_.clear();
    lookup_.reserve(elite_ids.size());
    for (std::size_t j = 0; j < elite_ids.size(); ++j) lookup_.emplace(elite_ids[j], j);
}

CaFit fit_ca(const FollowMatrix& matrix, int dims,
             std::span<const AccountId> conservative_anchors) {
    if (dims < 1 || dims > kCaDims) {
        throw_error(Errc::config, "fit_ca: dims must be in [1, " + std::to_string(kCaDims) + "]");
    }
    const std::size_t n = matrix.row_ids.size();
    const std::size_t p = matrix.col_ids.size();
    if (n < static_cast<std::size_t>(dims) + 1 || p < static_cast<std::size_t>(dims) + 1) {
        throw_error(Errc::insufficient_training,
                    "fit_ca: need at least dims+1 rows and columns, got " + std::to_string(n) +
                        "x" + std::to_string(p));
    }
    if (matrix.nnz == 0) throw_error(Errc::degenerate_model, "fit_ca: empty matrix");

    const double grand_total = static_cast<double>(matrix.nnz);
    Eigen::VectorXd sqrt_r(n);
    Eigen::VectorXd sqrt_c = Eigen::VectorXd::Zero(p);
    std::vector<double> col_count(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (matrix.rows[i].empty()) throw_error(Errc::degenerate_model, "fit_ca: empty row");
        sqrt_r[static_cast<Eigen::Index>(i)] =
            std::sqrt(static_cast<double>(matrix.rows[i].size()) / grand_total);
        for (std::uint32_t j : matrix.rows[i]) col_count[j] += 1.0;
    }
    for (std::size_t j = 0; j < p; ++j) {
        if (col_count[j] <= 0.0) throw_error(Errc::degenerate_model, "fit_ca: empty column");
        sqrt_c[static_cast<Eigen::Index>(j)] = std::sqrt(col_count[j] / grand_total);
    }

    // Standardized residuals S = D_r^{-1/2} (P - r c^T) D_c^{-1/2}.
    Eigen::MatrixXd S = -(sqrt_r * sqrt_c.transpose());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::uint32_t j : matrix.rows[i]) {
            S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
                (1.0 / grand_total) / (sqrt_r[static_cast<Eigen::Index>(i)] *
                                       sqrt_c[static_cast<Eigen::Index>(j)]);
        }
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    if (sigma.size() == 0 || !(sigma[0] > 0.0)) {
        throw_error(Errc::degenerate_model, "fit_ca: no positive singular values");
    }
    int kept = 0;
    const double tol = std::max(1e-14, sigma[0] * 1e-12);
    while (kept < dims && kept < sigma.size() && sigma[kept] > tol) ++kept;
    if (kept == 0) throw_error(Errc::degenerate_model, "fit_ca: rank zero residual matrix");

    Eigen::MatrixXd U = svd.matrixU().leftCols(kept);
    Eigen::MatrixXd V = svd.matrixV().leftCols(kept);

    // Principal row coords F = D_r^{-1/2} U Sigma; standard column coords
    // B = D_c^{-1/2} V; principal column coords G = B Sigma.
    Eigen::MatrixXd F = U;
    for (Eigen::Index i = 0; i < F.rows(); ++i) F.row(i) /= sqrt_r[i];
    Eigen::MatrixXd B = V;
    for (Eigen::Index j = 0; j < B.rows(); ++j) B.row(j) /= sqrt_c[j];
    for (int d = 0; d < kept; ++d) F.col(d) *= sigma[d];

    // Dim-1 orientation: conservative anchors must average positive.
    bool oriented = false;
    {
        double anchor_sum = 0.0;
        std::size_t anchor_count = 0;
        std::unordered_map<AccountId, std::size_t> col_of;
        for (std::size_t j = 0; j < p; ++j) col_of.emplace(matrix.col_ids[j], j);
        for (AccountId anchor : conservative_anchors) {
            auto it = col_of.find(anchor);
            if (it == col_of.end()) continue;
            anchor_sum += B(static_cast<Eigen::Index>(it->second), 0);
            ++anchor_count;
        }
        if (anchor_count > 0 && anchor_sum != 0.0) {
            oriented = true;
            if (anchor_sum < 0.0) {
                F.col(0) = -F.col(0);
                B.col(0) = -B.col(0);
            }
        }
    }
    // Remaining dims get a reproducible sign: largest-magnitude column
    // loading is positive.
    for (int d = 1; d < kept; ++d) {
        Eigen::Index j_max = 0;
        double best = -1.0;
        for (Eigen::Index j = 0; j < B.rows(); ++j) {
            const double mag = std::abs(B(j, d));
            if (mag > best) {
                best = mag;
                j_max = j;
            }
        }
        if (B(j_max, d) < 0.0) {
            F.col(d) = -F.col(d);
            B.col(d) = -B.col(d);
        }
    }

    // Standardization over the training rows' dim-1 principal coordinates.
    const Eigen::VectorXd dim1 = F.col(0);
    const double mean = dim1.mean();
    double ss = 0.0;
    for (Eigen::Index i = 0; i < dim1.size(); ++i) {
        const double centered = dim1[i] - mean;
        ss += centered * centered;
    }
    if (n < 2) throw_error(Errc::degenerate_model, "fit_ca: need >= 2 rows to standardize");
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
        throw_error(Errc::degenerate_model, "fit_ca: zero variance in dim-1 row scores");
    }

    CaFit fit;
    fit.model.dims_requested = dims;
    fit.model.dims = kept;
    fit.model.elite_ids = matrix.col_ids;
    fit.model.col_standard.assign(p, {});
    fit.model.col_principal.assign(p, {});
    fit.model.col_mass.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        fit.model.col_mass[j] = col_count[j] / grand_total;
        for (int d = 0; d < kept; ++d) {
            const double b = B(static_cast<Eigen::Index>(j), d);
            fit.model.col_standard[j][d] = b;
            fit.model.col_principal[j][d] = b * sigma[d];
        }
    }
    for (int d = 0; d < kept; ++d) fit.model.singular_values[d] = sigma[d];
    fit.model.standardize_mean = mean;
    fit.model.standardize_sd = sd;
    fit.model.oriented = oriented;
    fit.model.n_training_rows = n;
    fit.model.rebuild_lookup();

    fit.row_ids = matrix.row_ids;
    fit.row_principal.assign(n, {});
    fit.theta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int d = 0; d < kept; ++d) {
            fit.row_principal[i][d] = F(static_cast<Eigen::Index>(i), d);
        }
        fit.theta[i] = (fit.row_principal[i][0] - mean) / sd;
    }
    return fit;
}

std::optional<IdeologyScore> project(const CaModel& model,
                                     std::span<const AccountId> followed_elites,
                                     std::size_t min_elites) {
    std::vector<std::size_t> cols;
    cols.reserve(followed_elites.size());
    for (AccountId elite : followed_elites) {
        if (auto j = model.col_index(elite)) cols.push_back(*j);
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    if (cols.size() < min_elites) return std::nullopt;

    // Supplementary row: profile (uniform over followed elites) times the
    // standard column coordinates gives the principal coordinate.
    const double weight = 1.0 / static_cast<double>(cols.size());
    double raw = 0.0;
    for (std::size_t j : cols) raw += weight * model.col_standard[j][0];

    IdeologyScore score;
    score.theta = (raw - model.standardize_mean) / model.standardize_sd;
    score.n_elites_followed = static_cast<std::uint32_t>(cols.size());
    score.provenance = Provenance::projected;
    return score;
}

std::vector<double> standardize(const CaModel& model, std::span<const double> raw_dim1) {
    if (!(model.standardize_sd > 0.0)) {
        throw_error(Errc::degenerate_model, "standardize: sd must be positive");
    }
    std::vector<double> out;
    out.reserve(raw_dim1.size());
    for (double v : raw_dim1) out.push_back((v - model.standardize_mean) / model.standardize_sd);
    return out;
}

PartisanCutoffs derive_cutoffs(std::span<const double> dem_scores,
                               std::span<const double> rep_scores) {
    if (dem_scores.size() < 10 || rep_scores.size() < 10) {
        throw_error(Errc::insufficient_data,
                    "derive_cutoffs: need >= 10 scored members per party, got " +
                        std::to_string(dem_scores.size()) + " Dem / " +
                        std::to_string(rep_scores.size()) + " Rep");
    }
    PartisanCutoffs cutoffs;
    cutoffs.dem_max = percentile(std::vector<double>(dem_scores.begin(), dem_scores.end()), 90.0);
    cutoffs.rep_min = percentile(std::vector<double>(rep_scores.begin(), rep_scores.end()), 10.0);
    if (cutoffs.dem_max >= cutoffs.rep_min) {
        throw_error(Errc::calibration,
                    "cutoffs overlap: dem_max=" + fmt_double(cutoffs.dem_max) +
                        " >= rep_min=" + fmt_double(cutoffs.rep_min));
    }
    return cutoffs;
}

Party classify(double theta, const PartisanCutoffs& cutoffs) {
    if (!std::isfinite(theta)) throw_error(Errc::invalid_argument, "classify: non-finite theta");
    if (!(cutoffs.dem_max < cutoffs.rep_min)) {
        throw_error(Errc::calibration, "classify: cutoffs must satisfy dem_max < rep_min");
    }
    if (theta <= cutoffs.dem_max) return Party::dem;
    if (theta >= cutoffs.rep_min) return Party::rep;
    return Party::ind;
}

std::string serialize_ca_model(const CaModel& model) {
    std::string out;
    out += "segiso_ca_model 1\n";
    out += "dims " + std::to_string(model.dims) + "\n";
    out += "dims_requested " + std::to_string(model.dims_requested) + "\n";
    out += "training_rows " + std::to_string(model.n_training_rows) + "\n";
    out += "standardize_mean " + fmt_double(model.standardize_mean) + "\n";
    out += "standardize_sd " + fmt_double(model.standardize_sd) + "\n";
    out += "oriented " + std::string(model.oriented ? "1" : "0") + "\n";
    out += "singular_values";
    for (int d = 0; d < kCaDims; ++d) out += " " + fmt_double(model.singular_values[d]);
    out += "\n";
    out += "elites " + std::to_string(model.elite_ids.size()) + "\n";
    out += "columns elite_id mass std1 std2 std3\n";
    for (std::size_t j = 0; j < model.elite_ids.size(); ++j) {
        out += fmt_i64(model.elite_ids[j]);
        out += " " + fmt_double(model.col_mass[j]);
        for (int d = 0; d < kCaDims; ++d) out += " " + fmt_double(model.col_standard[j][d]);
        out += "\n";
    }
    return out;
}

void save_ca_model(const CaModel& model, const std::filesystem::path& path) {
    atomic_write_file(path, serialize_ca_model(model));
}

CaModel parse_ca_model(std::string_view text, const std::string& path_label) {
    std::istringstream in{std::string(text)};
    std::string token;
    int version = 0;
    in >> token >> version;
    if (token != "segiso_ca_model" || version != 1) {
        throw_error(Errc::schema, path_label + ": not a segiso_ca_model v1 file");
    }
    CaModel model;
    std::size_t n_elites = 0;
    auto expect = [&](std::string_view key) {
        in >> token;
        if (token != key) {
            throw_error(Errc::schema,
                        path_label + ": expected '" + std::string(key) + "', got '" + token + "'");
        }
    };
    expect("dims");
    in >> model.dims;
    expect("dims_requested");
    in >> model.dims_requested;
    expect("training_rows");
    in >> model.n_training_rows;
    expect("standardize_mean");
    in >> model.standardize_mean;
    expect("standardize_sd");
    in >> model.standardize_sd;
    expect("oriented");
    int oriented_flag = 0;
    in >> oriented_flag;
    model.oriented = oriented_flag != 0;
    expect("singular_values");
    for (int d = 0; d < kCaDims; ++d) in >> model.singular_values[d];
    expect("elites");
    in >> n_elites;
    expect("columns");
    std::string rest;
    std::getline(in, rest);  // column names
    model.elite_ids.resize(n_elites);
    model.col_mass.resize(n_elites);
    model.col_standard.assign(n_elites, {});
    model.col_principal.assign(n_elites, {});
    for (std::size_t j = 0; j < n_elites; ++j) {
        in >> model.elite_ids[j] >> model.col_mass[j];
        for (int d = 0; d < kCaDims; ++d) in >> model.col_standard[j][d];
        for (int d = 0; d < model.dims && d < kCaDims; ++d) {
            model.col_principal[j][d] = model.col_standard[j][d] * model.singular_values[d];
        }
    }
    if (!in) throw_error(Errc::schema, path_label + ": truncated model file");
    if (!(model.standardize_sd > 0.0)) {
        throw_error(Errc::schema, path_label + ": standardize_sd must be positive");
    }
    model.rebuild_lookup();
    return model;
}

CaModel load_ca_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_error(Errc::io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ca_model(buf.str(), path.string());
}

}  // namespace segiso
