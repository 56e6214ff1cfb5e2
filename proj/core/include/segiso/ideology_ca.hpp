#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "segiso/types.hpp"

namespace segiso {

// Sparse binary user x elite matrix; rows and columns are pruned so neither
// side has an all-zero line.
struct FollowMatrix {
    std::vector<AccountId> row_ids;                 // ascending
    std::vector<AccountId> col_ids;                 // ascending
    std::vector<std::vector<std::uint32_t>> rows;   // sorted col indices per row
    std::size_t nnz = 0;
};

// user -> sorted unique elite ids actually followed
using EliteFollows = std::map<AccountId, std::vector<AccountId>>;

FollowMatrix build_follow_matrix(const EliteFollows& follows,
                                 std::span<const AccountId> elite_universe);

struct TrainingSelection {
    FollowMatrix matrix;
    std::size_t n_qualifying = 0;
};

// Seeded uniform sample (without replacement) of users following at least
// min_elites of the elite universe, capped at n.
TrainingSelection select_training(const EliteFollows& follows,
                                  std::span<const AccountId> elite_universe,
                                  std::size_t min_elites, std::size_t n, std::uint64_t seed,
                                  std::size_t min_qualifying = 100);

inline constexpr int kCaDims = 3;

enum class Provenance : std::uint8_t { fitted, projected };

constexpr std::string_view provenance_name(Provenance p) {
    return p == Provenance::fitted ? "fitted" : "projected";
}

struct IdeologyScore {
    AccountId account_id{};
    double theta{};                    // standardized dim-1 position
    std::uint32_t n_elites_followed{};
    Provenance provenance = Provenance::projected;
};

// Fitted correspondence-analysis space. Column (elite) coordinates are
// enough to place any new user: a supplementary row's principal coordinate
// is its profile times the standard column coordinates.
struct CaModel {
    int dims_requested = kCaDims;
    int dims = kCaDims;                                  // kept dimensions
    std::vector<AccountId> elite_ids;                    // ascending
    std::vector<std::array<double, kCaDims>> col_standard;
    std::vector<std::array<double, kCaDims>> col_principal;
    std::vector<double> col_mass;
    std::array<double, kCaDims> singular_values{};
    double standardize_mean = 0.0;
    double standardize_sd = 1.0;
    bool oriented = false;  // dim-1 sign fixed by the conservative anchor set
    std::size_t n_training_rows = 0;

    std::optional<std::size_t> col_index(AccountId elite) const;

    void rebuild_lookup();

private:
    std::unordered_map<AccountId, std::size_t> lookup_;
};

struct CaFit {
    CaModel model;
    std::vector<AccountId> row_ids;
    std::vector<std::array<double, kCaDims>> row_principal;
    std::vector<double> theta;  // standardized dim-1, aligned with row_ids
};

// Standard correspondence analysis of the binary follow matrix, truncated
// to `dims` dimensions. Dim-1 is sign-oriented so the conservative anchor
// elites sit on the positive side. Rank below `dims` keeps the available
// dimensions and lowers model.dims.
CaFit fit_ca(const FollowMatrix& matrix, int dims,
             std::span<const AccountId> conservative_anchors);

// Supplementary projection of one user's followed-elite set. Elites outside
// the model are ignored; fewer than min_elites known elites is a skip, not
// an error.
std::optional<IdeologyScore> project(const CaModel& model,
                                     std::span<const AccountId> followed_elites,
                                     std::size_t min_elites = 3);

// Affine transform by the stored training mean/sd.
std::vector<double> standardize(const CaModel& model, std::span<const double> raw_dim1);

struct PartisanCutoffs {
    double dem_max{};
    double rep_min{};
};

// Reference calibration constants selectable via configuration.
inline constexpr PartisanCutoffs kFixedCutoffs{-0.35, 0.04};

// dem_max = 90th percentile of linked Democrats' scores, rep_min = 10th
// percentile of linked Republicans'. Crossed cutoffs are a calibration
// error.
PartisanCutoffs derive_cutoffs(std::span<const double> dem_scores,
                               std::span<const double> rep_scores);

// theta <= dem_max -> Dem, theta >= rep_min -> Rep, else Ind.
Party classify(double theta, const PartisanCutoffs& cutoffs);

void save_ca_model(const CaModel& model, const std::filesystem::path& path);
std::string serialize_ca_model(const CaModel& model);
CaModel load_ca_model(const std::filesystem::path& path);
CaModel parse_ca_model(std::string_view text, const std::string& path_label);

}  // namespace segiso
