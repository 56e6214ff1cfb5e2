#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "segiso/csv.hpp"
#include "segiso/types.hpp"

namespace segiso {

enum class PosteriorSource : std::uint8_t { registered, third_party_lean, imputed };

constexpr std::string_view posterior_source_name(PosteriorSource s) {
    switch (s) {
        case PosteriorSource::registered: return "registered";
        case PosteriorSource::third_party_lean: return "third_party_lean";
        case PosteriorSource::imputed: return "imputed";
    }
    return "?";
}

// Probability triple over {Dem, Rep, Ind}; sums to 1 within 1e-12.
struct PartisanPosterior {
    double p_dem{};
    double p_rep{};
    double p_ind{};
    PosteriorSource source = PosteriorSource::imputed;

    double prob(Party p) const {
        switch (p) {
            case Party::dem: return p_dem;
            case Party::rep: return p_rep;
            case Party::ind: return p_ind;
        }
        return 0.0;
    }
};

enum class PartyLean : std::uint8_t { dem_lean, rep_lean, unknown };

// Lowercases ASCII, trims, collapses internal whitespace. Shared by the
// third-party vocabulary, demographic keys, and record linkage.
std::string normalize_label(std::string_view text);

// Party-label vocabulary mapping third parties to a left/right leaning.
// Total over any input: unlisted labels are unknown.
class ThirdPartyLeanMap {
public:
    static ThirdPartyLeanMap standard();
    static ThirdPartyLeanMap from_rows(
        std::span<const std::pair<std::string, PartyLean>> rows);

    PartyLean classify(std::string_view party_label) const;

private:
    std::unordered_map<std::string, PartyLean> leans_;
};

PartyLean classify_third_party(std::string_view party_label, const ThirdPartyLeanMap& map);

// Age bands used by the likelihood table and the subgroup splits.
// Lower bounds, first band catches everything below the second bound.
inline const std::vector<int> kDefaultAgeBandLowers{18, 35, 51, 63};
std::string age_band_label(int age, std::span<const int> lowers);

// Pr(X | party) for each demographic cell (age_group, gender, race).
// A wildcard row (*,*,*) acts as the marginal fallback for voters whose
// demographics are missing or unseen.
class DemographicLikelihoodTable {
public:
    struct Lookup {
        std::array<double, 3> likelihood;  // dem, rep, ind
        bool used_fallback = false;
    };

    static DemographicLikelihoodTable from_csv(const CsvTable& table);

    void add_row(std::string_view age_group, std::string_view gender, std::string_view race,
                 const std::array<double, 3>& likelihood);

    // Throws insufficient_data when the cell is absent and no fallback exists.
    Lookup lookup(std::string_view age_group, std::string_view gender,
                  std::string_view race) const;

    bool has_fallback() const { return fallback_.has_value(); }
    std::size_t size() const { return cells_.size(); }

private:
    std::map<std::string, std::array<double, 3>> cells_;
    std::optional<std::array<double, 3>> fallback_;
};

// Precinct vote-share priors, add-epsilon smoothed at load so no class has
// zero prior mass. Missing precincts fall back to the state aggregate.
class PrecinctPriorTable {
public:
    struct Lookup {
        std::array<double, 3> prior;  // dem, rep, ind
        bool used_state_fallback = false;
    };

    static constexpr double kSmoothingEpsilon = 1e-4;

    static PrecinctPriorTable from_csv(const CsvTable& table);

    void add_precinct(std::string_view precinct_id, std::string_view state,
                      double share_dem, double share_rep, std::optional<double> share_ind);
    void finalize();

    // Empty or unknown precinct id resolves through the state fallback, then
    // the global fallback.
    Lookup lookup(std::string_view precinct_id, std::string_view state) const;

    std::size_t size() const { return precincts_.size(); }

private:
    struct Raw {
        std::string state;
        std::array<double, 3> shares;
    };
    std::map<std::string, Raw> precincts_;
    std::map<std::string, std::array<double, 3>> state_fallback_;
    std::array<double, 3> global_fallback_{1.0 / 3, 1.0 / 3, 1.0 / 3};
    bool finalized_ = false;
};

// posterior_c = lik_c * prior_c / sum over classes; source=imputed.
PartisanPosterior impute_posterior(const std::array<double, 3>& likelihood,
                                   const std::array<double, 3>& prior);

struct ResolveStats {
    std::uint64_t registered = 0;
    std::uint64_t third_party_lean = 0;
    std::uint64_t imputed = 0;
    std::uint64_t missing_precinct_fallback = 0;
    std::uint64_t missing_demographics_fallback = 0;
};

struct ResolveContext {
    const ThirdPartyLeanMap& leans;
    const DemographicLikelihoodTable& likelihoods;
    const PrecinctPriorTable& priors;
    std::span<const int> age_band_lowers;
};

// Three-step assignment: registered major party, third-party leaning, then
// Bayesian imputation from demographics and the precinct prior.
PartisanPosterior resolve_partisanship(const VoterRecord& voter, const ResolveContext& ctx,
                                       ResolveStats* stats = nullptr);

// Argmax class; exact ties resolve in the fixed order Dem, Rep, Ind.
Party discretize(const PartisanPosterior& posterior);

// SM-style holdout check: re-impute voters whose party is known and report
// the share recovered by the posterior argmax.
struct HoldoutAccuracy {
    std::size_t n = 0;
    std::size_t correct = 0;
    double accuracy() const { return n == 0 ? 0.0 : static_cast<double>(correct) / n; }
};

HoldoutAccuracy imputation_holdout_accuracy(std::span<const VoterRecord> voters,
                                            const ResolveContext& ctx);

}  // namespace segiso
