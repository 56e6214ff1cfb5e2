#include "segiso/partisan.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "segiso/errors.hpp"

namespace segiso {

namespace {

std::string demographic_key(std::string_view age_group, std::string_view gender,
                            std::string_view race) {
    std::string key = normalize_label(age_group);
    key.push_back('\x1f');
    key += normalize_label(gender);
    key.push_back('\x1f');
    key += normalize_label(race);
    return key;
}

const char* const kDemLeaning[] = {
    "Democratic", "Green Libertarian", "Constitution", "Green", "Liberal", "Progressive",
    "Working Family Party", "Peace And Freedom", "Socialist", "Socialist Labor", "Rainbow",
    "Bread And Roses", "Worker's Party", "Women's Equality Party", "Social Democrat",
    "Communist", "Independent Democrat",
};

const char* const kRepLeaning[] = {
    "Republican", "Libertarian", "Conservative", "American Independent", "Constitutional",
    "Independent Republican",
};

const char* const kUnknownLeaning[] = {
    "Unknown", "Non-Partisan", "Registered Independent", "Independence", "Other",
    "Natural Law", "Reform", "American", "Peoples", "Declined To State", "Patriot",
    "Consumer", "Mountain",
};

}  // namespace

std::string normalize_label(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

ThirdPartyLeanMap ThirdPartyLeanMap::standard() {
    ThirdPartyLeanMap map;
    for (const char* name : kDemLeaning) map.leans_[normalize_label(name)] = PartyLean::dem_lean;
    for (const char* name : kRepLeaning) map.leans_[normalize_label(name)] = PartyLean::rep_lean;
    for (const char* name : kUnknownLeaning) map.leans_[normalize_label(name)] = PartyLean::unknown;
    return map;
}

ThirdPartyLeanMap ThirdPartyLeanMap::from_rows(
    std::span<const std::pair<std::string, PartyLean>> rows) {
    ThirdPartyLeanMap map;
    for (const auto& [name, lean] : rows) map.leans_[normalize_label(name)] = lean;
    return map;
}

PartyLean ThirdPartyLeanMap::classify(std::string_view party_label) const {
    auto it = leans_.find(normalize_label(party_label));
    return it == leans_.end() ? PartyLean::unknown : it->second;
}

PartyLean classify_third_party(std::string_view party_label, const ThirdPartyLeanMap& map) {
    return map.classify(party_label);
}

std::string age_band_label(int age, std::span<const int> lowers) {
    if (lowers.empty()) throw_error(Errc::config, "age bands must not be empty");
    std::size_t band = 0;
    for (std::size_t i = 0; i < lowers.size(); ++i) {
        if (age >= lowers[i]) band = i;
    }
    if (band + 1 < lowers.size()) {
        return std::to_string(lowers[band]) + "-" + std::to_string(lowers[band + 1] - 1);
    }
    return std::to_string(lowers[band]) + "+";
}

DemographicLikelihoodTable DemographicLikelihoodTable::from_csv(const CsvTable& table) {
    DemographicLikelihoodTable out;
    const std::size_t c_age = table.column("age_group");
    const std::size_t c_gender = table.column("gender");
    const std::size_t c_race = table.column("race");
    const std::size_t c_dem = table.column("p_dem");
    const std::size_t c_rep = table.column("p_rep");
    const std::size_t c_ind = table.column("p_ind");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::array<double, 3> lik{};
        const std::size_t prob_cols[3] = {c_dem, c_rep, c_ind};
        for (int c = 0; c < 3; ++c) {
            FieldRef f{&table, r, prob_cols[c]};
            lik[c] = parse_double_field(f);
            if (!(lik[c] > 0.0) || lik[c] > 1.0) {
                throw_error(Errc::schema, f.location() + ": likelihood must be in (0, 1]");
            }
        }
        out.add_row(table.rows[r][c_age], table.rows[r][c_gender], table.rows[r][c_race], lik);
    }
    if (out.cells_.empty() && !out.fallback_) {
        throw_error(Errc::schema, table.path + ": likelihood table has no rows");
    }
    return out;
}

void DemographicLikelihoodTable::add_row(std::string_view age_group, std::string_view gender,
                                         std::string_view race,
                                         const std::array<double, 3>& likelihood) {
    if (age_group == "*" && gender == "*" && race == "*") {
        fallback_ = likelihood;
        return;
    }
    cells_[demographic_key(age_group, gender, race)] = likelihood;
}

DemographicLikelihoodTable::Lookup DemographicLikelihoodTable::lookup(
    std::string_view age_group, std::string_view gender, std::string_view race) const {
    if (!age_group.empty() && !gender.empty() && !race.empty()) {
        auto it = cells_.find(demographic_key(age_group, gender, race));
        if (it != cells_.end()) return Lookup{it->second, false};
    }
    if (fallback_) return Lookup{*fallback_, true};
    throw_error(Errc::insufficient_data,
                "no likelihood row for (" + std::string(age_group) + ", " + std::string(gender) +
                    ", " + std::string(race) + ") and no fallback row present");
}

PrecinctPriorTable PrecinctPriorTable::from_csv(const CsvTable& table) {
    PrecinctPriorTable out;
    const std::size_t c_precinct = table.column("precinct_id");
    const std::size_t c_state = table.column("state");
    const std::size_t c_dem = table.column("share_dem");
    const std::size_t c_rep = table.column("share_rep");
    const std::size_t c_ind = table.column("share_ind");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const double dem = parse_double_field(FieldRef{&table, r, c_dem});
        const double rep = parse_double_field(FieldRef{&table, r, c_rep});
        std::optional<double> ind;
        if (!table.rows[r][c_ind].empty()) {
            ind = parse_double_field(FieldRef{&table, r, c_ind});
        }
        out.add_precinct(table.rows[r][c_precinct], table.rows[r][c_state], dem, rep, ind);
    }
    out.finalize();
    return out;
}

void PrecinctPriorTable::add_precinct(std::string_view precinct_id, std::string_view state,
                                      double share_dem, double share_rep,
                                      std::optional<double> share_ind) {
    if (finalized_) throw_error(Errc::invalid_argument, "prior table already finalized");
    if (precinct_id.empty()) throw_error(Errc::schema, "precinct_id must not be empty");
    if (share_dem < 0.0 || share_rep < 0.0 || (share_ind && *share_ind < 0.0)) {
        throw_error(Errc::schema, "precinct shares must be non-negative");
    }
    // Missing Ind share is the residual after the two major-party shares.
    double ind = share_ind ? *share_ind : std::max(0.0, 1.0 - share_dem - share_rep);
    auto [it, inserted] =
        precincts_.emplace(std::string(precinct_id),
                           Raw{std::string(state), {share_dem, share_rep, ind}});
    if (!inserted) {
        throw_error(Errc::schema, "duplicate precinct_id '" + std::string(precinct_id) + "'");
    }
}

void PrecinctPriorTable::finalize() {
    if (finalized_) return;
    if (precincts_.empty()) throw_error(Errc::schema, "precinct prior table has no rows");

    for (auto& [id, raw] : precincts_) {
        double total = raw.shares[0] + raw.shares[1] + raw.shares[2];
        std::array<double, 3> smoothed{};
        for (int c = 0; c < 3; ++c) {
            smoothed[c] = (total > 0.0 ? raw.shares[c] / total : 1.0 / 3) + kSmoothingEpsilon;
        }
        const double norm = smoothed[0] + smoothed[1] + smoothed[2];
        for (int c = 0; c < 3; ++c) raw.shares[c] = smoothed[c] / norm;
    }

    // State aggregate = unweighted mean over the state's smoothed priors.
    std::map<std::string, std::pair<std::array<double, 3>, std::size_t>> sums;
    std::array<double, 3> global_sum{};
    for (const auto& [id, raw] : precincts_) {
        auto& [sum, count] = sums[raw.state];
        for (int c = 0; c < 3; ++c) {
            sum[c] += raw.shares[c];
            global_sum[c] += raw.shares[c];
        }
        ++count;
    }
    for (const auto& [state, sum_count] : sums) {
        std::array<double, 3> mean{};
        for (int c = 0; c < 3; ++c) mean[c] = sum_count.first[c] / sum_count.second;
        state_fallback_[state] = mean;
    }
    for (int c = 0; c < 3; ++c) global_fallback_[c] = global_sum[c] / precincts_.size();
    finalized_ = true;
}

PrecinctPriorTable::Lookup PrecinctPriorTable::lookup(std::string_view precinct_id,
                                                      std::string_view state) const {
    if (!finalized_) throw_error(Errc::invalid_argument, "prior table not finalized");
    if (!precinct_id.empty()) {
        auto it = precincts_.find(std::string(precinct_id));
        if (it != precincts_.end()) return Lookup{it->second.shares, false};
    }
    auto it = state_fallback_.find(std::string(state));
    if (it != state_fallback_.end()) return Lookup{it->second, true};
    return Lookup{global_fallback_, true};
}

PartisanPosterior impute_posterior(const std::array<double, 3>& likelihood,
                                   const std::array<double, 3>& prior) {
    std::array<double, 3> numerator{};
    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
        numerator[c] = likelihood[c] * prior[c];
        total += numerator[c];
    }
    if (!(total > 0.0)) {
        throw_error(Errc::degenerate_prior,
                    "all posterior numerators are zero; check table smoothing");
    }
    PartisanPosterior out;
    out.p_dem = numerator[0] / total;
    out.p_rep = numerator[1] / total;
    out.p_ind = numerator[2] / total;
    out.source = PosteriorSource::imputed;
    return out;
}

namespace {

PartisanPosterior degenerate(Party p, PosteriorSource source) {
    PartisanPosterior out;
    out.source = source;
    switch (p) {
        case Party::dem: out.p_dem = 1.0; break;
        case Party::rep: out.p_rep = 1.0; break;
        case Party::ind: out.p_ind = 1.0; break;
    }
    return out;
}

PartisanPosterior impute_for(const VoterRecord& voter, const ResolveContext& ctx,
                             ResolveStats* stats) {
    std::string age_group;
    if (voter.age) age_group = age_band_label(*voter.age, ctx.age_band_lowers);
    const auto lik = ctx.likelihoods.lookup(age_group, voter.gender, voter.race);
    const auto prior = ctx.priors.lookup(voter.precinct_id, voter.state);
    if (stats) {
        ++stats->imputed;
        if (lik.used_fallback) ++stats->missing_demographics_fallback;
        if (prior.used_state_fallback) ++stats->missing_precinct_fallback;
    }
    return impute_posterior(lik.likelihood, prior.prior);
}

}  // namespace

PartisanPosterior resolve_partisanship(const VoterRecord& voter, const ResolveContext& ctx,
                                       ResolveStats* stats) {
    const std::string label = normalize_label(voter.party_label);
    if (label == "democratic" || label == "democrat") {
        if (stats) ++stats->registered;
        return degenerate(Party::dem, PosteriorSource::registered);
    }
    if (label == "republican") {
        if (stats) ++stats->registered;
        return degenerate(Party::rep, PosteriorSource::registered);
    }
    if (!label.empty()) {
        switch (ctx.leans.classify(label)) {
            case PartyLean::dem_lean:
                if (stats) ++stats->third_party_lean;
                return degenerate(Party::dem, PosteriorSource::third_party_lean);
            case PartyLean::rep_lean:
                if (stats) ++stats->third_party_lean;
                return degenerate(Party::rep, PosteriorSource::third_party_lean);
            case PartyLean::unknown:
                break;
        }
    }
    return impute_for(voter, ctx, stats);
}

Party discretize(const PartisanPosterior& posterior) {
    if (posterior.p_dem >= posterior.p_rep && posterior.p_dem >= posterior.p_ind) {
        return Party::dem;
    }
    if (posterior.p_rep >= posterior.p_ind) return Party::rep;
    return Party::ind;
}

HoldoutAccuracy imputation_holdout_accuracy(std::span<const VoterRecord> voters,
                                            const ResolveContext& ctx) {
    HoldoutAccuracy out;
    for (const VoterRecord& voter : voters) {
        const std::string label = normalize_label(voter.party_label);
        Party truth;
        if (label == "democratic" || label == "democrat") {
            truth = Party::dem;
        } else if (label == "republican") {
            truth = Party::rep;
        } else {
            continue;
        }
        VoterRecord masked = voter;
        masked.party_label.clear();
        const PartisanPosterior posterior = resolve_partisanship(masked, ctx, nullptr);
        ++out.n;
        if (discretize(posterior) == truth) ++out.correct;
    }
    return out;
}

}  // namespace segiso
