#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "segiso/types.hpp"

namespace segiso {

// Knobs for the synthetic population and follow graph. Everything is
// deterministic under the seed; the truth sidecar carries ground-truth
// parties and ideal points so tests never re-derive them from the pipeline
// under test.
struct WorldConfig {
    std::size_t n_voters = 10000;
    std::size_t n_states = 4;

    // Probability of each true party; must sum to 1 within 1e-9.
    double p_dem = 0.48;
    double p_rep = 0.42;
    double p_ind = 0.10;

    // Per-state shift of the Dem/Rep balance, uniform in [-spread, spread].
    double state_lean_spread = 0.0;

    // 0 = party-blind placement (random mixing), 1 = fully separated
    // clusters.
    double spatial_homophily = 0.6;
    double cluster_sd_degrees = 0.22;

    // Share of voters carrying a party label; of those, share registered to
    // a leaning third party instead of the major-party label.
    double registered_rate = 0.75;
    double third_party_rate = 0.04;

    // Interpolates demographic signal between party-blind (0) and strongly
    // separated (1) conditional distributions.
    double demo_signal = 0.85;

    std::size_t precinct_grid = 6;  // per-state grid of precincts

    // Online side.
    double linkable_rate = 0.25;       // voters mirrored by an account
    double noise_account_rate = 0.15;  // extra accounts relative to linkable
    std::size_t n_elites_per_party = 40;
    double elite_follow_prob = 0.35;   // q_in; q_out = q_in / follow_homophily
    double follow_homophily = 4.0;
    std::size_t friends_per_user = 30;
    double scoreability = 0.9;         // share of accounts that follow elites at all

    std::size_t name_pool = 400;
    std::uint64_t seed = 1;
};

struct TruthRow {
    std::optional<VoterId> voter_id;
    std::optional<AccountId> account_id;
    Party true_party = Party::ind;
    std::optional<double> true_ideal;
    bool scoreable = false;
};

struct PrecinctPriorRow {
    std::string precinct_id;
    std::string state;
    double share_dem{};
    double share_rep{};
    double share_ind{};
};

struct LikelihoodRow {
    std::string age_group;
    std::string gender;
    std::string race;
    std::array<double, 3> likelihood{};  // dem, rep, ind
};

struct StateResultRow {
    std::string state;
    double share_dem{};
    double share_rep{};
};

struct World {
    WorldConfig config;
    std::vector<VoterRecord> voters;
    std::vector<SocialAccount> accounts;
    std::vector<FollowEdge> edges;                   // account->elite and account->account
    std::vector<std::pair<AccountId, std::string>> elites;  // id, anchor side ("left"/"right")
    std::vector<PrecinctPriorRow> precinct_priors;
    std::vector<LikelihoodRow> likelihood_table;
    std::vector<StateResultRow> state_results;
    std::vector<TruthRow> truth;

    // Analytic expectations, defined only in the random-mixing cases.
    std::optional<double> expected_offline_isolation_dem;
    std::optional<double> expected_offline_isolation_rep;
    std::optional<double> expected_online_isolation_dem;
    std::optional<double> expected_online_isolation_rep;
};

World generate_world(const WorldConfig& config);

// Writes voters.csv, accounts.csv, edges.csv, elites.csv,
// precinct_priors.csv, likelihood_table.csv, state_results.csv, truth.csv
// and world_meta.json into dir. Emitted files are byte-identical across
// runs with the same config.
void write_world(const World& world, const std::filesystem::path& dir);

WorldConfig world_config_from_json_file(const std::filesystem::path& path);

// Optional "output_dir" key of a world config file, resolved against the
// config's directory; errors when absent.
std::string world_output_dir_from_json_file(const std::filesystem::path& path);

}  // namespace segiso
