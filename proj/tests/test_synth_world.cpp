#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "segiso/errors.hpp"
#include "segiso/offline_isolation.hpp"
#include "segiso/synth_world.hpp"

using namespace segiso;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::map<VoterId, Party> true_party_of(const World& world) {
    std::map<VoterId, Party> out;
    for (const TruthRow& row : world.truth) {
        if (row.voter_id) out[*row.voter_id] = row.true_party;
    }
    return out;
}

std::map<AccountId, Party> account_party_of(const World& world) {
    std::map<AccountId, Party> out;
    for (const TruthRow& row : world.truth) {
        if (row.account_id) out[*row.account_id] = row.true_party;
    }
    return out;
}

// Mean per-party offline isolation over true parties with degenerate
// posteriors; exercises the generator's spatial structure directly.
std::map<Party, double> mean_true_isolation(const World& world, std::size_t k) {
    std::map<std::string, std::vector<SpatialIndex::Entry>> by_state;
    for (const VoterRecord& v : world.voters) by_state[v.state].push_back({v.id, *v.location});
    const auto party = true_party_of(world);

    std::map<Party, std::pair<double, std::size_t>> acc;
    for (auto& [state, entries] : by_state) {
        const SpatialIndex index = SpatialIndex::build(entries, state);
        for (const auto& entry : entries) {
            const Party ego = party.at(entry.id);
            if (ego == Party::ind) continue;
            const NeighborList neighbors = index.knn(entry.id, k);
            if (neighbors.neighbors.empty()) continue;
            std::size_t ingroup = 0;
            for (const Neighbor& n : neighbors.neighbors) {
                if (party.at(n.id) == ego) ++ingroup;
            }
            auto& [sum, count] = acc[ego];
            sum += static_cast<double>(ingroup) / neighbors.neighbors.size();
            ++count;
        }
    }
    std::map<Party, double> out;
    for (const auto& [p, sum_count] : acc) out[p] = sum_count.first / sum_count.second;
    return out;
}

}  // namespace

TEST_CASE("same seed gives byte-identical worlds") {
    WorldConfig config;
    config.n_voters = 2000;
    config.n_states = 2;
    config.seed = 777;
    const World a = generate_world(config);
    const World b = generate_world(config);

    namespace fs = std::filesystem;
    const fs::path dir_a = fs::temp_directory_path() / "segiso_world_a";
    const fs::path dir_b = fs::temp_directory_path() / "segiso_world_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    write_world(a, dir_a);
    write_world(b, dir_b);
    for (const char* name :
         {"voters.csv", "accounts.csv", "edges.csv", "elites.csv", "precinct_priors.csv",
          "likelihood_table.csv", "state_results.csv", "truth.csv", "world_meta.json"}) {
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("different seeds give different worlds") {
    WorldConfig config;
    config.n_voters = 500;
    config.n_states = 1;
    config.seed = 1;
    const World a = generate_world(config);
    config.seed = 2;
    const World b = generate_world(config);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.voters.size(); ++i) {
        if (a.voters[i].location->lat != b.voters[i].location->lat) any_difference = true;
    }
    CHECK(any_difference);
}

TEST_CASE("zero spatial homophily: isolation equals party share") {
    WorldConfig config;
    config.n_voters = 10000;
    config.n_states = 1;
    config.spatial_homophily = 0.0;
    config.registered_rate = 1.0;
    config.third_party_rate = 0.0;
    config.seed = 31337;
    const World world = generate_world(config);
    REQUIRE(world.expected_offline_isolation_dem.has_value());

    const auto means = mean_true_isolation(world, 100);
    CHECK(std::abs(means.at(Party::dem) - *world.expected_offline_isolation_dem) < 0.02);
    CHECK(std::abs(means.at(Party::rep) - *world.expected_offline_isolation_rep) < 0.02);
}

TEST_CASE("maximal spatial homophily: interior isolation approaches 1") {
    WorldConfig config;
    config.n_voters = 4000;
    config.n_states = 1;
    config.spatial_homophily = 1.0;
    config.p_dem = 0.5;
    config.p_rep = 0.5;
    config.p_ind = 0.0;
    config.seed = 4242;
    const World world = generate_world(config);
    const auto means = mean_true_isolation(world, 100);
    CHECK(means.at(Party::dem) > 0.97);
    CHECK(means.at(Party::rep) > 0.97);
}

TEST_CASE("uniform follow graph: online ingroup share equals party share") {
    WorldConfig config;
    config.n_voters = 8000;
    config.n_states = 2;
    config.follow_homophily = 1.0;
    config.linkable_rate = 0.5;
    config.friends_per_user = 40;
    config.seed = 555;
    const World world = generate_world(config);
    REQUIRE(world.expected_online_isolation_dem.has_value());

    const auto party = account_party_of(world);
    std::map<Party, std::pair<double, std::size_t>> acc;
    std::map<AccountId, std::pair<std::size_t, std::size_t>> tallies;  // ingroup, total
    for (const FollowEdge& e : world.edges) {
        auto src_it = party.find(e.src);
        auto dst_it = party.find(e.dst);
        if (src_it == party.end() || dst_it == party.end()) continue;  // elite follows
        auto& [ingroup, total] = tallies[e.src];
        ++total;
        if (dst_it->second == src_it->second) ++ingroup;
    }
    for (const auto& [account, tally] : tallies) {
        const Party p = party.at(account);
        if (p == Party::ind || tally.second == 0) continue;
        auto& [sum, count] = acc[p];
        sum += static_cast<double>(tally.first) / tally.second;
        ++count;
    }
    const double dem_mean = acc.at(Party::dem).first / acc.at(Party::dem).second;
    const double rep_mean = acc.at(Party::rep).first / acc.at(Party::rep).second;
    CHECK(std::abs(dem_mean - *world.expected_online_isolation_dem) < 0.02);
    CHECK(std::abs(rep_mean - *world.expected_online_isolation_rep) < 0.02);
}

TEST_CASE("extreme follow homophily: online ingroup share approaches 1") {
    WorldConfig config;
    config.n_voters = 3000;
    config.n_states = 1;
    config.follow_homophily = 100000.0;
    config.p_dem = 0.5;
    config.p_rep = 0.5;
    config.p_ind = 0.0;
    config.linkable_rate = 0.6;
    config.seed = 911;
    const World world = generate_world(config);
    const auto party = account_party_of(world);
    double sum = 0.0;
    std::size_t count = 0;
    std::map<AccountId, std::pair<std::size_t, std::size_t>> tallies;
    for (const FollowEdge& e : world.edges) {
        auto src_it = party.find(e.src);
        auto dst_it = party.find(e.dst);
        if (src_it == party.end() || dst_it == party.end()) continue;
        auto& [ingroup, total] = tallies[e.src];
        ++total;
        if (dst_it->second == src_it->second) ++ingroup;
    }
    for (const auto& [account, tally] : tallies) {
        if (tally.second == 0) continue;
        sum += static_cast<double>(tally.first) / tally.second;
        ++count;
    }
    CHECK(sum / static_cast<double>(count) > 0.99);
}

TEST_CASE("scoreability controls the share of accounts with elite follows") {
    WorldConfig config;
    config.n_voters = 6000;
    config.n_states = 1;
    config.scoreability = 0.7;
    config.linkable_rate = 0.5;
    config.seed = 606;
    const World world = generate_world(config);
    std::size_t scoreable = 0;
    std::size_t total = 0;
    for (const TruthRow& row : world.truth) {
        if (!row.account_id) continue;
        ++total;
        if (row.scoreable) ++scoreable;
    }
    CHECK(std::abs(static_cast<double>(scoreable) / total - 0.7) < 0.03);
}

TEST_CASE("emitted tables are consistent with the roster") {
    WorldConfig config;
    config.n_voters = 1500;
    config.n_states = 2;
    config.seed = 12;
    const World world = generate_world(config);

    // Every voter's precinct exists in the prior table.
    std::map<std::string, const PrecinctPriorRow*> priors;
    for (const PrecinctPriorRow& row : world.precinct_priors) priors[row.precinct_id] = &row;
    for (const VoterRecord& v : world.voters) {
        REQUIRE(priors.count(v.precinct_id) == 1);
        CHECK(priors.at(v.precinct_id)->state == v.state);
    }
    // Likelihood table covers all demographic cells.
    CHECK(world.likelihood_table.size() == 4 * 2 * 5);
    // Realized precinct shares sum to 1.
    for (const PrecinctPriorRow& row : world.precinct_priors) {
        CHECK(std::abs(row.share_dem + row.share_rep + row.share_ind - 1.0) < 1e-9);
    }
    // State results cover every state.
    CHECK(world.state_results.size() == 2);

    // Config validation rejects nonsense.
    WorldConfig bad = config;
    bad.p_dem = 0.9;
    bad.p_rep = 0.9;
    CHECK_THROWS_AS(generate_world(bad), Error);
    WorldConfig bad2 = config;
    bad2.follow_homophily = 0.5;
    CHECK_THROWS_AS(generate_world(bad2), Error);
}
