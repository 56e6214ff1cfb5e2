#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "segiso/analysis_stats.hpp"
#include "segiso/errors.hpp"
#include "segiso/offline_isolation.hpp"
#include "segiso/synth_world.hpp"

using namespace segiso;

namespace {

PartisanPosterior registered(Party p) {
    PartisanPosterior out;
    out.source = PosteriorSource::registered;
    if (p == Party::dem) out.p_dem = 1.0;
    if (p == Party::rep) out.p_rep = 1.0;
    if (p == Party::ind) out.p_ind = 1.0;
    return out;
}

PartisanPosterior soft(double dem, double rep) {
    return PartisanPosterior{dem, rep, 1.0 - dem - rep, PosteriorSource::imputed};
}

// Everything the batch op needs, straight from a generated world.
struct WorldFixture {
    World world;
    std::vector<PartisanPosterior> posteriors;
    std::vector<std::size_t> all_partisan_egos;
    std::map<std::string, SpatialIndex> indexes;

    explicit WorldFixture(const WorldConfig& config) : world(generate_world(config)) {
        const ThirdPartyLeanMap leans = ThirdPartyLeanMap::standard();
        PrecinctPriorTable priors;
        for (const PrecinctPriorRow& row : world.precinct_priors) {
            priors.add_precinct(row.precinct_id, row.state, row.share_dem, row.share_rep,
                                row.share_ind);
        }
        priors.finalize();
        DemographicLikelihoodTable table;
        for (const LikelihoodRow& row : world.likelihood_table) {
            table.add_row(row.age_group, row.gender, row.race, row.likelihood);
        }
        const ResolveContext ctx{leans, table, priors, kDefaultAgeBandLowers};
        for (const VoterRecord& v : world.voters) {
            posteriors.push_back(resolve_partisanship(v, ctx, nullptr));
        }
        for (std::size_t i = 0; i < world.voters.size(); ++i) {
            if (discretize(posteriors[i]) != Party::ind) all_partisan_egos.push_back(i);
        }
        std::map<std::string, std::vector<SpatialIndex::Entry>> by_state;
        for (const VoterRecord& v : world.voters) {
            if (v.location) by_state[v.state].push_back({v.id, *v.location});
        }
        for (auto& [state, entries] : by_state) {
            indexes.emplace(state, SpatialIndex::build(std::move(entries), state));
        }
    }
};

// Direct-loop recomputation: no index, no shared helpers.
std::vector<IsolationScore> direct_offline(const WorldFixture& f, std::size_t k,
                                           Variant variant) {
    std::vector<IsolationScore> out;
    for (std::size_t e : f.all_partisan_egos) {
        const VoterRecord& ego = f.world.voters[e];
        const Party ego_party = discretize(f.posteriors[e]);

        struct Cand {
            double dist;
            VoterId id;
            std::size_t row;
        };
        std::vector<Cand> cands;
        for (std::size_t j = 0; j < f.world.voters.size(); ++j) {
            const VoterRecord& other = f.world.voters[j];
            if (other.id == ego.id || other.state != ego.state || !other.location) continue;
            cands.push_back(Cand{haversine_km(*ego.location, *other.location), other.id, j});
        }
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.dist != b.dist) return a.dist < b.dist;
            return a.id < b.id;
        });
        if (cands.size() > k) cands.resize(k);

        double sum = 0.0;
        for (const Cand& c : cands) {
            if (variant == Variant::probabilistic) {
                sum += f.posteriors[c.row].prob(ego_party);
            } else {
                sum += discretize(f.posteriors[c.row]) == ego_party ? 1.0 : 0.0;
            }
        }
        IsolationScore s;
        s.ego_id = ego.id;
        s.value = sum / static_cast<double>(cands.size());
        s.n_used = cands.size();
        s.channel = Channel::offline;
        s.variant = variant;
        out.push_back(s);
    }
    std::sort(out.begin(), out.end(),
              [](const IsolationScore& a, const IsolationScore& b) { return a.ego_id < b.ego_id; });
    return out;
}

}  // namespace

TEST_CASE("probabilistic mean over neighbor posteriors") {
    const std::vector<PartisanPosterior> neighbors{soft(1.0, 0.0), soft(0.5, 0.3),
                                                   soft(0.0, 0.9), soft(0.5, 0.2)};
    const IsolationOutcome out =
        offline_isolation(registered(Party::dem), neighbors, Variant::probabilistic);
    REQUIRE(out.score.has_value());
    CHECK(out.score->value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(out.score->n_used == 4);
    CHECK(out.score->channel == Channel::offline);
}

TEST_CASE("homogeneous registered neighborhood scores 1") {
    const std::vector<PartisanPosterior> neighbors(7, registered(Party::rep));
    const IsolationOutcome out =
        offline_isolation(registered(Party::rep), neighbors, Variant::probabilistic);
    REQUIRE(out.score.has_value());
    CHECK(out.score->value == 1.0);
}

TEST_CASE("independent egos are skipped, empty neighborhoods error") {
    const std::vector<PartisanPosterior> neighbors{registered(Party::dem)};
    const IsolationOutcome out =
        offline_isolation(registered(Party::ind), neighbors, Variant::probabilistic);
    CHECK(!out.score.has_value());
    CHECK(out.skip == SkipReason::ego_independent);

    CHECK_THROWS_AS(offline_isolation(registered(Party::dem), {}, Variant::probabilistic), Error);
}

TEST_CASE("variants agree when every posterior is degenerate") {
    std::vector<PartisanPosterior> neighbors;
    for (int i = 0; i < 9; ++i) {
        neighbors.push_back(registered(i % 3 == 0 ? Party::dem : Party::rep));
    }
    const auto prob = offline_isolation(registered(Party::dem), neighbors, Variant::probabilistic);
    const auto disc = offline_isolation(registered(Party::dem), neighbors, Variant::discrete);
    CHECK(prob.score->value == disc.score->value);
}

TEST_CASE("batch equals direct-loop recomputation on a 1000-voter state") {
    WorldConfig config;
    config.n_voters = 1000;
    config.n_states = 1;
    config.spatial_homophily = 0.5;
    config.registered_rate = 0.7;
    config.seed = 90210;
    const WorldFixture f(config);

    for (Variant variant : {Variant::probabilistic, Variant::discrete}) {
        const OfflineBatchResult got = offline_isolation_batch(
            f.world.voters, f.posteriors, f.all_partisan_egos, f.indexes, 100, variant);
        const std::vector<IsolationScore> want = direct_offline(f, 100, variant);
        REQUIRE(got.scores.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(got.scores[i].ego_id == want[i].ego_id);
            CHECK(got.scores[i].n_used == want[i].n_used);
            CHECK(std::abs(got.scores[i].value - want[i].value) <= 1e-12);
        }
        for (const IsolationScore& s : got.scores) {
            CHECK(s.value >= 0.0);
            CHECK(s.value <= 1.0);
        }
    }
}

TEST_CASE("label swap maps Dem scores onto former Rep scores exactly") {
    WorldConfig config;
    config.n_voters = 600;
    config.n_states = 1;
    config.spatial_homophily = 0.4;
    config.seed = 515;
    WorldFixture f(config);

    const OfflineBatchResult before = offline_isolation_batch(
        f.world.voters, f.posteriors, f.all_partisan_egos, f.indexes, 50, Variant::probabilistic);
    std::map<VoterId, Party> party_before;
    for (std::size_t i = 0; i < f.world.voters.size(); ++i) {
        party_before[f.world.voters[i].id] = discretize(f.posteriors[i]);
    }

    // Swap every posterior's Dem/Rep mass.
    for (PartisanPosterior& p : f.posteriors) std::swap(p.p_dem, p.p_rep);
    const OfflineBatchResult after = offline_isolation_batch(
        f.world.voters, f.posteriors, f.all_partisan_egos, f.indexes, 50, Variant::probabilistic);

    REQUIRE(before.scores.size() == after.scores.size());
    std::multiset<double> dem_before, rep_before, dem_after, rep_after;
    for (const IsolationScore& s : before.scores) {
        (party_before[s.ego_id] == Party::dem ? dem_before : rep_before).insert(s.value);
    }
    for (const IsolationScore& s : after.scores) {
        (party_before[s.ego_id] == Party::dem ? rep_after : dem_after).insert(s.value);
    }
    CHECK(dem_before == rep_after);
    CHECK(rep_before == dem_after);
}

TEST_CASE("small populations use the actual neighbor count") {
    std::vector<VoterRecord> voters;
    std::vector<PartisanPosterior> posteriors;
    for (int i = 0; i < 4; ++i) {
        VoterRecord v;
        v.id = i + 1;
        v.state = "S0";
        v.location = GeoPoint{30.0 + 0.01 * i, -100.0};
        voters.push_back(v);
        posteriors.push_back(registered(i % 2 == 0 ? Party::dem : Party::rep));
    }
    std::map<std::string, SpatialIndex> indexes;
    std::vector<SpatialIndex::Entry> entries;
    for (const VoterRecord& v : voters) entries.push_back({v.id, *v.location});
    indexes.emplace("S0", SpatialIndex::build(entries, "S0"));

    const std::vector<std::size_t> egos{0, 1, 2, 3};
    const OfflineBatchResult result =
        offline_isolation_batch(voters, posteriors, egos, indexes, 100, Variant::probabilistic);
    REQUIRE(result.scores.size() == 4);
    for (const IsolationScore& s : result.scores) CHECK(s.n_used == 3);
    CHECK(result.skips.truncated_k == 4);
}

TEST_CASE("halving k moves per-party medians only slightly") {
    WorldConfig config;
    config.n_voters = 10000;
    config.n_states = 1;
    config.spatial_homophily = 0.6;
    config.seed = 2718;
    const WorldFixture f(config);

    // Sampled egos keep the runtime small; medians are stable under the
    // generator's smooth spatial clusters.
    std::vector<std::size_t> sampled;
    for (std::size_t i = 0; i < f.all_partisan_egos.size(); i += 5) {
        sampled.push_back(f.all_partisan_egos[i]);
    }
    auto medians_at = [&](std::size_t k) {
        const OfflineBatchResult batch = offline_isolation_batch(
            f.world.voters, f.posteriors, sampled, f.indexes, k, Variant::probabilistic);
        std::map<VoterId, Party> party;
        for (std::size_t i = 0; i < f.world.voters.size(); ++i) {
            party[f.world.voters[i].id] = discretize(f.posteriors[i]);
        }
        std::vector<double> dem, rep;
        for (const IsolationScore& s : batch.scores) {
            (party[s.ego_id] == Party::dem ? dem : rep).push_back(s.value);
        }
        return std::pair<double, double>{median(dem), median(rep)};
    };
    const auto [dem_500, rep_500] = medians_at(500);
    const auto [dem_1000, rep_1000] = medians_at(1000);
    CHECK(std::abs(dem_500 - dem_1000) < 0.05);
    CHECK(std::abs(rep_500 - rep_1000) < 0.05);
}

TEST_CASE("egos without coordinates are skipped with a reason") {
    std::vector<VoterRecord> voters(2);
    voters[0].id = 1;
    voters[0].state = "S0";
    voters[1].id = 2;
    voters[1].state = "S0";
    voters[1].location = GeoPoint{30, -100};
    std::vector<PartisanPosterior> posteriors{registered(Party::dem), registered(Party::rep)};
    std::map<std::string, SpatialIndex> indexes;

    const std::vector<std::size_t> egos{0, 1};
    const OfflineBatchResult result =
        offline_isolation_batch(voters, posteriors, egos, indexes, 10, Variant::probabilistic);
    CHECK(result.scores.empty());
    CHECK(result.skips.by_reason.at(SkipReason::no_coordinates) == 1);
    CHECK(result.skips.by_reason.at(SkipReason::not_in_index) == 1);
}
