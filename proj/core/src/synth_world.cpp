#include "segiso/synth_world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "segiso/csv.hpp"
#include "segiso/errors.hpp"
#include "segiso/rng.hpp"

namespace segiso {

namespace {

using json = nlohmann::json;

constexpr double kPatchHalfWidth = 1.5;  // degrees
constexpr std::array<const char*, 2> kGenders{"female", "male"};
constexpr std::array<const char*, 5> kRaces{"white", "black", "hispanic", "asian", "other"};
constexpr std::array<const char*, 4> kAgeBands{"18-34", "35-50", "51-62", "63+"};
constexpr std::array<std::pair<int, int>, 4> kAgeRanges{{{18, 34}, {35, 50}, {51, 62}, {63, 90}}};

constexpr AccountId kLinkedAccountBase = 2'000'000'000;
constexpr AccountId kNoiseAccountBase = 2'500'000'000;
constexpr AccountId kEliteBase = 3'000'000'000;

struct StatePatch {
    std::string code;
    double lat_center;
    double lon_center;
    double dem_prob;
    double rep_prob;
    double ind_prob;
};

// Party-conditional demographic distributions, interpolated between a
// party-blind baseline and a separated alternative by demo_signal.
struct DemoTables {
    std::array<std::array<double, 4>, 3> age;     // [party][band]
    std::array<std::array<double, 2>, 3> gender;  // [party][f/m]
    std::array<std::array<double, 5>, 3> race;    // [party][race]
};

template <std::size_t N>
std::array<double, N> interp(const std::array<double, N>& neutral,
                             const std::array<double, N>& strong, double s) {
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = (1.0 - s) * neutral[i] + s * strong[i];
    return out;
}

DemoTables make_demo_tables(double signal) {
    const std::array<double, 4> age_neutral{0.28, 0.27, 0.20, 0.25};
    const std::array<double, 2> gender_neutral{0.50, 0.50};
    const std::array<double, 5> race_neutral{0.64, 0.12, 0.14, 0.06, 0.04};

    DemoTables t;
    t.age[0] = interp(age_neutral, {0.42, 0.30, 0.16, 0.12}, signal);
    t.age[1] = interp(age_neutral, {0.16, 0.22, 0.27, 0.35}, signal);
    t.age[2] = interp(age_neutral, {0.30, 0.28, 0.20, 0.22}, signal);
    t.gender[0] = interp(gender_neutral, {0.58, 0.42}, signal);
    t.gender[1] = interp(gender_neutral, {0.45, 0.55}, signal);
    t.gender[2] = interp(gender_neutral, {0.50, 0.50}, signal);
    t.race[0] = interp(race_neutral, {0.48, 0.22, 0.18, 0.08, 0.04}, signal);
    t.race[1] = interp(race_neutral, {0.84, 0.02, 0.08, 0.03, 0.03}, signal);
    t.race[2] = interp(race_neutral, {0.64, 0.10, 0.15, 0.07, 0.04}, signal);
    return t;
}

std::string state_code(std::size_t s) {
    std::ostringstream out;
    out << "S" << (s < 10 ? "0" : "") << s;
    return out.str();
}

std::string pad2(std::size_t v) {
    std::ostringstream out;
    out << (v < 10 ? "0" : "") << v;
    return out.str();
}

void validate_config(const WorldConfig& c) {
    if (c.n_voters == 0) throw_error(Errc::config, "n_voters must be positive");
    if (c.n_states == 0) throw_error(Errc::config, "n_states must be positive");
    if (std::abs(c.p_dem + c.p_rep + c.p_ind - 1.0) > 1e-9) {
        throw_error(Errc::config, "party mix must sum to 1");
    }
    for (double p : {c.p_dem, c.p_rep, c.p_ind, c.registered_rate, c.third_party_rate,
                     c.linkable_rate, c.scoreability, c.demo_signal, c.spatial_homophily}) {
        if (p < 0.0 || p > 1.0) throw_error(Errc::config, "probabilities must be in [0, 1]");
    }
    if (c.follow_homophily < 1.0) {
        throw_error(Errc::config, "follow_homophily must be >= 1");
    }
    if (c.elite_follow_prob <= 0.0 || c.elite_follow_prob > 1.0) {
        throw_error(Errc::config, "elite_follow_prob must be in (0, 1]");
    }
    if (c.precinct_grid == 0 || c.name_pool == 0 || c.n_elites_per_party == 0) {
        throw_error(Errc::config, "grid, name pool, and elite counts must be positive");
    }
}

std::size_t party_slot(Party p) {
    switch (p) {
        case Party::dem: return 0;
        case Party::rep: return 1;
        case Party::ind: return 2;
    }
    return 2;
}

}  // namespace

World generate_world(const WorldConfig& config) {
    validate_config(config);
    World world;
    world.config = config;

    // --- states -----------------------------------------------------------
    std::vector<StatePatch> states(config.n_states);
    {
        Rng rng = Rng::stream(config.seed, "states", 0);
        for (std::size_t s = 0; s < config.n_states; ++s) {
            StatePatch& patch = states[s];
            patch.code = state_code(s);
            patch.lat_center = 24.0 + 7.0 * static_cast<double>(s / 8);
            patch.lon_center = -126.0 + 9.0 * static_cast<double>(s % 8);
            const double lean = (rng.uniform() * 2.0 - 1.0) * config.state_lean_spread;
            double dem = std::max(0.005, config.p_dem + lean);
            double rep = std::max(0.005, config.p_rep - lean);
            double ind = config.p_ind;
            const double total = dem + rep + ind;
            patch.dem_prob = dem / total;
            patch.rep_prob = rep / total;
            patch.ind_prob = ind / total;
        }
    }

    const DemoTables demo = make_demo_tables(config.demo_signal);
    const double offset = config.spatial_homophily * 0.6;
    const std::size_t grid = config.precinct_grid;
    const double cell = 2.0 * kPatchHalfWidth / static_cast<double>(grid);
    const std::size_t city_cols = (grid + 1) / 2;

    // --- voters -----------------------------------------------------------
    struct PrecinctCounts {
        std::array<std::size_t, 3> by_party{};
        std::size_t total = 0;
    };
    std::map<std::string, std::pair<std::string, PrecinctCounts>> precinct_counts;
    std::vector<std::array<std::size_t, 3>> state_party_counts(config.n_states, {0, 0, 0});
    std::vector<Party> true_party(config.n_voters);

    world.voters.resize(config.n_voters);
    {
        Rng rng = Rng::stream(config.seed, "voters", 0);
        const std::size_t per_state = (config.n_voters + config.n_states - 1) / config.n_states;
        for (std::size_t i = 0; i < config.n_voters; ++i) {
            const std::size_t s = std::min(i / per_state, config.n_states - 1);
            const StatePatch& patch = states[s];
            VoterRecord& voter = world.voters[i];
            voter.id = static_cast<VoterId>(i + 1);
            voter.state = patch.code;

            const double u = rng.uniform();
            Party party = Party::ind;
            if (u < patch.dem_prob) {
                party = Party::dem;
            } else if (u < patch.dem_prob + patch.rep_prob) {
                party = Party::rep;
            }
            true_party[i] = party;
            ++state_party_counts[s][party_slot(party)];

            double lat_shift = 0.0;
            double lon_shift = 0.0;
            if (party == Party::dem) {
                lat_shift = -offset;
                lon_shift = -offset;
            } else if (party == Party::rep) {
                lat_shift = offset;
                lon_shift = offset;
            }
            double lat = rng.normal(patch.lat_center + lat_shift, config.cluster_sd_degrees);
            double lon = rng.normal(patch.lon_center + lon_shift, config.cluster_sd_degrees);
            lat = std::clamp(lat, patch.lat_center - kPatchHalfWidth, patch.lat_center + kPatchHalfWidth);
            lon = std::clamp(lon, patch.lon_center - kPatchHalfWidth, patch.lon_center + kPatchHalfWidth);
            voter.location = GeoPoint{lat, lon};

            auto cell_of = [&](double value, double center) {
                const double rel = (value - (center - kPatchHalfWidth)) / cell;
                return std::min(grid - 1, static_cast<std::size_t>(std::max(0.0, rel)));
            };
            const std::size_t row = cell_of(lat, patch.lat_center);
            const std::size_t col = cell_of(lon, patch.lon_center);
            voter.precinct_id = patch.code + "-P" + pad2(row * grid + col);
            voter.city = "C" + std::to_string((row / 2) * city_cols + (col / 2));

            auto& entry = precinct_counts[voter.precinct_id];
            entry.first = patch.code;
            ++entry.second.by_party[party_slot(party)];
            ++entry.second.total;

            const std::size_t slot = party_slot(party);
            const std::size_t band =
                rng.categorical(std::span<const double>(demo.age[slot].data(), 4));
            voter.age = static_cast<int>(kAgeRanges[band].first) +
                        static_cast<int>(rng.below(
                            static_cast<std::uint64_t>(kAgeRanges[band].second - kAgeRanges[band].first + 1)));
            voter.gender = kGenders[rng.categorical(std::span<const double>(demo.gender[slot].data(), 2))];
            voter.race = kRaces[rng.categorical(std::span<const double>(demo.race[slot].data(), 5))];

            voter.first = "fn" + std::to_string(rng.below(config.name_pool));
            voter.last = "ln" + std::to_string(rng.below(config.name_pool));

            if (rng.bernoulli(config.registered_rate)) {
                const bool third = rng.bernoulli(config.third_party_rate);
                if (party == Party::dem) {
                    voter.party_label = third ? "Green" : "Democratic";
                } else if (party == Party::rep) {
                    voter.party_label = third ? "Libertarian" : "Republican";
                } else {
                    voter.party_label = third ? "Declined To State" : "Registered Independent";
                }
            }
        }
    }

    for (const auto& [precinct_id, state_and_counts] : precinct_counts) {
        const auto& [state, counts] = state_and_counts;
        PrecinctPriorRow row;
        row.precinct_id = precinct_id;
        row.state = state;
        row.share_dem = static_cast<double>(counts.by_party[0]) / counts.total;
        row.share_rep = static_cast<double>(counts.by_party[1]) / counts.total;
        row.share_ind = static_cast<double>(counts.by_party[2]) / counts.total;
        world.precinct_priors.push_back(std::move(row));
    }

    for (std::size_t s = 0; s < config.n_states; ++s) {
        const auto& counts = state_party_counts[s];
        const double total = static_cast<double>(counts[0] + counts[1] + counts[2]);
        if (total == 0.0) continue;
        world.state_results.push_back(StateResultRow{
            states[s].code, static_cast<double>(counts[0]) / total,
            static_cast<double>(counts[1]) / total});
    }

    // Likelihood table from the exact sampling distributions.
    for (std::size_t band = 0; band < kAgeBands.size(); ++band) {
        for (std::size_t g = 0; g < kGenders.size(); ++g) {
            for (std::size_t r = 0; r < kRaces.size(); ++r) {
                LikelihoodRow row;
                row.age_group = kAgeBands[band];
                row.gender = kGenders[g];
                row.race = kRaces[r];
                for (std::size_t c = 0; c < 3; ++c) {
                    row.likelihood[c] = demo.age[c][band] * demo.gender[c][g] * demo.race[c][r];
                }
                world.likelihood_table.push_back(std::move(row));
            }
        }
    }

    // --- accounts ---------------------------------------------------------
    struct AccountMeta {
        AccountId id;
        Party party;
        bool scoreable;
        std::optional<VoterId> voter;
        double ideal;
    };
    std::vector<AccountMeta> metas;
    {
        Rng rng = Rng::stream(config.seed, "accounts", 0);
        for (std::size_t i = 0; i < config.n_voters; ++i) {
            if (!rng.bernoulli(config.linkable_rate)) continue;
            const VoterRecord& voter = world.voters[i];
            AccountMeta meta;
            meta.id = kLinkedAccountBase + voter.id;
            meta.party = true_party[i];
            meta.scoreable = rng.bernoulli(config.scoreability);
            meta.voter = voter.id;
            const double center = meta.party == Party::dem ? -1.0
                                  : meta.party == Party::rep ? 1.0
                                                             : 0.0;
            meta.ideal = rng.normal(center, 0.25);
            world.accounts.push_back(SocialAccount{meta.id, voter.first, voter.last, voter.city,
                                                   voter.state});
            metas.push_back(meta);
        }
        const std::size_t n_noise = static_cast<std::size_t>(
            std::llround(config.noise_account_rate * static_cast<double>(metas.size())));
        const std::size_t n_city_blocks = city_cols * city_cols;
        for (std::size_t i = 0; i < n_noise; ++i) {
            AccountMeta meta;
            meta.id = kNoiseAccountBase + static_cast<AccountId>(i + 1);
            const double u = rng.uniform();
            meta.party = u < config.p_dem           ? Party::dem
                         : u < config.p_dem + config.p_rep ? Party::rep
                                                           : Party::ind;
            meta.scoreable = rng.bernoulli(config.scoreability);
            const double center = meta.party == Party::dem ? -1.0
                                  : meta.party == Party::rep ? 1.0
                                                             : 0.0;
            meta.ideal = rng.normal(center, 0.25);
            SocialAccount account;
            account.id = meta.id;
            account.first = "fn" + std::to_string(rng.below(config.name_pool));
            account.last = "ln" + std::to_string(rng.below(config.name_pool));
            account.state = states[rng.below(config.n_states)].code;
            account.city = "C" + std::to_string(rng.below(n_city_blocks));
            world.accounts.push_back(account);
            metas.push_back(meta);
        }
    }

    // --- elites -----------------------------------------------------------
    for (std::size_t e = 0; e < 2 * config.n_elites_per_party; ++e) {
        const bool left = e < config.n_elites_per_party;
        world.elites.emplace_back(kEliteBase + static_cast<AccountId>(e + 1),
                                  left ? "left" : "right");
    }

    // --- follow edges -----------------------------------------------------
    const double q_in = config.elite_follow_prob;
    const double q_out = q_in / config.follow_homophily;
    const double q_mid = 0.5 * (q_in + q_out);
    {
        Rng rng = Rng::stream(config.seed, "elite_edges", 0);
        for (const AccountMeta& meta : metas) {
            if (!meta.scoreable) continue;
            for (std::size_t e = 0; e < world.elites.size(); ++e) {
                const bool left = e < config.n_elites_per_party;
                double p = q_mid;
                if (meta.party == Party::dem) p = left ? q_in : q_out;
                if (meta.party == Party::rep) p = left ? q_out : q_in;
                if (rng.bernoulli(p)) {
                    world.edges.push_back(FollowEdge{meta.id, world.elites[e].first});
                }
            }
        }
    }
    {
        std::array<std::vector<std::size_t>, 3> pools;
        std::vector<std::size_t> pos_in_pool(metas.size());
        for (std::size_t a = 0; a < metas.size(); ++a) {
            auto& pool = pools[party_slot(metas[a].party)];
            pos_in_pool[a] = pool.size();
            pool.push_back(a);
        }
        Rng rng = Rng::stream(config.seed, "friend_edges", 0);
        std::vector<std::size_t> chosen;
        for (std::size_t a = 0; a < metas.size(); ++a) {
            const AccountMeta& ego = metas[a];
            const std::size_t slot = party_slot(ego.party);
            const std::size_t n_in = pools[slot].size() - 1;  // excluding self
            const std::vector<std::size_t>& out_a = pools[(slot + 1) % 3];
            const std::vector<std::size_t>& out_b = pools[(slot + 2) % 3];
            const std::size_t n_out = out_a.size() + out_b.size();
            // P(ingroup draw) follows the in/out probability ratio; for
            // Independent egos every candidate has equal weight.
            double p_ingroup = 0.0;
            if (ego.party == Party::ind) {
                p_ingroup = n_in + n_out > 0
                                ? static_cast<double>(n_in) / static_cast<double>(n_in + n_out)
                                : 0.0;
            } else if (n_in > 0) {
                const double w_in = config.follow_homophily * static_cast<double>(n_in);
                p_ingroup = w_in / (w_in + static_cast<double>(n_out));
            }
            chosen.clear();
            const std::size_t want = std::min(config.friends_per_user, metas.size() - 1);
            std::size_t attempts = 0;
            while (chosen.size() < want && attempts < 30 * config.friends_per_user) {
                ++attempts;
                std::size_t cand;
                if (rng.bernoulli(p_ingroup)) {
                    // Uniform over the ingroup pool minus self.
                    std::size_t u = rng.below(n_in);
                    if (u >= pos_in_pool[a]) ++u;
                    cand = pools[slot][u];
                } else if (n_out > 0) {
                    const std::size_t u = rng.below(n_out);
                    cand = u < out_a.size() ? out_a[u] : out_b[u - out_a.size()];
                } else {
                    break;
                }
                if (std::find(chosen.begin(), chosen.end(), cand) != chosen.end()) continue;
                chosen.push_back(cand);
            }
            std::sort(chosen.begin(), chosen.end());
            for (std::size_t c : chosen) {
                world.edges.push_back(FollowEdge{ego.id, metas[c].id});
            }
        }
    }

    // --- truth ------------------------------------------------------------
    {
        std::map<VoterId, const AccountMeta*> account_of_voter;
        for (const AccountMeta& meta : metas) {
            if (meta.voter) account_of_voter[*meta.voter] = &meta;
        }
        for (std::size_t i = 0; i < config.n_voters; ++i) {
            TruthRow row;
            row.voter_id = world.voters[i].id;
            row.true_party = true_party[i];
            auto it = account_of_voter.find(world.voters[i].id);
            if (it != account_of_voter.end()) {
                row.account_id = it->second->id;
                row.true_ideal = it->second->ideal;
                row.scoreable = it->second->scoreable;
            }
            world.truth.push_back(std::move(row));
        }
        for (const AccountMeta& meta : metas) {
            if (meta.voter) continue;
            TruthRow row;
            row.account_id = meta.id;
            row.true_party = meta.party;
            row.true_ideal = meta.ideal;
            row.scoreable = meta.scoreable;
            world.truth.push_back(std::move(row));
        }
    }

    // Analytic expectations under random mixing.
    if (config.spatial_homophily == 0.0) {
        double dem = 0.0;
        double total = 0.0;
        for (Party p : true_party) {
            if (p == Party::dem) ++dem;
            ++total;
        }
        double rep = 0.0;
        for (Party p : true_party) {
            if (p == Party::rep) ++rep;
        }
        world.expected_offline_isolation_dem = dem / total;
        world.expected_offline_isolation_rep = rep / total;
    }
    if (config.follow_homophily == 1.0 && !metas.empty()) {
        double dem = 0.0;
        double rep = 0.0;
        for (const AccountMeta& meta : metas) {
            if (meta.party == Party::dem) ++dem;
            if (meta.party == Party::rep) ++rep;
        }
        world.expected_online_isolation_dem = dem / static_cast<double>(metas.size());
        world.expected_online_isolation_rep = rep / static_cast<double>(metas.size());
    }

    return world;
}

namespace {

std::string render_voters(const World& world) {
    CsvWriter w({"voter_id", "first", "last", "city", "state", "lat", "lon", "party_label",
                 "age", "gender", "race", "precinct_id"});
    for (const VoterRecord& v : world.voters) {
        w.row(std::vector<std::string>{
            fmt_i64(v.id), v.first, v.last, v.city, v.state,
            v.location ? fmt_double(v.location->lat) : "",
            v.location ? fmt_double(v.location->lon) : "", v.party_label,
            v.age ? fmt_i64(*v.age) : "", v.gender, v.race, v.precinct_id});
    }
    return w.str();
}

std::string render_accounts(const World& world) {
    CsvWriter w({"account_id", "first", "last", "city", "state"});
    for (const SocialAccount& a : world.accounts) {
        w.row(std::vector<std::string>{fmt_i64(a.id), a.first, a.last, a.city, a.state});
    }
    return w.str();
}

std::string render_edges(const World& world) {
    CsvWriter w({"src_account_id", "dst_account_id"});
    for (const FollowEdge& e : world.edges) {
        w.row(std::vector<std::string>{fmt_i64(e.src), fmt_i64(e.dst)});
    }
    return w.str();
}

std::string render_elites(const World& world) {
    CsvWriter w({"account_id", "anchor_side"});
    for (const auto& [id, side] : world.elites) {
        w.row(std::vector<std::string>{fmt_i64(id), side});
    }
    return w.str();
}

std::string render_precincts(const World& world) {
    CsvWriter w({"precinct_id", "state", "share_dem", "share_rep", "share_ind"});
    for (const PrecinctPriorRow& row : world.precinct_priors) {
        w.row(std::vector<std::string>{row.precinct_id, row.state, fmt_double(row.share_dem),
                                       fmt_double(row.share_rep), fmt_double(row.share_ind)});
    }
    return w.str();
}

std::string render_likelihoods(const World& world) {
    CsvWriter w({"age_group", "gender", "race", "p_dem", "p_rep", "p_ind"});
    for (const LikelihoodRow& row : world.likelihood_table) {
        w.row(std::vector<std::string>{row.age_group, row.gender, row.race,
                                       fmt_double(row.likelihood[0]), fmt_double(row.likelihood[1]),
                                       fmt_double(row.likelihood[2])});
    }
    return w.str();
}

std::string render_state_results(const World& world) {
    CsvWriter w({"state", "share_dem", "share_rep"});
    for (const StateResultRow& row : world.state_results) {
        w.row(std::vector<std::string>{row.state, fmt_double(row.share_dem),
                                       fmt_double(row.share_rep)});
    }
    return w.str();
}

std::string render_truth(const World& world) {
    CsvWriter w({"voter_id", "account_id", "true_party", "true_ideal", "scoreable"});
    for (const TruthRow& row : world.truth) {
        w.row(std::vector<std::string>{
            row.voter_id ? fmt_i64(*row.voter_id) : "",
            row.account_id ? fmt_i64(*row.account_id) : "",
            std::string(party_name(row.true_party)),
            row.true_ideal ? fmt_double(*row.true_ideal) : "",
            row.account_id ? (row.scoreable ? "1" : "0") : ""});
    }
    return w.str();
}

json config_to_json(const WorldConfig& c) {
    json j;
    j["n_voters"] = c.n_voters;
    j["n_states"] = c.n_states;
    j["p_dem"] = c.p_dem;
    j["p_rep"] = c.p_rep;
    j["p_ind"] = c.p_ind;
    j["state_lean_spread"] = c.state_lean_spread;
    j["spatial_homophily"] = c.spatial_homophily;
    j["cluster_sd_degrees"] = c.cluster_sd_degrees;
    j["registered_rate"] = c.registered_rate;
    j["third_party_rate"] = c.third_party_rate;
    j["demo_signal"] = c.demo_signal;
    j["precinct_grid"] = c.precinct_grid;
    j["linkable_rate"] = c.linkable_rate;
    j["noise_account_rate"] = c.noise_account_rate;
    j["n_elites_per_party"] = c.n_elites_per_party;
    j["elite_follow_prob"] = c.elite_follow_prob;
    j["follow_homophily"] = c.follow_homophily;
    j["friends_per_user"] = c.friends_per_user;
    j["scoreability"] = c.scoreability;
    j["name_pool"] = c.name_pool;
    j["seed"] = c.seed;
    return j;
}

}  // namespace

void write_world(const World& world, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    atomic_write_file(dir / "voters.csv", render_voters(world));
    atomic_write_file(dir / "accounts.csv", render_accounts(world));
    atomic_write_file(dir / "edges.csv", render_edges(world));
    atomic_write_file(dir / "elites.csv", render_elites(world));
    atomic_write_file(dir / "precinct_priors.csv", render_precincts(world));
    atomic_write_file(dir / "likelihood_table.csv", render_likelihoods(world));
    atomic_write_file(dir / "state_results.csv", render_state_results(world));
    atomic_write_file(dir / "truth.csv", render_truth(world));

    json meta;
    meta["schema_version"] = 1;
    meta["config"] = config_to_json(world.config);
    meta["n_voters"] = world.voters.size();
    meta["n_accounts"] = world.accounts.size();
    meta["n_edges"] = world.edges.size();
    meta["n_elites"] = world.elites.size();
    meta["n_precincts"] = world.precinct_priors.size();
    meta["expected_offline_isolation_dem"] =
        world.expected_offline_isolation_dem ? json(*world.expected_offline_isolation_dem)
                                             : json(nullptr);
    meta["expected_offline_isolation_rep"] =
        world.expected_offline_isolation_rep ? json(*world.expected_offline_isolation_rep)
                                             : json(nullptr);
    meta["expected_online_isolation_dem"] =
        world.expected_online_isolation_dem ? json(*world.expected_online_isolation_dem)
                                            : json(nullptr);
    meta["expected_online_isolation_rep"] =
        world.expected_online_isolation_rep ? json(*world.expected_online_isolation_rep)
                                            : json(nullptr);
    atomic_write_file(dir / "world_meta.json", meta.dump(2) + "\n");
}

std::string world_output_dir_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw_error(Errc::io, "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw_error(Errc::config, path.string() + ": " + e.what());
    }
    if (!j.contains("output_dir")) {
        throw_error(Errc::config,
                    path.string() + ": no output_dir in config and no --out given");
    }
    std::filesystem::path dir(j.at("output_dir").get<std::string>());
    if (dir.is_absolute()) return dir.lexically_normal().string();
    const std::filesystem::path base =
        path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return (base / dir).lexically_normal().string();
}

WorldConfig world_config_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw_error(Errc::io, "cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw_error(Errc::config, path.string() + ": " + e.what());
    }
    WorldConfig c;
    try {
        c.n_voters = j.value("n_voters", c.n_voters);
        c.n_states = j.value("n_states", c.n_states);
        c.p_dem = j.value("p_dem", c.p_dem);
        c.p_rep = j.value("p_rep", c.p_rep);
        c.p_ind = j.value("p_ind", c.p_ind);
        c.state_lean_spread = j.value("state_lean_spread", c.state_lean_spread);
        c.spatial_homophily = j.value("spatial_homophily", c.spatial_homophily);
        c.cluster_sd_degrees = j.value("cluster_sd_degrees", c.cluster_sd_degrees);
        c.registered_rate = j.value("registered_rate", c.registered_rate);
        c.third_party_rate = j.value("third_party_rate", c.third_party_rate);
        c.demo_signal = j.value("demo_signal", c.demo_signal);
        c.precinct_grid = j.value("precinct_grid", c.precinct_grid);
        c.linkable_rate = j.value("linkable_rate", c.linkable_rate);
        c.noise_account_rate = j.value("noise_account_rate", c.noise_account_rate);
        c.n_elites_per_party = j.value("n_elites_per_party", c.n_elites_per_party);
        c.elite_follow_prob = j.value("elite_follow_prob", c.elite_follow_prob);
        c.follow_homophily = j.value("follow_homophily", c.follow_homophily);
        c.friends_per_user = j.value("friends_per_user", c.friends_per_user);
        c.scoreability = j.value("scoreability", c.scoreability);
        c.name_pool = j.value("name_pool", c.name_pool);
        if (!j.contains("seed")) throw_error(Errc::config, path.string() + ": seed is required");
        c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw_error(Errc::config, path.string() + ": " + e.what());
    }
    validate_config(c);
    return c;
}

}  // namespace segiso
