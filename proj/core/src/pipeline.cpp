#include "segiso/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "segiso/analysis_stats.hpp"
#include "segiso/csv.hpp"
#include "segiso/digest.hpp"
#include "segiso/errors.hpp"
#include "segiso/geo_knn.hpp"
#include "segiso/ideology_ca.hpp"
#include "segiso/offline_isolation.hpp"
#include "segiso/online_isolation.hpp"
#include "segiso/partisan.hpp"
#include "segiso/record_linkage.hpp"
#include "segiso/svg.hpp"

namespace segiso {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// config <-> json

json config_to_json(const PipelineConfig& c) {
    json j;
    j["inputs"] = {{"voters", c.inputs.voters},
                   {"accounts", c.inputs.accounts},
                   {"edges", c.inputs.edges},
                   {"elites", c.inputs.elites},
                   {"precinct_priors", c.inputs.precinct_priors},
                   {"likelihood_table", c.inputs.likelihood_table},
                   {"state_results", c.inputs.state_results}};
    j["output_dir"] = c.output_dir;
    j["k_neighbors"] = c.k_neighbors;
    j["isolation_variant"] = std::string(variant_name(c.isolation_variant));
    j["min_scored_friends"] = c.min_scored_friends;
    j["ca"] = {{"dims", c.ca.dims},
               {"training_size", c.ca.training_size},
               {"min_training_elites", c.ca.min_training_elites},
               {"min_projection_elites", c.ca.min_projection_elites},
               {"min_training_users", c.ca.min_training_users}};
    j["cutoffs"] = {{"mode", c.cutoffs.mode == CutoffMode::derive ? "derive" : "fixed"},
                    {"dem_max", c.cutoffs.dem_max},
                    {"rep_min", c.cutoffs.rep_min}};
    j["bootstrap"] = {{"replicates", c.bootstrap.replicates}, {"level", c.bootstrap.level}};
    j["ego_party_source"] =
        c.ego_party_source == EgoPartySource::voter_file ? "voter_file" : "ideology";
    j["age_band_lowers"] = c.age_band_lowers;
    j["subgroup_dimensions"] = c.subgroup_dimensions;
    j["swing_threshold"] = c.swing_threshold;
    j["bins"] = c.bins;
    j["percentiles"] = c.percentiles;
    j["emit_plots"] = c.emit_plots;
    j["seed"] = c.seed;
    return j;
}

std::string resolve_path(const fs::path& base, const std::string& p) {
    if (p.empty()) return p;
    fs::path path(p);
    if (path.is_absolute()) return path.lexically_normal().string();
    return (base / path).lexically_normal().string();
}

}  // namespace

PipelineConfig pipeline_config_from_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw_error(Errc::io, "cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw_error(Errc::config, path.string() + ": " + e.what());
    }

    PipelineConfig c;
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    try {
        const json inputs = j.value("inputs", json::object());
        c.inputs.voters = resolve_path(base, inputs.value("voters", ""));
        c.inputs.accounts = resolve_path(base, inputs.value("accounts", ""));
        c.inputs.edges = resolve_path(base, inputs.value("edges", ""));
        c.inputs.elites = resolve_path(base, inputs.value("elites", ""));
        c.inputs.precinct_priors = resolve_path(base, inputs.value("precinct_priors", ""));
        c.inputs.likelihood_table = resolve_path(base, inputs.value("likelihood_table", ""));
        c.inputs.state_results = resolve_path(base, inputs.value("state_results", ""));
        c.output_dir = resolve_path(base, j.value("output_dir", ""));
        c.k_neighbors = j.value("k_neighbors", c.k_neighbors);
        const std::string variant = j.value("isolation_variant", "probabilistic");
        if (variant == "probabilistic") {
            c.isolation_variant = Variant::probabilistic;
        } else if (variant == "discrete") {
            c.isolation_variant = Variant::discrete;
        } else {
            throw_error(Errc::config, "isolation_variant must be probabilistic|discrete");
        }
        c.min_scored_friends = j.value("min_scored_friends", c.min_scored_friends);
        if (j.contains("ca")) {
            const json& ca = j.at("ca");
            c.ca.dims = ca.value("dims", c.ca.dims);
            c.ca.training_size = ca.value("training_size", c.ca.training_size);
            c.ca.min_training_elites = ca.value("min_training_elites", c.ca.min_training_elites);
            c.ca.min_projection_elites =
                ca.value("min_projection_elites", c.ca.min_projection_elites);
            c.ca.min_training_users = ca.value("min_training_users", c.ca.min_training_users);
        }
        if (j.contains("cutoffs")) {
            const json& cut = j.at("cutoffs");
            const std::string mode = cut.value("mode", "derive");
            if (mode == "derive") {
                c.cutoffs.mode = CutoffMode::derive;
            } else if (mode == "fixed") {
                c.cutoffs.mode = CutoffMode::fixed;
            } else {
                throw_error(Errc::config, "cutoffs.mode must be derive|fixed");
            }
            c.cutoffs.dem_max = cut.value("dem_max", c.cutoffs.dem_max);
            c.cutoffs.rep_min = cut.value("rep_min", c.cutoffs.rep_min);
        }
        if (j.contains("bootstrap")) {
            const json& b = j.at("bootstrap");
            c.bootstrap.replicates = b.value("replicates", c.bootstrap.replicates);
            c.bootstrap.level = b.value("level", c.bootstrap.level);
        }
        const std::string ego = j.value("ego_party_source", "voter_file");
        if (ego == "voter_file") {
            c.ego_party_source = EgoPartySource::voter_file;
        } else if (ego == "ideology") {
            c.ego_party_source = EgoPartySource::ideology;
        } else {
            throw_error(Errc::config, "ego_party_source must be voter_file|ideology");
        }
        if (j.contains("age_band_lowers")) {
            c.age_band_lowers = j.at("age_band_lowers").get<std::vector<int>>();
        }
        if (j.contains("subgroup_dimensions")) {
            c.subgroup_dimensions = j.at("subgroup_dimensions").get<std::vector<std::string>>();
        }
        c.swing_threshold = j.value("swing_threshold", c.swing_threshold);
        c.bins = j.value("bins", c.bins);
        if (j.contains("percentiles")) {
            c.percentiles = j.at("percentiles").get<std::vector<double>>();
        }
        c.emit_plots = j.value("emit_plots", c.emit_plots);
        c.seed = j.value("seed", c.seed);
    } catch (const json::exception& e) {
        throw_error(Errc::config, path.string() + ": " + e.what());
    }
    return c;
}

void apply_overrides(PipelineConfig& config, const CliOverrides& overrides) {
    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.k_neighbors) config.k_neighbors = *overrides.k_neighbors;
    if (overrides.min_scored_friends) config.min_scored_friends = *overrides.min_scored_friends;
}

namespace {

// ---------------------------------------------------------------------------
// input parsing

void check_config_ranges(const PipelineConfig& c, std::vector<std::string>* errors) {
    auto fail = [&](const std::string& msg) {
        if (errors) {
            errors->push_back(msg);
        } else {
            throw_error(Errc::config, msg);
        }
    };
    if (c.output_dir.empty()) fail("output_dir is required");
    if (c.k_neighbors < 1) fail("k_neighbors must be >= 1");
    if (c.min_scored_friends < 1) fail("min_scored_friends must be >= 1");
    if (c.ca.dims < 1 || c.ca.dims > kCaDims) fail("ca.dims must be in [1, 3]");
    if (c.ca.training_size < 1) fail("ca.training_size must be >= 1");
    if (c.ca.min_projection_elites < 1) fail("ca.min_projection_elites must be >= 1");
    if (c.cutoffs.mode == CutoffMode::fixed && !(c.cutoffs.dem_max < c.cutoffs.rep_min)) {
        fail("fixed cutoffs require dem_max < rep_min");
    }
    if (c.bootstrap.replicates < 1) fail("bootstrap.replicates must be >= 1");
    if (!(c.bootstrap.level > 0.0 && c.bootstrap.level < 1.0)) {
        fail("bootstrap.level must be in (0, 1)");
    }
    if (c.bins < 1) fail("bins must be >= 1");
    if (c.age_band_lowers.empty()) fail("age_band_lowers must not be empty");
    for (double p : c.percentiles) {
        if (!(p >= 0.0 && p <= 100.0)) fail("percentiles must lie in [0, 100]");
    }
    static const std::set<std::string> known_dims{"all", "gender", "race", "age", "state_type"};
    for (const std::string& d : c.subgroup_dimensions) {
        if (!known_dims.count(d)) fail("unknown subgroup dimension '" + d + "'");
    }
    if (!(c.swing_threshold >= 0.0 && c.swing_threshold <= 1.0)) {
        fail("swing_threshold must be in [0, 1]");
    }
}

std::vector<VoterRecord> parse_voters(const CsvTable& t) {
    const std::size_t c_id = t.column("voter_id");
    const std::size_t c_first = t.column("first");
    const std::size_t c_last = t.column("last");
    const std::size_t c_city = t.column("city");
    const std::size_t c_state = t.column("state");
    const std::size_t c_lat = t.column("lat");
    const std::size_t c_lon = t.column("lon");
    const std::size_t c_party = t.column("party_label");
    const std::size_t c_age = t.column("age");
    const std::size_t c_gender = t.column("gender");
    const std::size_t c_race = t.column("race");
    const std::size_t c_precinct = t.column("precinct_id");
    if (t.rows.empty()) throw_error(Errc::schema, t.path + ": voter roster has no rows");

    std::vector<VoterRecord> out;
    out.reserve(t.rows.size());
    std::unordered_set<VoterId> seen;
    seen.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        VoterRecord v;
        FieldRef id_field{&t, r, c_id};
        v.id = parse_i64_field(id_field);
        if (!seen.insert(v.id).second) {
            throw_error(Errc::schema, id_field.location() + ": duplicate voter_id " +
                                          std::to_string(v.id));
        }
        v.first = t.rows[r][c_first];
        v.last = t.rows[r][c_last];
        v.city = t.rows[r][c_city];
        v.state = t.rows[r][c_state];
        const bool has_lat = !t.rows[r][c_lat].empty();
        const bool has_lon = !t.rows[r][c_lon].empty();
        if (has_lat != has_lon) {
            throw_error(Errc::schema,
                        FieldRef{&t, r, has_lat ? c_lon : c_lat}.location() +
                            ": lat and lon must both be present or both empty");
        }
        if (has_lat) {
            const double lat = parse_double_field(FieldRef{&t, r, c_lat});
            const double lon = parse_double_field(FieldRef{&t, r, c_lon});
            try {
                v.location = make_geo_point(lat, lon);
            } catch (const Error& e) {
                throw_error(Errc::schema,
                            FieldRef{&t, r, c_lat}.location() + ": " + e.what());
            }
        }
        v.party_label = t.rows[r][c_party];
        if (!t.rows[r][c_age].empty()) {
            const std::int64_t age = parse_i64_field(FieldRef{&t, r, c_age});
            if (age < 0 || age > 150) {
                throw_error(Errc::schema,
                            FieldRef{&t, r, c_age}.location() + ": implausible age");
            }
            v.age = static_cast<int>(age);
        }
        v.gender = t.rows[r][c_gender];
        v.race = t.rows[r][c_race];
        v.precinct_id = t.rows[r][c_precinct];
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<SocialAccount> parse_accounts(const CsvTable& t) {
    const std::size_t c_id = t.column("account_id");
    const std::size_t c_first = t.column("first");
    const std::size_t c_last = t.column("last");
    const std::size_t c_city = t.column("city");
    const std::size_t c_state = t.column("state");
    std::vector<SocialAccount> out;
    out.reserve(t.rows.size());
    std::unordered_set<AccountId> seen;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        SocialAccount a;
        FieldRef id_field{&t, r, c_id};
        a.id = parse_i64_field(id_field);
        if (!seen.insert(a.id).second) {
            throw_error(Errc::schema, id_field.location() + ": duplicate account_id " +
                                          std::to_string(a.id));
        }
        a.first = t.rows[r][c_first];
        a.last = t.rows[r][c_last];
        a.city = t.rows[r][c_city];
        a.state = t.rows[r][c_state];
        out.push_back(std::move(a));
    }
    return out;
}

struct ParsedInputs {
    std::vector<VoterRecord> voters;
    std::vector<SocialAccount> accounts;
    std::vector<FollowEdge> edges;
    std::vector<AccountId> elite_ids;        // ascending
    std::vector<AccountId> anchor_right;     // conservative anchor elites
    PrecinctPriorTable priors;
    DemographicLikelihoodTable likelihoods;
    StateResultsTable state_results;
    std::uint64_t edges_self_dropped = 0;
    std::uint64_t edges_unknown_src_dropped = 0;
};

ParsedInputs parse_inputs(const PipelineConfig& cfg) {
    ParsedInputs in;
    in.voters = parse_voters(read_csv(cfg.inputs.voters));
    in.accounts = parse_accounts(read_csv(cfg.inputs.accounts));

    std::unordered_set<AccountId> account_ids;
    account_ids.reserve(in.accounts.size());
    for (const SocialAccount& a : in.accounts) account_ids.insert(a.id);

    {
        const CsvTable t = read_csv(cfg.inputs.elites);
        const std::size_t c_id = t.column("account_id");
        const std::size_t c_side = t.column("anchor_side");
        if (t.rows.empty()) throw_error(Errc::schema, t.path + ": elite roster has no rows");
        std::unordered_set<AccountId> seen;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            FieldRef id_field{&t, r, c_id};
            const AccountId id = parse_i64_field(id_field);
            if (!seen.insert(id).second) {
                throw_error(Errc::schema, id_field.location() + ": duplicate elite id");
            }
            const std::string side = normalize_label(t.rows[r][c_side]);
            if (side != "left" && side != "right") {
                throw_error(Errc::schema, FieldRef{&t, r, c_side}.location() +
                                              ": anchor_side must be left|right");
            }
            in.elite_ids.push_back(id);
            if (side == "right") in.anchor_right.push_back(id);
        }
        std::sort(in.elite_ids.begin(), in.elite_ids.end());
        std::sort(in.anchor_right.begin(), in.anchor_right.end());
    }

    {
        const CsvTable t = read_csv(cfg.inputs.edges);
        const std::size_t c_src = t.column("src_account_id");
        const std::size_t c_dst = t.column("dst_account_id");
        in.edges.reserve(t.rows.size());
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            FollowEdge e;
            e.src = parse_i64_field(FieldRef{&t, r, c_src});
            e.dst = parse_i64_field(FieldRef{&t, r, c_dst});
            if (e.src == e.dst) {
                ++in.edges_self_dropped;
                continue;
            }
            if (!account_ids.count(e.src)) {
                ++in.edges_unknown_src_dropped;
                continue;
            }
            in.edges.push_back(e);
        }
    }

    in.priors = PrecinctPriorTable::from_csv(read_csv(cfg.inputs.precinct_priors));
    in.likelihoods = DemographicLikelihoodTable::from_csv(read_csv(cfg.inputs.likelihood_table));

    {
        const CsvTable t = read_csv(cfg.inputs.state_results);
        const std::size_t c_state = t.column("state");
        const std::size_t c_dem = t.column("share_dem");
        const std::size_t c_rep = t.column("share_rep");
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            in.state_results.add(t.rows[r][c_state], parse_double_field(FieldRef{&t, r, c_dem}),
                                 parse_double_field(FieldRef{&t, r, c_rep}));
        }
    }
    return in;
}

// ---------------------------------------------------------------------------
// stage machinery

class DirLock {
public:
    explicit DirLock(const fs::path& dir) : path_(dir / ".segiso.lock") {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) {
            throw_error(Errc::locked, "output directory is locked by another run: " +
                                          path_.string());
        }
    }
    ~DirLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            ::unlink(path_.c_str());
        }
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    fs::path path_;
    int fd_ = -1;
};

struct StageRunner {
    fs::path out;
    json meta_base;
    RunReport* report;

    std::string meta_string(const std::string& artifact) const {
        json m = meta_base;
        m["artifact"] = artifact;
        return m.dump(2) + "\n";
    }

    bool fresh(std::initializer_list<std::string> artifacts) const {
        for (const std::string& a : artifacts) {
            const fs::path artifact_path = out / a;
            const fs::path meta_path = out / (a + ".meta.json");
            if (!fs::exists(artifact_path) || !fs::exists(meta_path)) return false;
            std::ifstream in(meta_path, std::ios::binary);
            std::ostringstream buf;
            buf << in.rdbuf();
            if (buf.str() != meta_string(a)) return false;
        }
        return true;
    }

    void commit(const std::string& artifact, std::string_view content) const {
        atomic_write_file(out / artifact, content);
        atomic_write_file(out / (artifact + ".meta.json"), meta_string(artifact));
    }

    void mark(const std::string& stage, bool executed) const {
        (executed ? report->stages_executed : report->stages_skipped).push_back(stage);
    }
};

// ---------------------------------------------------------------------------
// artifact render/load helpers

std::string render_linked_pairs(const std::vector<LinkedPair>& pairs) {
    CsvWriter w({"voter_id", "account_id"});
    for (const LinkedPair& p : pairs) {
        w.row(std::vector<std::string>{fmt_i64(p.voter_id), fmt_i64(p.account_id)});
    }
    return w.str();
}

std::vector<LinkedPair> load_linked_pairs(const fs::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t c_voter = t.column("voter_id");
    const std::size_t c_account = t.column("account_id");
    std::vector<LinkedPair> out;
    out.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out.push_back(LinkedPair{parse_i64_field(FieldRef{&t, r, c_voter}),
                                 parse_i64_field(FieldRef{&t, r, c_account})});
    }
    return out;
}

std::string render_posteriors(const std::vector<VoterRecord>& voters,
                              const std::vector<PartisanPosterior>& posteriors) {
    CsvWriter w({"voter_id", "p_dem", "p_rep", "p_ind", "source"});
    for (std::size_t i = 0; i < voters.size(); ++i) {
        const PartisanPosterior& p = posteriors[i];
        w.row(std::vector<std::string>{fmt_i64(voters[i].id), fmt_double(p.p_dem),
                                       fmt_double(p.p_rep), fmt_double(p.p_ind),
                                       std::string(posterior_source_name(p.source))});
    }
    return w.str();
}

PosteriorSource parse_source(std::string_view name) {
    if (name == "registered") return PosteriorSource::registered;
    if (name == "third_party_lean") return PosteriorSource::third_party_lean;
    return PosteriorSource::imputed;
}

std::vector<PartisanPosterior> load_posteriors(
    const fs::path& path, const std::unordered_map<VoterId, std::size_t>& voter_row,
    std::size_t n_voters) {
    const CsvTable t = read_csv(path);
    const std::size_t c_id = t.column("voter_id");
    const std::size_t c_dem = t.column("p_dem");
    const std::size_t c_rep = t.column("p_rep");
    const std::size_t c_ind = t.column("p_ind");
    const std::size_t c_source = t.column("source");
    std::vector<PartisanPosterior> out(n_voters);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const VoterId id = parse_i64_field(FieldRef{&t, r, c_id});
        auto it = voter_row.find(id);
        if (it == voter_row.end()) {
            throw_error(Errc::schema, FieldRef{&t, r, c_id}.location() +
                                          ": posterior for unknown voter " + std::to_string(id));
        }
        PartisanPosterior p;
        p.p_dem = parse_double_field(FieldRef{&t, r, c_dem});
        p.p_rep = parse_double_field(FieldRef{&t, r, c_rep});
        p.p_ind = parse_double_field(FieldRef{&t, r, c_ind});
        p.source = parse_source(t.rows[r][c_source]);
        out[it->second] = p;
    }
    if (t.rows.size() != n_voters) {
        throw_error(Errc::schema, path.string() + ": posterior row count mismatch");
    }
    return out;
}

std::string render_isolation(const std::vector<IsolationScore>& scores, std::size_t k) {
    CsvWriter w({"ego_id", "channel", "variant", "k", "value", "n_used"});
    for (const IsolationScore& s : scores) {
        w.row(std::vector<std::string>{fmt_i64(s.ego_id), std::string(channel_name(s.channel)),
                                       std::string(variant_name(s.variant)),
                                       fmt_i64(static_cast<std::int64_t>(k)),
                                       fmt_double(s.value),
                                       fmt_i64(static_cast<std::int64_t>(s.n_used))});
    }
    return w.str();
}

std::vector<IsolationScore> load_isolation(const fs::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t c_id = t.column("ego_id");
    const std::size_t c_channel = t.column("channel");
    const std::size_t c_variant = t.column("variant");
    const std::size_t c_value = t.column("value");
    const std::size_t c_n = t.column("n_used");
    std::vector<IsolationScore> out;
    out.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        IsolationScore s;
        s.ego_id = parse_i64_field(FieldRef{&t, r, c_id});
        s.channel = t.rows[r][c_channel] == "online" ? Channel::online : Channel::offline;
        s.variant =
            t.rows[r][c_variant] == "discrete" ? Variant::discrete : Variant::probabilistic;
        s.value = parse_double_field(FieldRef{&t, r, c_value});
        s.n_used = static_cast<std::size_t>(parse_i64_field(FieldRef{&t, r, c_n}));
        out.push_back(s);
    }
    return out;
}

std::string render_ideology(const std::vector<IdeologyScore>& scores) {
    CsvWriter w({"account_id", "theta", "n_elites_followed", "provenance"});
    for (const IdeologyScore& s : scores) {
        w.row(std::vector<std::string>{fmt_i64(s.account_id), fmt_double(s.theta),
                                       fmt_i64(s.n_elites_followed),
                                       std::string(provenance_name(s.provenance))});
    }
    return w.str();
}

std::vector<IdeologyScore> load_ideology(const fs::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t c_id = t.column("account_id");
    const std::size_t c_theta = t.column("theta");
    const std::size_t c_n = t.column("n_elites_followed");
    const std::size_t c_prov = t.column("provenance");
    std::vector<IdeologyScore> out;
    out.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        IdeologyScore s;
        s.account_id = parse_i64_field(FieldRef{&t, r, c_id});
        s.theta = parse_double_field(FieldRef{&t, r, c_theta});
        s.n_elites_followed =
            static_cast<std::uint32_t>(parse_i64_field(FieldRef{&t, r, c_n}));
        s.provenance =
            t.rows[r][c_prov] == "fitted" ? Provenance::fitted : Provenance::projected;
        out.push_back(s);
    }
    return out;
}

json skips_to_json(const SkipCounts& skips) {
    json j = json::object();
    for (const auto& [reason, count] : skips.by_reason) {
        j[std::string(skip_reason_name(reason))] = count;
    }
    return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// validate

ValidationReport validate(const PipelineConfig& config) {
    ValidationReport report;
    check_config_ranges(config, &report.errors);

    struct Item {
        const char* name;
        const std::string* path;
    };
    const Item items[] = {
        {"voters", &config.inputs.voters},
        {"accounts", &config.inputs.accounts},
        {"edges", &config.inputs.edges},
        {"elites", &config.inputs.elites},
        {"precinct_priors", &config.inputs.precinct_priors},
        {"likelihood_table", &config.inputs.likelihood_table},
        {"state_results", &config.inputs.state_results},
    };
    bool all_present = true;
    for (const Item& item : items) {
        if (item.path->empty()) {
            report.errors.push_back(std::string("inputs.") + item.name + " is required");
            all_present = false;
        } else if (!fs::exists(*item.path)) {
            report.errors.push_back(std::string("inputs.") + item.name + ": no such file: " +
                                    *item.path);
            all_present = false;
        }
    }
    if (!all_present || !report.errors.empty()) return report;

    try {
        const ParsedInputs in = parse_inputs(config);
        if (in.accounts.empty()) report.warnings.push_back("account roster is empty");
        if (in.edges.empty()) report.warnings.push_back("edge list is empty");
        if (in.state_results.size() == 0) {
            report.warnings.push_back("state results table is empty; state_type splits degrade");
        }
    } catch (const Error& e) {
        report.errors.push_back(e.what());
    }
    return report;
}

// ---------------------------------------------------------------------------
// run

RunReport run(const PipelineConfig& cfg) {
    check_config_ranges(cfg, nullptr);

    RunReport report;
    const fs::path out(cfg.output_dir);
    fs::create_directories(out);
    DirLock lock(out);

    const ParsedInputs in = parse_inputs(cfg);

    // Digest block shared by every artifact's metadata sidecar.
    const json config_json = config_to_json(cfg);
    const std::string config_digest = digest_string(config_json.dump());
    json input_digests;
    input_digests["voters"] = digest_file(cfg.inputs.voters);
    input_digests["accounts"] = digest_file(cfg.inputs.accounts);
    input_digests["edges"] = digest_file(cfg.inputs.edges);
    input_digests["elites"] = digest_file(cfg.inputs.elites);
    input_digests["precinct_priors"] = digest_file(cfg.inputs.precinct_priors);
    input_digests["likelihood_table"] = digest_file(cfg.inputs.likelihood_table);
    input_digests["state_results"] = digest_file(cfg.inputs.state_results);

    StageRunner stage;
    stage.out = out;
    stage.meta_base = {{"schema_version", kSchemaVersion},
                       {"seed", cfg.seed},
                       {"config", config_json},
                       {"config_digest", config_digest},
                       {"input_digests", input_digests}};
    stage.report = &report;

    std::unordered_map<VoterId, std::size_t> voter_row;
    voter_row.reserve(in.voters.size());
    for (std::size_t i = 0; i < in.voters.size(); ++i) voter_row.emplace(in.voters[i].id, i);

    // --- stage: link --------------------------------------------------------
    // Stats always come from the canonical computation; downstream consumes
    // the artifact so any stage can be re-produced externally.
    const LinkResult linked = link(in.voters, in.accounts);
    report.linked_pairs = linked.stats.pairs;
    std::vector<LinkedPair> pairs;
    if (stage.fresh({"linked_pairs.csv"})) {
        pairs = load_linked_pairs(out / "linked_pairs.csv");
        stage.mark("link", false);
    } else {
        stage.commit("linked_pairs.csv", render_linked_pairs(linked.pairs));
        pairs = linked.pairs;
        stage.mark("link", true);
    }

    // --- stage: posteriors (cheap) ------------------------------------------
    const ThirdPartyLeanMap leans = ThirdPartyLeanMap::standard();
    const ResolveContext resolve_ctx{leans, in.likelihoods, in.priors, cfg.age_band_lowers};
    ResolveStats resolve_stats;
    std::vector<PartisanPosterior> posteriors;
    posteriors.reserve(in.voters.size());
    for (const VoterRecord& voter : in.voters) {
        posteriors.push_back(resolve_partisanship(voter, resolve_ctx, &resolve_stats));
    }
    if (stage.fresh({"posteriors.csv"})) {
        posteriors = load_posteriors(out / "posteriors.csv", voter_row, in.voters.size());
        stage.mark("posteriors", false);
    } else {
        stage.commit("posteriors.csv", render_posteriors(in.voters, posteriors));
        stage.mark("posteriors", true);
    }
    const HoldoutAccuracy holdout = imputation_holdout_accuracy(in.voters, resolve_ctx);

    // --- stage: offline isolation -------------------------------------------
    std::vector<std::size_t> ego_rows;
    ego_rows.reserve(pairs.size());
    for (const LinkedPair& pair : pairs) {
        ego_rows.push_back(voter_row.at(pair.voter_id));
    }

    std::vector<IsolationScore> offline_scores;
    SkipCounts offline_skips;
    if (stage.fresh({"offline_isolation.csv"})) {
        offline_scores = load_isolation(out / "offline_isolation.csv");
        // Rebuild skip counts without the KNN pass; same precedence as the
        // batch computation.
        std::map<std::string, std::size_t> state_pop;
        for (const VoterRecord& v : in.voters) {
            if (v.location) ++state_pop[v.state];
        }
        for (std::size_t row : ego_rows) {
            const VoterRecord& ego = in.voters[row];
            if (discretize(posteriors[row]) == Party::ind) {
                offline_skips.add(SkipReason::ego_independent);
            } else if (!ego.location) {
                offline_skips.add(SkipReason::no_coordinates);
            } else if (state_pop[ego.state] <= 1) {
                offline_skips.add(SkipReason::not_in_index);
            } else if (state_pop[ego.state] - 1 < cfg.k_neighbors) {
                ++offline_skips.truncated_k;
            }
        }
        stage.mark("offline", false);
    } else {
        std::map<std::string, std::vector<SpatialIndex::Entry>> state_points;
        for (const VoterRecord& v : in.voters) {
            if (v.location) state_points[v.state].push_back({v.id, *v.location});
        }
        std::map<std::string, SpatialIndex> indexes;
        for (auto& [state, points] : state_points) {
            if (points.size() < 2) continue;  // singleton states have no neighbors
            indexes.emplace(state, SpatialIndex::build(std::move(points), state));
        }
        OfflineBatchResult batch = offline_isolation_batch(
            in.voters, posteriors, ego_rows, indexes, cfg.k_neighbors, cfg.isolation_variant);
        offline_scores = std::move(batch.scores);
        offline_skips = std::move(batch.skips);
        stage.commit("offline_isolation.csv", render_isolation(offline_scores, cfg.k_neighbors));
        stage.mark("offline", true);
    }
    report.offline_scores = offline_scores.size();

    // --- stage: ideology (CA fit + scores) ----------------------------------
    std::set<AccountId> elite_set(in.elite_ids.begin(), in.elite_ids.end());
    EliteFollows elite_follows;
    for (const FollowEdge& e : in.edges) {
        if (elite_set.count(e.dst)) elite_follows[e.src].push_back(e.dst);
    }
    for (auto& [user, elites] : elite_follows) {
        std::sort(elites.begin(), elites.end());
        elites.erase(std::unique(elites.begin(), elites.end()), elites.end());
    }
    std::size_t n_qualifying = 0;
    for (const auto& [user, elites] : elite_follows) {
        if (elites.size() >= cfg.ca.min_training_elites) ++n_qualifying;
    }

    CaModel model;
    std::vector<IdeologyScore> ideology;
    if (stage.fresh({"ca_model.txt", "ideology.csv"})) {
        model = load_ca_model(out / "ca_model.txt");
        ideology = load_ideology(out / "ideology.csv");
        stage.mark("ideology", false);
    } else {
        TrainingSelection training =
            select_training(elite_follows, in.elite_ids, cfg.ca.min_training_elites,
                            cfg.ca.training_size, cfg.seed, cfg.ca.min_training_users);
        CaFit fit = fit_ca(training.matrix, cfg.ca.dims, in.anchor_right);
        model = fit.model;

        std::unordered_map<AccountId, std::size_t> fitted_row;
        for (std::size_t i = 0; i < fit.row_ids.size(); ++i) {
            fitted_row.emplace(fit.row_ids[i], i);
        }
        for (const auto& [user, elites] : elite_follows) {
            auto fit_it = fitted_row.find(user);
            if (fit_it != fitted_row.end()) {
                IdeologyScore s;
                s.account_id = user;
                s.theta = fit.theta[fit_it->second];
                s.n_elites_followed =
                    static_cast<std::uint32_t>(training.matrix.rows[fit_it->second].size());
                s.provenance = Provenance::fitted;
                ideology.push_back(s);
                continue;
            }
            if (auto projected = project(model, elites, cfg.ca.min_projection_elites)) {
                projected->account_id = user;
                ideology.push_back(*projected);
            }
        }
        std::sort(ideology.begin(), ideology.end(),
                  [](const IdeologyScore& a, const IdeologyScore& b) {
                      return a.account_id < b.account_id;
                  });
        stage.commit("ca_model.txt", serialize_ca_model(model));
        stage.commit("ideology.csv", render_ideology(ideology));
        stage.mark("ideology", true);
    }

    std::unordered_map<AccountId, double> theta_of;
    theta_of.reserve(ideology.size());
    for (const IdeologyScore& s : ideology) theta_of.emplace(s.account_id, s.theta);

    // --- stage: online isolation (cheap; always computed) -------------------
    std::unordered_map<AccountId, VoterId> voter_of_account;
    voter_of_account.reserve(pairs.size());
    for (const LinkedPair& pair : pairs) {
        voter_of_account.emplace(pair.account_id, pair.voter_id);
    }

    // Friend tallies per linked ego. Follows toward the elite list are
    // scaling instruments, not friends; everything else the ego follows
    // counts in the denominator whether or not it could be scored.
    // Classification is deferred until the cutoffs are known.
    std::unordered_map<AccountId, std::pair<std::vector<double>, std::size_t>> friends_of;
    for (const FollowEdge& e : in.edges) {
        auto ego_it = voter_of_account.find(e.src);
        if (ego_it == voter_of_account.end()) continue;
        if (elite_set.count(e.dst)) continue;
        auto& [thetas, total] = friends_of[e.src];
        ++total;
        auto theta_it = theta_of.find(e.dst);
        if (theta_it != theta_of.end()) thetas.push_back(theta_it->second);
    }

    const bool online_fresh =
        stage.fresh({"cutoffs.json", "online_isolation.csv", "scored_friends.csv"});

    PartisanCutoffs cutoffs{cfg.cutoffs.dem_max, cfg.cutoffs.rep_min};
    std::size_t n_cut_dem = 0;
    std::size_t n_cut_rep = 0;
    std::vector<IsolationScore> online_scores;
    if (online_fresh) {
        std::ifstream cut_in(out / "cutoffs.json");
        json cut_json;
        cut_in >> cut_json;
        cutoffs.dem_max = cut_json.at("dem_max").get<double>();
        cutoffs.rep_min = cut_json.at("rep_min").get<double>();
        n_cut_dem = cut_json.value("n_linked_dem_scored", std::size_t{0});
        n_cut_rep = cut_json.value("n_linked_rep_scored", std::size_t{0});
        online_scores = load_isolation(out / "online_isolation.csv");
    } else if (cfg.cutoffs.mode == CutoffMode::derive) {
        std::vector<double> dem_scores;
        std::vector<double> rep_scores;
        for (const LinkedPair& pair : pairs) {
            auto theta_it = theta_of.find(pair.account_id);
            if (theta_it == theta_of.end()) continue;
            const Party party = discretize(posteriors[voter_row.at(pair.voter_id)]);
            if (party == Party::dem) dem_scores.push_back(theta_it->second);
            if (party == Party::rep) rep_scores.push_back(theta_it->second);
        }
        n_cut_dem = dem_scores.size();
        n_cut_rep = rep_scores.size();
        cutoffs = derive_cutoffs(dem_scores, rep_scores);
    }

    // Skip accounting and friend fractions run in both paths; scores are
    // computed only when the stage is stale.
    SkipCounts online_skips;
    std::vector<std::array<std::int64_t, 3>> scored_friend_rows;  // ego, n_friends, n_scored
    double fraction_sum = 0.0;
    std::size_t fraction_n = 0;
    std::vector<Party> friend_classes;
    for (const LinkedPair& pair : pairs) {
        Party ego_party;
        if (cfg.ego_party_source == EgoPartySource::voter_file) {
            ego_party = discretize(posteriors[voter_row.at(pair.voter_id)]);
        } else {
            auto theta_it = theta_of.find(pair.account_id);
            if (theta_it == theta_of.end()) {
                online_skips.add(SkipReason::ego_unscored);
                continue;
            }
            ego_party = classify(theta_it->second, cutoffs);
        }

        auto friends_it = friends_of.find(pair.account_id);
        const std::size_t n_friends =
            friends_it == friends_of.end() ? 0 : friends_it->second.second;
        const std::size_t n_scored =
            friends_it == friends_of.end() ? 0 : friends_it->second.first.size();
        scored_friend_rows.push_back({pair.voter_id, static_cast<std::int64_t>(n_friends),
                                      static_cast<std::int64_t>(n_scored)});
        if (auto fraction = scored_friend_fraction(n_scored, n_friends)) {
            fraction_sum += *fraction;
            ++fraction_n;
        }

        if (ego_party == Party::ind) {
            online_skips.add(SkipReason::ego_independent);
            continue;
        }
        if (n_friends == 0) {
            online_skips.add(SkipReason::no_friends);
            continue;
        }
        if (n_scored < cfg.min_scored_friends) {
            online_skips.add(SkipReason::below_min_scored);
            continue;
        }
        if (online_fresh) continue;

        friend_classes.clear();
        for (double theta : friends_it->second.first) {
            friend_classes.push_back(classify(theta, cutoffs));
        }
        IsolationOutcome outcome =
            online_isolation(ego_party, friend_classes, cfg.min_scored_friends);
        if (outcome.score) {
            outcome.score->ego_id = pair.voter_id;
            online_scores.push_back(*outcome.score);
        } else if (outcome.skip) {
            online_skips.add(*outcome.skip);
        }
    }
    std::sort(online_scores.begin(), online_scores.end(),
              [](const IsolationScore& a, const IsolationScore& b) { return a.ego_id < b.ego_id; });
    report.online_scores = online_scores.size();

    if (online_fresh) {
        stage.mark("online", false);
    } else {
        json cut_json;
        cut_json["mode"] = cfg.cutoffs.mode == CutoffMode::derive ? "derive" : "fixed";
        cut_json["dem_max"] = cutoffs.dem_max;
        cut_json["rep_min"] = cutoffs.rep_min;
        cut_json["n_linked_dem_scored"] = n_cut_dem;
        cut_json["n_linked_rep_scored"] = n_cut_rep;

        CsvWriter fractions({"ego_id", "n_friends", "n_scored", "fraction"});
        for (const auto& row : scored_friend_rows) {
            fractions.row(std::vector<std::string>{
                fmt_i64(row[0]), fmt_i64(row[1]), fmt_i64(row[2]),
                row[1] > 0
                    ? fmt_double(static_cast<double>(row[2]) / static_cast<double>(row[1]))
                    : ""});
        }
        stage.commit("cutoffs.json", cut_json.dump(2) + "\n");
        stage.commit("online_isolation.csv",
                     render_isolation(online_scores, cfg.min_scored_friends));
        stage.commit("scored_friends.csv", fractions.str());
        stage.mark("online", true);
    }

    // --- stage: analysis -----------------------------------------------------
    std::unordered_map<VoterId, double> offline_of;
    for (const IsolationScore& s : offline_scores) offline_of.emplace(s.ego_id, s.value);

    std::vector<PanelRow> panel;
    for (const IsolationScore& s : online_scores) {
        auto offline_it = offline_of.find(s.ego_id);
        if (offline_it == offline_of.end()) continue;
        const VoterRecord& voter = in.voters[voter_row.at(s.ego_id)];
        PanelRow row;
        row.voter_id = s.ego_id;
        row.party = discretize(posteriors[voter_row.at(s.ego_id)]);
        row.gender = voter.gender;
        row.race = voter.race;
        row.age = voter.age;
        row.state = voter.state;
        row.offline_value = offline_it->second;
        row.online_value = s.value;
        panel.push_back(std::move(row));
    }
    report.panel_size = panel.size();

    std::vector<double> dem_off, dem_on, rep_off, rep_on;
    for (const PanelRow& row : panel) {
        if (row.party == Party::dem) {
            dem_off.push_back(row.offline_value);
            dem_on.push_back(row.online_value);
        } else if (row.party == Party::rep) {
            rep_off.push_back(row.offline_value);
            rep_on.push_back(row.online_value);
        }
    }
    if (!dem_off.empty()) {
        report.median_offline_dem = median(dem_off);
        report.median_online_dem = median(dem_on);
    }
    if (!rep_off.empty()) {
        report.median_offline_rep = median(rep_off);
        report.median_online_rep = median(rep_on);
    }

    std::vector<std::string> analysis_artifacts{"percentiles.csv", "binned_curve.csv",
                                                "subgroup_diffs.csv"};
    if (cfg.emit_plots) {
        analysis_artifacts.push_back("binned_curve.svg");
        analysis_artifacts.push_back("subgroup_diffs.svg");
    }
    bool analysis_fresh = true;
    for (const std::string& a : analysis_artifacts) {
        if (!stage.fresh({a})) analysis_fresh = false;
    }
    if (analysis_fresh) {
        stage.mark("analysis", false);
    } else {
        CsvWriter pct({"party", "channel", "percentile", "value"});
        struct Group {
            const char* party;
            const char* channel;
            const std::vector<double>* values;
        };
        const Group groups[] = {{"dem", "offline", &dem_off},
                                {"dem", "online", &dem_on},
                                {"rep", "offline", &rep_off},
                                {"rep", "online", &rep_on}};
        for (const Group& g : groups) {
            if (g.values->empty()) continue;
            const PercentileProfile profile = percentile_profile(*g.values, cfg.percentiles);
            for (std::size_t i = 0; i < profile.percentiles.size(); ++i) {
                pct.row(std::vector<std::string>{g.party, g.channel,
                                                 fmt_double(profile.percentiles[i]),
                                                 fmt_double(profile.values[i])});
            }
        }
        stage.commit("percentiles.csv", pct.str());

        CsvWriter curve({"group", "bin", "x_lo", "x_hi", "mean_online", "count"});
        std::vector<SvgPoint> scatter;
        auto emit_curve = [&](const char* group, const std::vector<double>& x,
                              const std::vector<double>& y, const char* color) {
            if (x.empty()) return;
            std::size_t bins = cfg.bins;
            const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
            if (!(*hi > *lo)) return;  // degenerate range: no curve rows
            const BinnedCurve c = binned_means(x, y, bins);
            for (std::size_t b = 0; b < c.count.size(); ++b) {
                curve.row(std::vector<std::string>{
                    group, fmt_i64(static_cast<std::int64_t>(b)), fmt_double(c.edges[b]),
                    fmt_double(c.edges[b + 1]),
                    c.count[b] > 0 ? fmt_double(c.mean_y[b]) : "",
                    fmt_i64(static_cast<std::int64_t>(c.count[b]))});
                if (c.count[b] > 0) {
                    scatter.push_back(SvgPoint{(c.edges[b] + c.edges[b + 1]) / 2.0, c.mean_y[b],
                                               color});
                }
            }
        };
        std::vector<double> all_off, all_on;
        for (const PanelRow& row : panel) {
            all_off.push_back(row.offline_value);
            all_on.push_back(row.online_value);
        }
        emit_curve("all", all_off, all_on, "#444444");
        emit_curve("dem", dem_off, dem_on, "#2166ac");
        emit_curve("rep", rep_off, rep_on, "#b2182b");
        stage.commit("binned_curve.csv", curve.str());

        SubgroupConfig sub_cfg;
        sub_cfg.dimensions = cfg.subgroup_dimensions;
        sub_cfg.age_band_lowers = cfg.age_band_lowers;
        sub_cfg.swing_threshold = cfg.swing_threshold;
        sub_cfg.replicates = cfg.bootstrap.replicates;
        sub_cfg.level = cfg.bootstrap.level;
        sub_cfg.seed = cfg.seed;
        const std::vector<SubgroupDiff> diffs = subgroup_split(panel, sub_cfg, in.state_results);
        CsvWriter sub({"party", "dimension", "level", "n", "median_diff", "ci_low", "ci_high"});
        std::vector<SvgInterval> intervals;
        for (const SubgroupDiff& d : diffs) {
            sub.row(std::vector<std::string>{d.party, d.dimension, d.level,
                                             fmt_i64(static_cast<std::int64_t>(d.n)),
                                             fmt_double(d.median_diff), fmt_double(d.ci_low),
                                             fmt_double(d.ci_high)});
            intervals.push_back(SvgInterval{d.party + " " + d.dimension + "=" + d.level,
                                            d.median_diff, d.ci_low, d.ci_high,
                                            d.party == "dem" ? "#2166ac" : "#b2182b"});
        }
        stage.commit("subgroup_diffs.csv", sub.str());

        if (cfg.emit_plots) {
            stage.commit("binned_curve.svg",
                         svg_scatter(scatter, "Online vs offline isolation (binned means)",
                                     "offline isolation", "mean online isolation"));
            stage.commit("subgroup_diffs.svg",
                         svg_intervals(intervals, "Median offline - online by subgroup",
                                       "median paired difference"));
        }
        stage.mark("analysis", true);
    }

    // --- report.json ----------------------------------------------------------
    json rj;
    rj["schema_version"] = kSchemaVersion;
    rj["config"] = config_json;
    rj["config_digest"] = config_digest;
    rj["input_digests"] = input_digests;
    rj["link"] = {{"voters_total", linked.stats.voters_total},
                  {"accounts_total", linked.stats.accounts_total},
                  {"voters_missing_key_fields", linked.stats.voters_missing_key_fields},
                  {"accounts_missing_key_fields", linked.stats.accounts_missing_key_fields},
                  {"voters_dropped_duplicate_key", linked.stats.voters_dropped_duplicate_key},
                  {"accounts_dropped_duplicate_key", linked.stats.accounts_dropped_duplicate_key},
                  {"pairs", linked.stats.pairs}};
    rj["partisanship"] = {{"registered", resolve_stats.registered},
                          {"third_party_lean", resolve_stats.third_party_lean},
                          {"imputed", resolve_stats.imputed},
                          {"missing_precinct_fallback", resolve_stats.missing_precinct_fallback},
                          {"missing_demographics_fallback",
                           resolve_stats.missing_demographics_fallback},
                          {"holdout_n", holdout.n},
                          {"holdout_accuracy", holdout.accuracy()}};
    rj["edges"] = {{"kept", in.edges.size()},
                   {"self_dropped", in.edges_self_dropped},
                   {"unknown_src_dropped", in.edges_unknown_src_dropped}};
    rj["offline"] = {{"k_neighbors", cfg.k_neighbors},
                     {"variant", std::string(variant_name(cfg.isolation_variant))},
                     {"scores", offline_scores.size()},
                     {"skips", skips_to_json(offline_skips)},
                     {"truncated_k", offline_skips.truncated_k}};
    rj["ideology"] = {{"qualifying_users", n_qualifying},
                      {"training_rows", model.n_training_rows},
                      {"elites_kept", model.elite_ids.size()},
                      {"dims_kept", model.dims},
                      {"singular_values",
                       std::vector<double>{model.singular_values[0], model.singular_values[1],
                                           model.singular_values[2]}},
                      {"oriented", model.oriented},
                      {"scored_accounts", ideology.size()}};
    rj["cutoffs"] = {{"mode", cfg.cutoffs.mode == CutoffMode::derive ? "derive" : "fixed"},
                     {"dem_max", cutoffs.dem_max},
                     {"rep_min", cutoffs.rep_min},
                     {"n_linked_dem_scored", n_cut_dem},
                     {"n_linked_rep_scored", n_cut_rep}};
    rj["online"] = {{"min_scored_friends", cfg.min_scored_friends},
                    {"scores", online_scores.size()},
                    {"skips", skips_to_json(online_skips)},
                    {"scored_friend_fraction_mean",
                     fraction_n > 0 ? json(fraction_sum / static_cast<double>(fraction_n))
                                    : json(nullptr)}};
    json medians;
    medians["offline_dem"] = report.median_offline_dem ? json(*report.median_offline_dem)
                                                       : json(nullptr);
    medians["online_dem"] =
        report.median_online_dem ? json(*report.median_online_dem) : json(nullptr);
    medians["offline_rep"] = report.median_offline_rep ? json(*report.median_offline_rep)
                                                       : json(nullptr);
    medians["online_rep"] =
        report.median_online_rep ? json(*report.median_online_rep) : json(nullptr);
    rj["panel"] = {{"size", panel.size()}, {"medians", medians}};
    json artifact_digests;
    for (const char* artifact :
         {"linked_pairs.csv", "posteriors.csv", "offline_isolation.csv", "ca_model.txt",
          "ideology.csv", "cutoffs.json", "online_isolation.csv", "scored_friends.csv",
          "percentiles.csv", "binned_curve.csv", "subgroup_diffs.csv"}) {
        const fs::path path = out / artifact;
        if (fs::exists(path)) artifact_digests[artifact] = digest_file(path);
    }
    rj["artifacts"] = artifact_digests;
    atomic_write_file(out / "report.json", rj.dump(2) + "\n");

    return report;
}

std::string report_summary(const fs::path& output_dir) {
    const fs::path path = output_dir / "report.json";
    std::ifstream in(path);
    if (!in) throw_error(Errc::io, "no report.json under " + output_dir.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw_error(Errc::schema, path.string() + ": " + e.what());
    }

    std::ostringstream out;
    out << "pipeline report (" << path.string() << ")\n";
    const json& link = j.at("link");
    out << "  linked pairs: " << link.at("pairs").get<std::uint64_t>() << " of "
        << link.at("voters_total").get<std::uint64_t>() << " voters / "
        << link.at("accounts_total").get<std::uint64_t>() << " accounts\n";
    out << "  dropped duplicate keys: voters "
        << link.at("voters_dropped_duplicate_key").get<std::uint64_t>() << ", accounts "
        << link.at("accounts_dropped_duplicate_key").get<std::uint64_t>() << "\n";
    const json& partisanship = j.at("partisanship");
    out << "  partisanship: registered " << partisanship.at("registered").get<std::uint64_t>()
        << ", third-party lean " << partisanship.at("third_party_lean").get<std::uint64_t>()
        << ", imputed " << partisanship.at("imputed").get<std::uint64_t>() << "\n";
    out << "  holdout accuracy: " << partisanship.at("holdout_accuracy").get<double>() << " over "
        << partisanship.at("holdout_n").get<std::uint64_t>() << " registered voters\n";
    const json& offline = j.at("offline");
    out << "  offline scores: " << offline.at("scores").get<std::uint64_t>()
        << " (k=" << offline.at("k_neighbors").get<std::uint64_t>() << ", "
        << offline.at("variant").get<std::string>() << ")\n";
    const json& online = j.at("online");
    out << "  online scores: " << online.at("scores").get<std::uint64_t>()
        << " (min scored friends " << online.at("min_scored_friends").get<std::uint64_t>()
        << ")\n";
    const json& cutoffs = j.at("cutoffs");
    out << "  cutoffs (" << cutoffs.at("mode").get<std::string>()
        << "): dem_max=" << cutoffs.at("dem_max").get<double>()
        << " rep_min=" << cutoffs.at("rep_min").get<double>() << "\n";
    const json& medians = j.at("panel").at("medians");
    auto show = [&](const char* key) {
        return medians.at(key).is_null() ? std::string("n/a")
                                         : fmt_double(medians.at(key).get<double>());
    };
    out << "  panel size: " << j.at("panel").at("size").get<std::uint64_t>() << "\n";
    out << "  medians: dem offline " << show("offline_dem") << " online " << show("online_dem")
        << "; rep offline " << show("offline_rep") << " online " << show("online_rep") << "\n";
    return out.str();
}

}  // namespace segiso
