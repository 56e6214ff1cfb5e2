#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segiso/types.hpp"

namespace segiso {

struct CaConfig {
    int dims = 3;
    std::size_t training_size = 50000;
    std::size_t min_training_elites = 10;
    std::size_t min_projection_elites = 3;
    std::size_t min_training_users = 100;
};

enum class CutoffMode : std::uint8_t { derive, fixed };

struct CutoffConfig {
    CutoffMode mode = CutoffMode::derive;
    double dem_max = -0.35;
    double rep_min = 0.04;
};

struct BootstrapConfig {
    std::size_t replicates = 1000;
    double level = 0.99;
};

enum class EgoPartySource : std::uint8_t { voter_file, ideology };

// Batch configuration. Defaults are the reference measurement choices:
// 1000 nearest neighbors, probabilistic weighting, 10 scored friends
// minimum, 3-dimensional CA trained on up to 50,000 users following at
// least 10 elites, projection threshold of 3 elites.
struct PipelineConfig {
    struct Inputs {
        std::string voters;
        std::string accounts;
        std::string edges;
        std::string elites;
        std::string precinct_priors;
        std::string likelihood_table;
        std::string state_results;
    } inputs;

    std::string output_dir;
    std::size_t k_neighbors = 1000;
    Variant isolation_variant = Variant::probabilistic;
    std::size_t min_scored_friends = 10;
    CaConfig ca;
    CutoffConfig cutoffs;
    BootstrapConfig bootstrap;
    EgoPartySource ego_party_source = EgoPartySource::voter_file;
    std::vector<int> age_band_lowers{18, 35, 51, 63};
    std::vector<std::string> subgroup_dimensions{"all", "gender", "race", "age", "state_type"};
    double swing_threshold = 0.03;
    std::size_t bins = 500;
    std::vector<double> percentiles{1, 10, 25, 50, 75, 90, 99};
    bool emit_plots = true;
    std::uint64_t seed = 1;
};

// Loads JSON config; relative input/output paths resolve against the config
// file's directory.
PipelineConfig pipeline_config_from_json_file(const std::filesystem::path& path);

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k_neighbors;
    std::optional<std::size_t> min_scored_friends;
};

void apply_overrides(PipelineConfig& config, const CliOverrides& overrides);

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

// Dry-run: config ranges plus full schema validation of every input file.
// Collects rather than throws so callers can report all problems at once.
ValidationReport validate(const PipelineConfig& config);

struct RunReport {
    std::vector<std::string> stages_executed;
    std::vector<std::string> stages_skipped;
    std::uint64_t linked_pairs = 0;
    std::size_t offline_scores = 0;
    std::size_t online_scores = 0;
    std::size_t panel_size = 0;
    std::optional<double> median_offline_dem;
    std::optional<double> median_online_dem;
    std::optional<double> median_offline_rep;
    std::optional<double> median_online_rep;
};

// Executes ingest -> link -> impute -> KNN -> isolation -> ideology ->
// analysis. Stage artifacts are written atomically; a stage is skipped when
// its artifacts exist and the config/input digests match. Identical inputs,
// config, and seed give byte-identical artifacts.
RunReport run(const PipelineConfig& config);

// Renders the on-disk report.json of a finished run as human-readable text.
std::string report_summary(const std::filesystem::path& output_dir);

}  // namespace segiso
