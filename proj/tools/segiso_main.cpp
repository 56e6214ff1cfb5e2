// segiso: offline/online partisan segregation measurement pipeline.
//
//   segiso synth    --config world.json        generate a synthetic world
//   segiso validate --config pipeline.json     dry-run schema/config checks
//   segiso run      --config pipeline.json     execute the pipeline
//   segiso report   --output out/              summarize a finished run

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "segiso/errors.hpp"
#include "segiso/pipeline.hpp"
#include "segiso/synth_world.hpp"

namespace {

int run_command(const std::string& config_path, const segiso::CliOverrides& overrides) {
    segiso::PipelineConfig config = segiso::pipeline_config_from_json_file(config_path);
    segiso::apply_overrides(config, overrides);
    const segiso::RunReport report = segiso::run(config);
    std::cout << "stages executed:";
    for (const std::string& s : report.stages_executed) std::cout << " " << s;
    std::cout << "\nstages skipped:";
    for (const std::string& s : report.stages_skipped) std::cout << " " << s;
    std::cout << "\nlinked pairs: " << report.linked_pairs
              << "\noffline scores: " << report.offline_scores
              << "\nonline scores: " << report.online_scores
              << "\npanel size: " << report.panel_size << "\n";
    std::cout << segiso::report_summary(config.output_dir);
    return 0;
}

int validate_command(const std::string& config_path) {
    const segiso::PipelineConfig config = segiso::pipeline_config_from_json_file(config_path);
    const segiso::ValidationReport report = segiso::validate(config);
    for (const std::string& w : report.warnings) std::cout << "warning: " << w << "\n";
    for (const std::string& e : report.errors) std::cerr << "error: " << e << "\n";
    std::cout << (report.ok() ? "ok" : "invalid") << "\n";
    return report.ok() ? 0 : 1;
}

int synth_command(const std::string& config_path, std::string out_dir,
                  std::optional<std::uint64_t> seed) {
    segiso::WorldConfig config = segiso::world_config_from_json_file(config_path);
    if (seed) config.seed = *seed;
    if (out_dir.empty()) {
        out_dir = segiso::world_output_dir_from_json_file(config_path);
    }
    const segiso::World world = segiso::generate_world(config);
    segiso::write_world(world, out_dir);
    std::cout << "wrote " << world.voters.size() << " voters, " << world.accounts.size()
              << " accounts, " << world.edges.size() << " edges to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"offline/online partisan segregation measurement pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k_neighbors;
    std::optional<std::size_t> min_scored;

    CLI::App* run_cmd = app.add_subcommand("run", "execute the pipeline");
    run_cmd->add_option("--config", config_path, "pipeline config JSON")->required();
    run_cmd->add_option("--seed", seed, "override config seed");
    run_cmd->add_option("--k", k_neighbors, "override k_neighbors");
    run_cmd->add_option("--min-scored", min_scored, "override min_scored_friends");

    CLI::App* validate_cmd = app.add_subcommand("validate", "dry-run config and schema checks");
    validate_cmd->add_option("--config", config_path, "pipeline config JSON")->required();

    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic world");
    synth_cmd->add_option("--config", config_path, "world config JSON")->required();
    synth_cmd->add_option("--out", output_dir, "output directory (default: config output_dir)");
    synth_cmd->add_option("--seed", seed, "override config seed");

    CLI::App* report_cmd = app.add_subcommand("report", "summarize a finished run");
    report_cmd->add_option("--output", output_dir, "pipeline output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            return run_command(config_path, segiso::CliOverrides{seed, k_neighbors, min_scored});
        }
        if (validate_cmd->parsed()) return validate_command(config_path);
        if (synth_cmd->parsed()) return synth_command(config_path, output_dir, seed);
        if (report_cmd->parsed()) {
            std::cout << segiso::report_summary(output_dir);
            return 0;
        }
    } catch (const segiso::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
