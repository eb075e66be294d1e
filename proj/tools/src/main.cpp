#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "geovag/assembly/parallel.hpp"
#include "geovag/error.hpp"
#include "geovag/io/config.hpp"
#include "geovag/io/scenario.hpp"

using namespace geovag;

int main(int argc, char** argv) {
    CLI::App app{"VAG simulator for two-phase geothermal flow in fractured porous media"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "run a scenario");
    std::string config_path, output_dir, checkpoint;
    int stage = 0, threads = 1;
    bool dry_run = false;
    sim->add_option("--config", config_path, "scenario file (JSON)")->required()->check(CLI::ExistingFile);
    sim->add_option("--stage", stage, "run stages 1..N; artifacts cover every stage that runs")
        ->check(CLI::PositiveNumber);
    sim->add_option("--threads", threads, "assembly threads, 0 for all cores")->check(CLI::NonNegativeNumber);
    sim->add_option("--output", output_dir, "output directory (overrides the config)");
    sim->add_flag("--dry-run", dry_run, "validate the scenario and print dof counts");
    sim->add_option("--checkpoint-from", checkpoint, "resume from a checkpoint file")->check(CLI::ExistingFile);

    auto* info = app.add_subcommand("mesh-info", "print statistics of a .dfm mesh");
    std::string mesh_path;
    info->add_option("path", mesh_path, ".dfm file")->required()->check(CLI::ExistingFile);

    auto* gen = app.add_subcommand("case41", "write the built-in vertical producer scenario");
    int level = 1;
    std::string gen_dir = ".";
    gen->add_option("--level", level, "refinement level 1..4")->check(CLI::Range(1, 4));
    gen->add_option("--output", gen_dir, "directory for the scenario file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            set_num_threads(threads);
            ScenarioRunner runner(load_config(config_path));
            if (dry_run) {
                runner.describe(std::cout);
                return 0;
            }
            RunOptions opt;
            opt.last_stage = stage;
            opt.output = output_dir;
            if (!checkpoint.empty()) opt.checkpoint_from = checkpoint;
            opt.log = &std::cout;
            runner.run(opt);
        } else if (*info) {
            describe_mesh(load_dfm_mesh(mesh_path), std::cout);
        } else if (*gen) {
            ScenarioConfig cfg = builtin_case41(level);
            std::filesystem::create_directories(gen_dir);
            const auto path = std::filesystem::path(gen_dir) / (cfg.name + ".json");
            std::ofstream(path) << format_config(cfg);
            std::cout << path.string() << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
