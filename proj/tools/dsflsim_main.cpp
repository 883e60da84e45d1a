#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "dsflsim/config.hpp"
#include "dsflsim/experiments.hpp"
#include "dsflsim/synth.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::string data_dir;
    std::vector<std::uint64_t> seeds;
};

void add_common(CLI::App* sub, CommonArgs& args, bool with_data = false) {
    sub->add_option("--config", args.config_path, "configuration file (key = value)");
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--seeds", args.seeds, "seed list")->delimiter(',');
    sub->add_option("--seed", args.seeds, "single seed (may repeat)");
    if (with_data)
        sub->add_option("--data-dir", args.data_dir,
                        "IDX dataset directory (or DSFLSIM_DATA_DIR)");
}

dsfl::ExperimentSpec build_spec(const CommonArgs& args, dsfl::ExperimentKind kind) {
    dsfl::ExperimentSpec spec;
    if (!args.config_path.empty()) spec = dsfl::parse_config(args.config_path);
    spec.kind = kind;
    if (!args.seeds.empty()) spec.seeds = args.seeds;
    if (!args.data_dir.empty()) {
        spec.data_dir = args.data_dir;
    } else if (spec.data_dir.empty()) {
        if (const char* env = std::getenv("DSFLSIM_DATA_DIR")) spec.data_dir = env;
    }
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dsflsim: wireless DSFL resource-allocation and training simulator"};
    app.require_subcommand(1);

    CommonArgs scenario_args, optimize_args, surface_args, compare_args, train_args;

    CLI::App* cmd_scenario =
        app.add_subcommand("scenario", "generate a scenario and write its snapshot");
    add_common(cmd_scenario, scenario_args);

    CLI::App* cmd_optimize =
        app.add_subcommand("optimize", "run one joint BSUM optimization");
    add_common(cmd_optimize, optimize_args);

    CLI::App* cmd_surface = app.add_subcommand(
        "cost-surface", "tabulate device cost over a (theta, SINR) grid");
    add_common(cmd_surface, surface_args);

    CLI::App* cmd_compare = app.add_subcommand(
        "solver-compare", "compare BSUM against the random baselines over seeds");
    add_common(cmd_compare, compare_args);

    CLI::App* cmd_train = app.add_subcommand(
        "train-curves", "train DSFL/SFL and record accuracy per round");
    add_common(cmd_train, train_args, /*with_data=*/true);

    CLI::App* cmd_make = app.add_subcommand(
        "make-dataset", "write a deterministic synthetic IDX dataset");
    std::string make_out = "data";
    std::uint64_t make_seed = 42;
    int make_train = 60000, make_test = 10000;
    double make_noise = 0.25;
    cmd_make->add_option("--out", make_out, "output directory for the IDX files");
    cmd_make->add_option("--seed", make_seed, "generator seed");
    cmd_make->add_option("--train-count", make_train, "training sample count");
    cmd_make->add_option("--test-count", make_test, "test sample count");
    cmd_make->add_option("--noise", make_noise, "pixel noise sigma");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_scenario->parsed()) {
            const auto spec = build_spec(scenario_args, dsfl::ExperimentKind::custom);
            const std::string path =
                dsfl::run_scenario_snapshot(spec, scenario_args.out_dir);
            std::cout << "scenario snapshot written to " << path << "\n";
        } else if (cmd_optimize->parsed()) {
            const auto spec = build_spec(optimize_args, dsfl::ExperimentKind::custom);
            const dsfl::SolveResult res = dsfl::run_optimize(spec, optimize_args.out_dir);
            const auto costs = res.trace.cycle_costs();
            std::cout << "solve: " << res.trace.iterations_used << " cycles, "
                      << (res.trace.converged ? "converged" : "iteration limit")
                      << ", final cost " << costs.back() << ", "
                      << (res.solution.feasible ? "feasible" : "infeasible")
                      << "\n";
            if (!res.solution.uncovered.empty()) {
                std::cout << "uncovered devices:";
                for (int d : res.solution.uncovered) std::cout << ' ' << d;
                std::cout << "\n";
            }
        } else if (cmd_surface->parsed()) {
            const auto spec = build_spec(surface_args, dsfl::ExperimentKind::cost_surface);
            const auto rows = dsfl::run_cost_surface(spec, surface_args.out_dir);
            std::cout << "cost surface: " << rows.size() << " grid points written to "
                      << surface_args.out_dir << "/cost_surface.csv\n";
        } else if (cmd_compare->parsed()) {
            const auto spec = build_spec(compare_args, dsfl::ExperimentKind::solver_compare);
            const auto result = dsfl::run_solver_compare(spec, compare_args.out_dir);
            for (const auto& s : result.summary)
                std::cout << s.scheme << " mean final cost: " << s.mean_final_cost
                          << "\n";
        } else if (cmd_train->parsed()) {
            const auto spec = build_spec(train_args, dsfl::ExperimentKind::training_curves);
            const auto rows = dsfl::run_training_curves(spec, train_args.out_dir);
            for (const auto& row : rows)
                if (row.metrics.round == spec.training.rounds)
                    std::cout << row.protocol << " k=" << row.k << " seed=" << row.seed
                              << " final accuracy " << row.metrics.test_accuracy
                              << "\n";
        } else if (cmd_make->parsed()) {
            dsfl::SynthConfig cfg;
            cfg.train_count = make_train;
            cfg.test_count = make_test;
            cfg.noise_sigma = make_noise;
            const dsfl::SynthDataset ds = dsfl::make_synthetic_dataset(cfg, make_seed);
            std::filesystem::create_directories(make_out);
            dsfl::save_dataset(ds.train, make_out + "/train-images-idx3-ubyte",
                               make_out + "/train-labels-idx1-ubyte");
            dsfl::save_dataset(ds.test, make_out + "/t10k-images-idx3-ubyte",
                               make_out + "/t10k-labels-idx1-ubyte");
            std::cout << "synthetic dataset (" << ds.train.count() << " train / "
                      << ds.test.count() << " test) written to " << make_out << "\n";
        }
    } catch (const dsfl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
