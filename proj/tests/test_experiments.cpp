#include <catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <map>

#include "dsflsim/experiments.hpp"
#include "dsflsim/synth.hpp"

using namespace dsfl;

namespace {

std::string fresh_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "dsflsim_exp" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// writes a small synthetic dataset once and reuses it across tests
const std::string& small_data_dir() {
    static const std::string dir = [] {
        const std::string d = fresh_dir("data");
        SynthConfig cfg;
        cfg.train_count = 6000;
        cfg.test_count = 800;
        const SynthDataset ds = make_synthetic_dataset(cfg, 77);
        save_dataset(ds.train, d + "/train-images-idx3-ubyte",
                     d + "/train-labels-idx1-ubyte");
        save_dataset(ds.test, d + "/t10k-images-idx3-ubyte",
                     d + "/t10k-labels-idx1-ubyte");
        return d;
    }();
    return dir;
}

}  // namespace

TEST_CASE("cost surface is monotone with its minimum at the corner") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::cost_surface;
    const std::string out = fresh_dir("surface");
    const auto rows = run_cost_surface(spec, out);
    REQUIRE(rows.size() == 100u);

    // group by theta (rows are theta-major, sinr within)
    const int n = spec.surface.sinr_points;
    for (int t = 0; t < spec.surface.theta_points; ++t) {
        for (int s = 1; s < n; ++s) {
            CHECK(rows[t * n + s].sinr_db > rows[t * n + s - 1].sinr_db);
            CHECK(rows[t * n + s].cost < rows[t * n + s - 1].cost);
        }
    }
    for (int s = 0; s < n; ++s)
        for (int t = 1; t < spec.surface.theta_points; ++t)
            CHECK(rows[t * n + s].cost > rows[(t - 1) * n + s].cost);

    double min_cost = rows[0].cost;
    std::size_t min_at = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].cost < min_cost) {
            min_cost = rows[i].cost;
            min_at = i;
        }
    CHECK(min_at == static_cast<std::size_t>(n - 1));  // theta_min, max SINR

    CHECK(std::filesystem::exists(out + "/cost_surface.csv"));
    CHECK(std::filesystem::exists(out + "/resolved_config.cfg"));
}

TEST_CASE("cost surface reruns byte-identically") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::cost_surface;
    const std::string a = fresh_dir("surface_a");
    const std::string b = fresh_dir("surface_b");
    run_cost_surface(spec, a);
    run_cost_surface(spec, b);
    CHECK(slurp(a + "/cost_surface.csv") == slurp(b + "/cost_surface.csv"));
    CHECK(slurp(a + "/resolved_config.cfg") == slurp(b + "/resolved_config.cfg"));
}

TEST_CASE("solver comparison emits nonincreasing traces and a summary") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::solver_compare;
    spec.scenario.devices = 8;
    spec.scenario.edge_servers = 2;
    spec.scenario.resource_blocks = 8;
    spec.seeds = {0, 1, 2};
    const std::string out = fresh_dir("compare");
    const CompareResult res = run_solver_compare(spec, out);

    REQUIRE(res.summary.size() == 3u);
    std::map<std::pair<std::string, std::uint64_t>, double> last;
    for (const auto& row : res.rows) {
        const auto key = std::make_pair(row.scheme, row.seed);
        if (last.count(key)) CHECK(row.cost <= last[key] + 1e-12);
        last[key] = row.cost;
    }
    for (const auto& s : res.summary) CHECK(std::isfinite(s.mean_final_cost));
    CHECK(std::filesystem::exists(out + "/solver_compare.csv"));
    CHECK(std::filesystem::exists(out + "/solver_summary.csv"));
}

TEST_CASE("solver comparison reruns byte-identically") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::solver_compare;
    spec.scenario.devices = 6;
    spec.scenario.edge_servers = 2;
    spec.scenario.resource_blocks = 6;
    spec.seeds = {3, 4};
    const std::string a = fresh_dir("compare_a");
    const std::string b = fresh_dir("compare_b");
    run_solver_compare(spec, a);
    run_solver_compare(spec, b);
    CHECK(slurp(a + "/solver_compare.csv") == slurp(b + "/solver_compare.csv"));
    CHECK(slurp(a + "/solver_summary.csv") == slurp(b + "/solver_summary.csv"));
}

TEST_CASE("training curves run end to end on IDX input") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::training_curves;
    spec.data_dir = small_data_dir();
    spec.seeds = {0};
    spec.training.rounds = 2;
    spec.training.devices = 4;
    spec.training.edges = 2;
    spec.training.num_shards = 20;
    spec.training.shard_size = 300;
    spec.training.k_values = {2};
    spec.training.hidden = {16};
    const std::string out = fresh_dir("curves");
    const auto rows = run_training_curves(spec, out);

    // dsfl(k=2) and sfl, 2 rounds each
    REQUIRE(rows.size() == 4u);
    for (const auto& row : rows) {
        CHECK((row.protocol == "dsfl" || row.protocol == "sfl"));
        CHECK(row.metrics.test_accuracy >= 0.0);
        CHECK(row.metrics.test_accuracy <= 1.0);
    }
    CHECK(std::filesystem::exists(out + "/training_curves.csv"));

    const std::string again = fresh_dir("curves_b");
    run_training_curves(spec, again);
    CHECK(slurp(out + "/training_curves.csv") ==
          slurp(again + "/training_curves.csv"));
}

TEST_CASE("training curves fail cleanly without a dataset") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::training_curves;
    spec.data_dir = "/nonexistent/dir";
    spec.seeds = {0};
    const std::string out = fresh_dir("curves_missing");
    CHECK_THROWS_WITH(run_training_curves(spec, out),
                      Catch::Matchers::ContainsSubstring("/nonexistent/dir"));
    ExperimentSpec no_dir;
    no_dir.kind = ExperimentKind::training_curves;
    CHECK_THROWS_WITH(run_training_curves(no_dir, fresh_dir("curves_nodir")),
                      Catch::Matchers::ContainsSubstring("data_dir"));
}

TEST_CASE("scenario snapshot and optimize write their products") {
    ExperimentSpec spec;
    spec.scenario.devices = 5;
    spec.scenario.edge_servers = 2;
    spec.scenario.resource_blocks = 5;
    spec.seeds = {11};
    const std::string out = fresh_dir("optimize");
    const std::string snap = run_scenario_snapshot(spec, out);
    const Scenario s = load_scenario(snap);
    CHECK(s.num_devices() == 5);
    CHECK(s.seed == 11u);

    const SolveResult res = run_optimize(spec, out);
    CHECK(res.solution.feasible);
    CHECK(std::filesystem::exists(out + "/solution.csv"));
    CHECK(std::filesystem::exists(out + "/cost_breakdown.csv"));
    CHECK(std::filesystem::exists(out + "/trace.csv"));

    // provenance: the echoed config parses back to the resolved spec
    const ExperimentSpec echoed = parse_config(out + "/resolved_config.cfg");
    ExperimentSpec resolved = spec;
    apply_seed_defaults(resolved);
    CHECK(echoed == resolved);
}
