#include <catch_amalgamated.hpp>
#include <sstream>

#include "dsflsim/config.hpp"

using namespace dsfl;

namespace {

ExperimentSpec parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

}  // namespace

TEST_CASE("empty config yields the documented defaults") {
    const ExperimentSpec spec = parse_text("");
    CHECK(spec.scenario.devices == 48);
    CHECK(spec.scenario.edge_servers == 6);
    CHECK(spec.scenario.resource_blocks == 48);
    CHECK(spec.scenario.area_side_m == 1000.0);
    CHECK(spec.scenario.carrier_freq_hz == 2e9);
    CHECK(spec.scenario.rb_bandwidth_hz() == 180e3);
    CHECK(spec.scenario.effective_capacity() == 8);
    CHECK(spec.cost.weight_latency == 0.5);
    CHECK(spec.cost.theta_min == 0.05);
    CHECK(spec.solver_tolerance == 1e-4);
    CHECK(spec.training.rounds == 50);
    CHECK(spec.training.k_values == std::vector<int>{2, 4});
    CHECK(spec.seeds.empty());
}

TEST_CASE("values, comments and lists parse") {
    const ExperimentSpec spec = parse_text(
        "# a comment\n"
        "devices = 12\n"
        "tolerance = 1e-6   # trailing comment\n"
        "train_k_values = 1, 2, 8\n"
        "seeds = 4,5,6\n"
        "include_local_compute = true\n"
        "data_dir = /tmp/data\n"
        "experiment = solver_compare\n");
    CHECK(spec.scenario.devices == 12);
    CHECK(spec.solver_tolerance == 1e-6);
    CHECK(spec.training.k_values == std::vector<int>{1, 2, 8});
    CHECK(spec.seeds == std::vector<std::uint64_t>{4, 5, 6});
    CHECK(spec.cost.include_local_compute);
    CHECK(spec.data_dir == "/tmp/data");
    CHECK(spec.kind == ExperimentKind::solver_compare);
}

TEST_CASE("errors name the offending key") {
    CHECK_THROWS_WITH(parse_text("subcarrier_spacing_hz = -15000\n"),
                      Catch::Matchers::ContainsSubstring("subcarrier_spacing_hz"));
    CHECK_THROWS_WITH(parse_text("devices = 0\n"),
                      Catch::Matchers::ContainsSubstring("devices"));
    CHECK_THROWS_WITH(parse_text("tolerance = nope\n"),
                      Catch::Matchers::ContainsSubstring("tolerance"));
    CHECK_THROWS_WITH(parse_text("include_local_compute = maybe\n"),
                      Catch::Matchers::ContainsSubstring("include_local_compute"));
}

TEST_CASE("unknown and duplicate keys are rejected") {
    CHECK_THROWS_WITH(parse_text("devcies = 3\n"),
                      Catch::Matchers::ContainsSubstring("unknown key 'devcies'"));
    CHECK_THROWS_WITH(parse_text("devices = 3\ndevices = 4\n"),
                      Catch::Matchers::ContainsSubstring("duplicate key"));
    CHECK_THROWS_AS(parse_text("just some text\n"), ConfigError);
}

TEST_CASE("cross-field validation applies") {
    CHECK_THROWS_WITH(parse_text("weight_latency = 0.7\n"),
                      Catch::Matchers::ContainsSubstring("sum to 1"));
    CHECK_THROWS_WITH(parse_text("theta_min = 0.9\ntheta_max = 0.2\n"),
                      Catch::Matchers::ContainsSubstring("theta"));
    CHECK_THROWS_WITH(parse_text("train_devices = 500\nnum_shards = 200\n"),
                      Catch::Matchers::ContainsSubstring("train_devices"));
    CHECK_THROWS_WITH(parse_text("cut_index = 5\n"),
                      Catch::Matchers::ContainsSubstring("cut_index"));
    CHECK_NOTHROW(parse_text("cut_index = 2\nhidden_units = 64,32\n"));
}

TEST_CASE("serialized config round-trips to an identical spec") {
    ExperimentSpec spec = parse_text(
        "devices = 20\n"
        "edge_servers = 4\n"
        "theta_min = 0.07\n"
        "learning_rate = 0.031\n"
        "train_k_values = 3\n"
        "seeds = 1,2,3\n");
    spec.kind = ExperimentKind::training_curves;
    spec.data_dir = "/data/mnist";

    const std::string text = serialize_config(spec);
    const ExperimentSpec back = parse_text(text);
    CHECK(back == spec);

    // a second round trip is byte-stable
    CHECK(serialize_config(back) == text);
}

TEST_CASE("seed defaults depend on the experiment kind") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::solver_compare;
    apply_seed_defaults(spec);
    CHECK(spec.seeds.size() == 20u);
    ExperimentSpec train;
    train.kind = ExperimentKind::training_curves;
    apply_seed_defaults(train);
    CHECK(train.seeds.size() == 3u);
    ExperimentSpec custom;
    custom.kind = ExperimentKind::custom;
    apply_seed_defaults(custom);
    CHECK(custom.seeds == std::vector<std::uint64_t>{0});
    // explicit seeds are preserved
    ExperimentSpec given;
    given.seeds = {9};
    apply_seed_defaults(given);
    CHECK(given.seeds == std::vector<std::uint64_t>{9});
}
