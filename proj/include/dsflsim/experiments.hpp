#pragma once

#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsflsim/bsum.hpp"
#include "dsflsim/config.hpp"
#include "dsflsim/csv.hpp"
#include "dsflsim/federated.hpp"
#include "dsflsim/idx.hpp"
#include "dsflsim/sharding.hpp"
#include "dsflsim/units.hpp"

namespace dsfl {

// Experiment drivers. Each writes its CSV products plus the fully resolved
// configuration into the output directory, and also returns the tabulated
// data so tests can assert on it directly. Runs are deterministic given
// (spec, seeds): rerunning produces byte-identical files.

inline void prepare_out_dir(const ExperimentSpec& spec, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_config(spec, out_dir + "/resolved_config.cfg");
}

// -------------------------------------------------------------------------
// cost surface: device cost over a (theta, SINR) grid

struct SurfaceRow {
    double theta = 0.0;
    double sinr_db = 0.0;
    double cost = 0.0;
};

// The SINR axis is realized geometrically: a fixed single-device link with
// the interfering cellular user placed at log-spaced distances from the
// server (farther interferer, higher SINR).
inline std::vector<SurfaceRow> run_cost_surface(const ExperimentSpec& spec,
                                                const std::string& out_dir) {
    const SurfaceConfig& sc = spec.surface;
    if (sc.theta_points < 2 || sc.sinr_points < 2)
        throw std::invalid_argument("cost_surface: grid must be at least 2x2");
    prepare_out_dir(spec, out_dir);

    ScenarioConfig ref = spec.scenario;
    ref.devices = 1;
    ref.edge_servers = 1;
    ref.resource_blocks = 1;

    Scenario s = generate_scenario(ref, 0);
    const double mid = ref.area_side_m / 2.0;
    s.edge_servers[0].pos = {mid, mid};
    s.devices[0].pos = {mid + sc.ref_distance_m, mid};
    const double p = s.devices[0].max_tx_power_w;

    std::vector<SurfaceRow> rows;
    CsvWriter csv(out_dir + "/cost_surface.csv", {"theta", "sinr_db", "cost"});
    const double log_lo = std::log(sc.interferer_min_m);
    const double log_hi = std::log(sc.interferer_max_m);
    for (int ti = 0; ti < sc.theta_points; ++ti) {
        const double theta =
            spec.cost.theta_min + (spec.cost.theta_max - spec.cost.theta_min) *
                                      ti / (sc.theta_points - 1);
        for (int si = 0; si < sc.sinr_points; ++si) {
            const double dist =
                std::exp(log_lo + (log_hi - log_lo) * si / (sc.sinr_points - 1));
            s.resource_blocks[0].cellular_pos = {mid - dist, mid};
            const ChannelState ch = build_channel_state(s);
            const double snr = sinr(0, 0, 0, p, s, ch);
            const double rate =
                achievable_rate(snr, s.resource_blocks[0].bandwidth_hz);
            const double lat = transmission_latency(spec.cost.upload_size_bits, rate);
            const double en = transmission_energy(p, lat);
            const DeviceCompute dc{static_cast<double>(s.devices[0].dataset_size),
                                   s.devices[0].cpu_hz};
            SurfaceRow row{theta, linear_to_db(snr),
                           device_cost(theta, lat, en, spec.cost, dc)};
            rows.push_back(row);
            csv.row({CsvWriter::num(row.theta), CsvWriter::num(row.sinr_db),
                     CsvWriter::num(row.cost)});
        }
    }
    return rows;
}

// -------------------------------------------------------------------------
// solver comparison: proposed BSUM vs the two random baselines

struct CompareRow {
    std::string scheme;
    std::uint64_t seed = 0;
    int iteration = 0;  // full block cycles; 0 carries no cost row
    double cost = 0.0;
};

struct CompareSummary {
    std::string scheme;
    double mean_final_cost = 0.0;
};

struct CompareResult {
    std::vector<CompareRow> rows;
    std::vector<CompareSummary> summary;
};

inline CompareResult run_solver_compare(const ExperimentSpec& spec,
                                        const std::string& out_dir) {
    ExperimentSpec resolved = spec;
    apply_seed_defaults(resolved);
    if (resolved.seeds.empty())
        throw std::invalid_argument("solver_compare: need at least one seed");
    prepare_out_dir(resolved, out_dir);

    const SolverParams sp = resolved.solver_params();
    CompareResult out;
    CsvWriter csv(out_dir + "/solver_compare.csv",
                  {"scheme", "seed", "iteration", "cost"});

    const char* scheme_names[3] = {"proposed", "baseline_a", "baseline_r"};
    double final_sums[3] = {0.0, 0.0, 0.0};
    for (const std::uint64_t seed : resolved.seeds) {
        const Scenario scen = generate_scenario(resolved.scenario, seed);
        for (int k = 0; k < 3; ++k) {
            const SolveResult res = k == 0   ? solve(scen, sp)
                                    : k == 1 ? baseline_a(scen, sp, seed)
                                             : baseline_r(scen, sp, seed);
            const auto costs = res.trace.cycle_costs();
            for (std::size_t i = 0; i < costs.size(); ++i) {
                CompareRow row{scheme_names[k], seed, static_cast<int>(i + 1),
                               costs[i]};
                out.rows.push_back(row);
                csv.row({row.scheme, CsvWriter::num(row.seed),
                         CsvWriter::num(row.iteration), CsvWriter::num(row.cost)});
            }
            final_sums[k] += costs.back();
        }
    }

    CsvWriter summary(out_dir + "/solver_summary.csv",
                      {"scheme", "mean_final_cost", "seeds"});
    for (int k = 0; k < 3; ++k) {
        const double mean = final_sums[k] / resolved.seeds.size();
        out.summary.push_back({scheme_names[k], mean});
        summary.row({scheme_names[k], CsvWriter::num(mean),
                     CsvWriter::num(static_cast<long long>(resolved.seeds.size()))});
    }
    return out;
}

// -------------------------------------------------------------------------
// training curves: DSFL for each configured k, SFL with shared seeds

struct CurveRow {
    std::string protocol;  // "dsfl" or "sfl"
    int k = 0;             // 0 for sfl
    std::uint64_t seed = 0;
    RoundMetrics metrics;
};

inline Dataset load_split(const std::string& data_dir, bool train) {
    const std::string img = data_dir + (train ? "/train-images-idx3-ubyte"
                                              : "/t10k-images-idx3-ubyte");
    const std::string lab = data_dir + (train ? "/train-labels-idx1-ubyte"
                                              : "/t10k-labels-idx1-ubyte");
    return load_dataset(img, lab);
}

inline std::vector<CurveRow> run_training_curves(const ExperimentSpec& spec,
                                                 const std::string& out_dir) {
    ExperimentSpec resolved = spec;
    apply_seed_defaults(resolved);
    if (resolved.data_dir.empty())
        throw std::invalid_argument(
            "training_curves: data_dir is required (IDX dataset location)");
    prepare_out_dir(resolved, out_dir);

    const Dataset train = load_split(resolved.data_dir, true);
    const Dataset test = load_split(resolved.data_dir, false);
    const TrainingConfig& tc = resolved.training;

    TrainHyper hyper;
    hyper.rounds = tc.rounds;
    hyper.edge_agg_period = tc.edge_agg_period;
    hyper.batch_size = tc.batch_size;
    hyper.learning_rate = tc.learning_rate;
    hyper.cut_index = tc.cut_index;
    hyper.hidden = tc.hidden;

    std::vector<CurveRow> rows;
    CsvWriter csv(out_dir + "/training_curves.csv",
                  {"protocol", "k", "seed", "round", "accuracy", "loss",
                   "edge_aggs", "global_aggs", "bits_uplinked"});
    auto emit = [&](const std::string& protocol, int k, std::uint64_t seed,
                    const std::vector<RoundMetrics>& metrics) {
        for (const auto& m : metrics) {
            rows.push_back({protocol, k, seed, m});
            csv.row({protocol, CsvWriter::num(k), CsvWriter::num(seed),
                     CsvWriter::num(m.round), CsvWriter::num(m.test_accuracy),
                     CsvWriter::num(m.train_loss),
                     CsvWriter::num(m.edge_aggregations_performed),
                     CsvWriter::num(m.global_aggregations_performed),
                     CsvWriter::num(m.bits_uplinked)});
        }
    };

    for (const std::uint64_t seed : resolved.seeds) {
        const ShardedDataset shards = shard_non_iid(train, tc.num_shards,
                                                    tc.shard_size, tc.devices, seed);
        hyper.seed = seed;
        for (const int k : tc.k_values) {
            hyper.edge_aggs_per_global = k;
            const auto map = round_robin_edge_map(tc.devices, tc.edges);
            emit("dsfl", k, seed, run_dsfl(map, train, test, shards, hyper));
        }
        hyper.edge_aggs_per_global = 1;
        emit("sfl", 0, seed, run_sfl(train, test, shards, hyper));
    }
    return rows;
}

// -------------------------------------------------------------------------
// single-scenario products: snapshot and one optimization run

inline std::string run_scenario_snapshot(const ExperimentSpec& spec,
                                         const std::string& out_dir) {
    ExperimentSpec resolved = spec;
    apply_seed_defaults(resolved);
    prepare_out_dir(resolved, out_dir);
    const Scenario s = generate_scenario(resolved.scenario, resolved.seeds.front());
    const std::string path = out_dir + "/scenario.txt";
    save_scenario(s, path);
    return path;
}

inline SolveResult run_optimize(const ExperimentSpec& spec,
                                const std::string& out_dir) {
    ExperimentSpec resolved = spec;
    apply_seed_defaults(resolved);
    prepare_out_dir(resolved, out_dir);
    const Scenario scen =
        generate_scenario(resolved.scenario, resolved.seeds.front());
    const SolverParams sp = resolved.solver_params();
    SolveResult res = solve(scen, sp);

    const ChannelState ch = build_channel_state(scen);
    const CostBreakdown bd = total_cost(res.solution, scen, ch, sp.cost);

    CsvWriter sol(out_dir + "/solution.csv",
                  {"device", "power_w", "rb", "server", "theta"});
    for (int d = 0; d < res.solution.size(); ++d)
        sol.row({CsvWriter::num(d), CsvWriter::num(res.solution.power_w[d]),
                 CsvWriter::num(res.solution.rb_of[d]),
                 CsvWriter::num(res.solution.server_of[d]),
                 CsvWriter::num(res.solution.theta[d])});

    CsvWriter brk(out_dir + "/cost_breakdown.csv",
                  {"device_id", "latency_s", "energy_j", "theta", "cost"});
    for (const auto& row : bd.rows)
        brk.row({CsvWriter::num(row.device), CsvWriter::num(row.latency_s),
                 CsvWriter::num(row.energy_j), CsvWriter::num(row.theta),
                 CsvWriter::num(row.cost)});

    CsvWriter trace(out_dir + "/trace.csv",
                    {"iteration", "block", "cost", "covered_cost", "uncovered"});
    for (const auto& e : res.trace.entries)
        trace.row({CsvWriter::num(e.cycle), block_name(e.block),
                   CsvWriter::num(e.total_cost), CsvWriter::num(e.covered_cost),
                   CsvWriter::num(e.uncovered)});
    return res;
}

}  // namespace dsfl
