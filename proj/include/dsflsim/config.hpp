#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsflsim/bsum.hpp"
#include "dsflsim/cost.hpp"
#include "dsflsim/scenario.hpp"

namespace dsfl {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind { cost_surface, solver_compare, training_curves, custom };

inline const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::cost_surface: return "cost_surface";
        case ExperimentKind::solver_compare: return "solver_compare";
        case ExperimentKind::training_curves: return "training_curves";
        case ExperimentKind::custom: return "custom";
    }
    return "?";
}

struct TrainingConfig {
    int rounds = 50;
    int edge_agg_period = 1;
    std::vector<int> k_values = {2, 4};  // edge aggregations per global merge
    int batch_size = 32;
    double learning_rate = 0.05;
    int cut_index = 1;
    std::vector<int> hidden = {128};
    int devices = 20;
    int edges = 4;
    int num_shards = 200;
    int shard_size = 300;

    bool operator==(const TrainingConfig&) const = default;
};

struct SurfaceConfig {
    int theta_points = 10;
    int sinr_points = 10;
    double ref_distance_m = 200.0;
    double interferer_min_m = 10.0;
    double interferer_max_m = 1000.0;

    bool operator==(const SurfaceConfig&) const = default;
};

// Fully resolved experiment description: scenario, cost, solver and
// training settings plus seed list and dataset location. What the parser
// returns and what a run echoes into its output directory.
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::custom;
    ScenarioConfig scenario;
    CostParams cost;
    int solver_max_iterations = 200;
    double solver_tolerance = 1e-4;
    double solver_min_tx_power_w = 1e-6;
    bool solver_require_full_coverage = false;
    TrainingConfig training;
    SurfaceConfig surface;
    std::vector<std::uint64_t> seeds;
    std::string data_dir;

    bool operator==(const ExperimentSpec&) const = default;

    SolverParams solver_params() const {
        SolverParams sp;
        sp.max_iterations = solver_max_iterations;
        sp.tolerance = solver_tolerance;
        sp.min_tx_power_w = solver_min_tx_power_w;
        sp.require_full_coverage = solver_require_full_coverage;
        sp.cost = cost;
        return sp;
    }
};

// default seed lists: 20 seeds for solver comparisons, 3 for training runs
inline void apply_seed_defaults(ExperimentSpec& spec) {
    if (!spec.seeds.empty()) return;
    int n = 1;
    if (spec.kind == ExperimentKind::solver_compare) n = 20;
    if (spec.kind == ExperimentKind::training_curves) n = 3;
    for (int i = 0; i < n; ++i) spec.seeds.push_back(i);
}

namespace detail {

class KeyedValues {
  public:
    void insert(const std::string& key, const std::string& value, int line) {
        if (values_.count(key))
            throw ConfigError("config: duplicate key '" + key + "' (line " +
                              std::to_string(line) + ")");
        values_[key] = value;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string take(const std::string& key) {
        consumed_.insert(key);
        return values_.at(key);
    }

    std::vector<std::string> unconsumed() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : values_)
            if (!consumed_.count(k)) out.push_back(k);
        return out;
    }

  private:
    std::map<std::string, std::string> values_;
    std::set<std::string> consumed_;
};

inline long long parse_int_token(const std::string& key, const std::string& tok) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "': expected an integer, got '" +
                          tok + "'");
    }
}

inline double parse_double_token(const std::string& key, const std::string& tok) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "': expected a number, got '" +
                          tok + "'");
    }
}

struct Reader {
    KeyedValues& kv;

    void integer(const std::string& key, int& out, long long lo, long long hi,
                 const std::string& range_text) const {
        if (!kv.has(key)) return;
        const long long v = parse_int_token(key, kv.take(key));
        if (v < lo || v > hi)
            throw ConfigError("config: key '" + key + "' must be " + range_text +
                              " (got " + std::to_string(v) + ")");
        out = static_cast<int>(v);
    }

    void real(const std::string& key, double& out, bool positive,
              bool nonnegative = false) const {
        if (!kv.has(key)) return;
        const double v = parse_double_token(key, kv.take(key));
        if (positive && !(v > 0))
            throw ConfigError("config: key '" + key + "' must be > 0 (got " +
                              CsvDouble(v) + ")");
        if (nonnegative && v < 0)
            throw ConfigError("config: key '" + key + "' must be >= 0 (got " +
                              CsvDouble(v) + ")");
        out = v;
    }

    void boolean(const std::string& key, bool& out) const {
        if (!kv.has(key)) return;
        const std::string v = kv.take(key);
        if (v == "true" || v == "1") out = true;
        else if (v == "false" || v == "0") out = false;
        else
            throw ConfigError("config: key '" + key +
                              "' must be true or false (got '" + v + "')");
    }

    void int_list(const std::string& key, std::vector<int>& out, long long lo,
                  const std::string& range_text) const {
        if (!kv.has(key)) return;
        std::vector<int> vals;
        std::stringstream ss(kv.take(key));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const long long v = parse_int_token(key, trim(tok));
            if (v < lo)
                throw ConfigError("config: key '" + key + "' entries must be " +
                                  range_text + " (got " + std::to_string(v) + ")");
            vals.push_back(static_cast<int>(v));
        }
        if (vals.empty())
            throw ConfigError("config: key '" + key + "' must not be empty");
        out = vals;
    }

    void seed_list(const std::string& key, std::vector<std::uint64_t>& out) const {
        if (!kv.has(key)) return;
        std::vector<std::uint64_t> vals;
        std::stringstream ss(kv.take(key));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const long long v = parse_int_token(key, trim(tok));
            if (v < 0)
                throw ConfigError("config: key '" + key +
                                  "' entries must be >= 0 (got " +
                                  std::to_string(v) + ")");
            vals.push_back(static_cast<std::uint64_t>(v));
        }
        if (vals.empty())
            throw ConfigError("config: key '" + key + "' must not be empty");
        out = vals;
    }

    void text(const std::string& key, std::string& out) const {
        if (kv.has(key)) out = kv.take(key);
    }

    static std::string trim(std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
        return s;
    }

    static std::string CsvDouble(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%g", v);
        return buf;
    }
};

}  // namespace detail

// Strict key = value parser: every key must be known, in range and unique;
// keys that are absent keep their documented defaults.
inline ExperimentSpec parse_config(std::istream& in) {
    detail::KeyedValues kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::Reader::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not of the form key = value: '" + line + "'");
        const std::string key = detail::Reader::trim(line.substr(0, eq));
        const std::string value = detail::Reader::trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config: empty key on line " + std::to_string(line_no));
        kv.insert(key, value, line_no);
    }

    ExperimentSpec spec;
    detail::Reader r{kv};

    // scenario
    r.integer("devices", spec.scenario.devices, 1, 1000000, ">= 1");
    r.integer("edge_servers", spec.scenario.edge_servers, 1, 1000000, ">= 1");
    r.integer("resource_blocks", spec.scenario.resource_blocks, 1, 1000000, ">= 1");
    r.real("area_side_m", spec.scenario.area_side_m, true);
    r.real("carrier_freq_hz", spec.scenario.carrier_freq_hz, true);
    r.integer("subcarriers_per_rb", spec.scenario.subcarriers_per_rb, 1, 10000, ">= 1");
    r.real("subcarrier_spacing_hz", spec.scenario.subcarrier_spacing_hz, true);
    r.real("noise_psd_dbm_per_hz", spec.scenario.noise_psd_dbm_per_hz, false);
    r.real("cellular_tx_power_dbm", spec.scenario.cellular_tx_power_dbm, false);
    r.real("device_max_tx_power_dbm", spec.scenario.device_max_tx_power_dbm, false);
    r.integer("server_capacity", spec.scenario.server_capacity, 0, 1000000,
              ">= 0 (0 selects ceil(devices/servers))");
    r.real("device_cpu_hz", spec.scenario.device_cpu_hz, true);
    r.integer("device_dataset_size", spec.scenario.device_dataset_size, 1,
              1000000000, ">= 1");
    r.real("min_distance_m", spec.scenario.min_distance_m, true);

    // cost
    r.real("upload_size_bits", spec.cost.upload_size_bits, true);
    r.real("weight_latency", spec.cost.weight_latency, false, true);
    r.real("weight_energy", spec.cost.weight_energy, false, true);
    r.real("theta_min", spec.cost.theta_min, true);
    r.real("theta_max", spec.cost.theta_max, true);
    r.real("iteration_coeff", spec.cost.iteration_coeff, true);
    r.boolean("include_local_compute", spec.cost.include_local_compute);
    r.real("cycles_per_sample", spec.cost.cycles_per_sample, true);
    r.real("compute_kappa", spec.cost.compute_kappa, true);

    // solver
    r.integer("max_iterations", spec.solver_max_iterations, 1, 1000000, ">= 1");
    r.real("tolerance", spec.solver_tolerance, true);
    r.real("min_tx_power_w", spec.solver_min_tx_power_w, true);
    r.boolean("require_full_coverage", spec.solver_require_full_coverage);

    // training
    r.integer("rounds", spec.training.rounds, 1, 1000000, ">= 1");
    r.integer("edge_agg_period", spec.training.edge_agg_period, 1, 1000000, ">= 1");
    r.int_list("train_k_values", spec.training.k_values, 1, ">= 1");
    r.integer("batch_size", spec.training.batch_size, 1, 1000000, ">= 1");
    r.real("learning_rate", spec.training.learning_rate, false, true);
    r.integer("cut_index", spec.training.cut_index, 1, 64, ">= 1");
    r.int_list("hidden_units", spec.training.hidden, 1, ">= 1");
    r.integer("train_devices", spec.training.devices, 1, 1000000, ">= 1");
    r.integer("train_edges", spec.training.edges, 1, 1000000, ">= 1");
    r.integer("num_shards", spec.training.num_shards, 1, 1000000, ">= 1");
    r.integer("shard_size", spec.training.shard_size, 1, 1000000, ">= 1");

    // cost-surface grid
    r.integer("surface_theta_points", spec.surface.theta_points, 2, 10000, ">= 2");
    r.integer("surface_sinr_points", spec.surface.sinr_points, 2, 10000, ">= 2");
    r.real("surface_ref_distance_m", spec.surface.ref_distance_m, true);
    r.real("surface_interferer_min_m", spec.surface.interferer_min_m, true);
    r.real("surface_interferer_max_m", spec.surface.interferer_max_m, true);

    if (kv.has("experiment")) {
        const std::string v = kv.take("experiment");
        if (v == "cost_surface") spec.kind = ExperimentKind::cost_surface;
        else if (v == "solver_compare") spec.kind = ExperimentKind::solver_compare;
        else if (v == "training_curves") spec.kind = ExperimentKind::training_curves;
        else if (v == "custom") spec.kind = ExperimentKind::custom;
        else
            throw ConfigError(
                "config: key 'experiment' must be one of cost_surface, "
                "solver_compare, training_curves, custom (got '" + v + "')");
    }
    r.seed_list("seeds", spec.seeds);
    r.text("data_dir", spec.data_dir);

    const auto unknown = kv.unconsumed();
    if (!unknown.empty())
        throw ConfigError("config: unknown key '" + unknown.front() + "'");

    // cross-field checks
    try {
        validate_config(spec.scenario);
        validate_cost_params(spec.cost);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (spec.surface.interferer_min_m >= spec.surface.interferer_max_m)
        throw ConfigError(
            "config: key 'surface_interferer_min_m' must be less than "
            "'surface_interferer_max_m'");
    if (spec.training.cut_index >=
        static_cast<int>(spec.training.hidden.size()) + 2)
        throw ConfigError(
            "config: key 'cut_index' must be < number of layers (hidden layers + 1)");
    if (spec.training.devices > spec.training.num_shards)
        throw ConfigError(
            "config: key 'train_devices' must be <= 'num_shards' (one shard per device)");
    return spec;
}

inline ExperimentSpec parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    return parse_config(in);
}

inline std::string serialize_config(const ExperimentSpec& spec) {
    std::ostringstream out;
    auto fd = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    auto il = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    };
    out << "# resolved dsflsim configuration\n";
    out << "experiment = " << kind_name(spec.kind) << "\n";
    out << "devices = " << spec.scenario.devices << "\n";
    out << "edge_servers = " << spec.scenario.edge_servers << "\n";
    out << "resource_blocks = " << spec.scenario.resource_blocks << "\n";
    out << "area_side_m = " << fd(spec.scenario.area_side_m) << "\n";
    out << "carrier_freq_hz = " << fd(spec.scenario.carrier_freq_hz) << "\n";
    out << "subcarriers_per_rb = " << spec.scenario.subcarriers_per_rb << "\n";
    out << "subcarrier_spacing_hz = " << fd(spec.scenario.subcarrier_spacing_hz) << "\n";
    out << "noise_psd_dbm_per_hz = " << fd(spec.scenario.noise_psd_dbm_per_hz) << "\n";
    out << "cellular_tx_power_dbm = " << fd(spec.scenario.cellular_tx_power_dbm) << "\n";
    out << "device_max_tx_power_dbm = " << fd(spec.scenario.device_max_tx_power_dbm)
        << "\n";
    out << "server_capacity = " << spec.scenario.server_capacity << "\n";
    out << "device_cpu_hz = " << fd(spec.scenario.device_cpu_hz) << "\n";
    out << "device_dataset_size = " << spec.scenario.device_dataset_size << "\n";
    out << "min_distance_m = " << fd(spec.scenario.min_distance_m) << "\n";
    out << "upload_size_bits = " << fd(spec.cost.upload_size_bits) << "\n";
    out << "weight_latency = " << fd(spec.cost.weight_latency) << "\n";
    out << "weight_energy = " << fd(spec.cost.weight_energy) << "\n";
    out << "theta_min = " << fd(spec.cost.theta_min) << "\n";
    out << "theta_max = " << fd(spec.cost.theta_max) << "\n";
    out << "iteration_coeff = " << fd(spec.cost.iteration_coeff) << "\n";
    out << "include_local_compute = "
        << (spec.cost.include_local_compute ? "true" : "false") << "\n";
    out << "cycles_per_sample = " << fd(spec.cost.cycles_per_sample) << "\n";
    out << "compute_kappa = " << fd(spec.cost.compute_kappa) << "\n";
    out << "max_iterations = " << spec.solver_max_iterations << "\n";
    out << "tolerance = " << fd(spec.solver_tolerance) << "\n";
    out << "min_tx_power_w = " << fd(spec.solver_min_tx_power_w) << "\n";
    out << "require_full_coverage = "
        << (spec.solver_require_full_coverage ? "true" : "false") << "\n";
    out << "rounds = " << spec.training.rounds << "\n";
    out << "edge_agg_period = " << spec.training.edge_agg_period << "\n";
    out << "train_k_values = " << il(spec.training.k_values) << "\n";
    out << "batch_size = " << spec.training.batch_size << "\n";
    out << "learning_rate = " << fd(spec.training.learning_rate) << "\n";
    out << "cut_index = " << spec.training.cut_index << "\n";
    out << "hidden_units = " << il(spec.training.hidden) << "\n";
    out << "train_devices = " << spec.training.devices << "\n";
    out << "train_edges = " << spec.training.edges << "\n";
    out << "num_shards = " << spec.training.num_shards << "\n";
    out << "shard_size = " << spec.training.shard_size << "\n";
    out << "surface_theta_points = " << spec.surface.theta_points << "\n";
    out << "surface_sinr_points = " << spec.surface.sinr_points << "\n";
    out << "surface_ref_distance_m = " << fd(spec.surface.ref_distance_m) << "\n";
    out << "surface_interferer_min_m = " << fd(spec.surface.interferer_min_m) << "\n";
    out << "surface_interferer_max_m = " << fd(spec.surface.interferer_max_m) << "\n";
    if (!spec.seeds.empty()) {
        out << "seeds = ";
        for (std::size_t i = 0; i < spec.seeds.size(); ++i)
            out << (i ? "," : "") << spec.seeds[i];
        out << "\n";
    }
    if (!spec.data_dir.empty()) out << "data_dir = " << spec.data_dir << "\n";
    return out.str();
}

inline void write_config(const ExperimentSpec& spec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("config: cannot write " + path);
    out << serialize_config(spec);
}

}  // namespace dsfl
