#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsflsim/rng.hpp"
#include "dsflsim/units.hpp"

namespace dsfl {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct Device {
    int id = 0;
    Point pos;
    double max_tx_power_w = 0.0;
    double cpu_hz = 0.0;
    int dataset_size = 0;
};

struct EdgeServer {
    int id = 0;
    Point pos;
    int capacity = 1;
};

// One uplink resource block, reused from a cellular user whose transmission
// is the interference source on that block.
struct ResourceBlock {
    int id = 0;
    double bandwidth_hz = 0.0;
    Point cellular_pos;
    double cellular_tx_power_w = 0.0;
};

struct Scenario {
    double area_side_m = 0.0;
    double carrier_freq_hz = 0.0;
    double noise_psd_w_per_hz = 0.0;
    double min_distance_m = 1.0;
    std::uint64_t seed = 0;
    std::vector<Device> devices;
    std::vector<EdgeServer> edge_servers;
    std::vector<ResourceBlock> resource_blocks;

    int num_devices() const { return static_cast<int>(devices.size()); }
    int num_servers() const { return static_cast<int>(edge_servers.size()); }
    int num_rbs() const { return static_cast<int>(resource_blocks.size()); }
};

struct ScenarioConfig {
    int devices = 48;
    int edge_servers = 6;
    int resource_blocks = 48;
    double area_side_m = 1000.0;
    double carrier_freq_hz = 2e9;
    int subcarriers_per_rb = 12;
    double subcarrier_spacing_hz = 15e3;  // cellular-standard spacing
    double noise_psd_dbm_per_hz = -174.0;
    double cellular_tx_power_dbm = 46.0;
    double device_max_tx_power_dbm = 23.0;
    int server_capacity = 0;  // 0 = ceil(devices / edge_servers)
    double device_cpu_hz = 1e9;
    int device_dataset_size = 300;
    double min_distance_m = 1.0;

    bool operator==(const ScenarioConfig&) const = default;

    double rb_bandwidth_hz() const {
        return subcarriers_per_rb * subcarrier_spacing_hz;
    }
    int effective_capacity() const {
        if (server_capacity > 0) return server_capacity;
        return (devices + edge_servers - 1) / edge_servers;
    }
};

inline void validate_config(const ScenarioConfig& c) {
    auto fail = [](const std::string& what) {
        throw std::invalid_argument("scenario config: " + what);
    };
    if (c.devices < 1) fail("devices must be >= 1");
    if (c.edge_servers < 1) fail("edge_servers must be >= 1");
    if (c.resource_blocks < 1) fail("resource_blocks must be >= 1");
    if (c.area_side_m <= 0) fail("area_side_m must be > 0");
    if (c.carrier_freq_hz <= 0) fail("carrier_freq_hz must be > 0");
    if (c.subcarriers_per_rb < 1) fail("subcarriers_per_rb must be >= 1");
    if (c.subcarrier_spacing_hz <= 0) fail("subcarrier_spacing_hz must be > 0");
    if (c.server_capacity < 0) fail("server_capacity must be >= 0");
    if (c.device_cpu_hz <= 0) fail("device_cpu_hz must be > 0");
    if (c.device_dataset_size < 1) fail("device_dataset_size must be >= 1");
    if (c.min_distance_m <= 0) fail("min_distance_m must be > 0");
}

// Edge servers sit on a fixed grid (infrastructure co-located with base
// stations): cols = ceil(sqrt(n)), rows = ceil(n / cols), cell centers in
// row-major order. Independent of the seed.
inline std::vector<Point> server_grid(int n, double area_side) {
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    const int rows = (n + cols - 1) / cols;
    std::vector<Point> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        const int r = i / cols;
        const int c = i % cols;
        pts.push_back({(c + 0.5) * area_side / cols, (r + 0.5) * area_side / rows});
    }
    return pts;
}

// Devices and the per-RB cellular interferers are placed uniformly at random
// from the seeded generator; server positions do not consume random draws.
inline Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
    validate_config(config);

    Scenario s;
    s.area_side_m = config.area_side_m;
    s.carrier_freq_hz = config.carrier_freq_hz;
    s.noise_psd_w_per_hz = dbm_to_watts(config.noise_psd_dbm_per_hz);
    s.min_distance_m = config.min_distance_m;
    s.seed = seed;

    Rng rng(derive_seed(seed, 0xD5F1));
    const double side = config.area_side_m;
    const double p_max = dbm_to_watts(config.device_max_tx_power_dbm);
    const double p_cell = dbm_to_watts(config.cellular_tx_power_dbm);
    const double rb_bw = config.rb_bandwidth_hz();
    const int capacity = config.effective_capacity();

    s.devices.reserve(config.devices);
    for (int d = 0; d < config.devices; ++d) {
        Device dev;
        dev.id = d;
        dev.pos = {rng.uniform(0.0, side), rng.uniform(0.0, side)};
        dev.max_tx_power_w = p_max;
        dev.cpu_hz = config.device_cpu_hz;
        dev.dataset_size = config.device_dataset_size;
        s.devices.push_back(dev);
    }

    const auto grid = server_grid(config.edge_servers, side);
    s.edge_servers.reserve(config.edge_servers);
    for (int e = 0; e < config.edge_servers; ++e) {
        s.edge_servers.push_back({e, grid[e], capacity});
    }

    s.resource_blocks.reserve(config.resource_blocks);
    for (int r = 0; r < config.resource_blocks; ++r) {
        ResourceBlock rb;
        rb.id = r;
        rb.bandwidth_hz = rb_bw;
        rb.cellular_pos = {rng.uniform(0.0, side), rng.uniform(0.0, side)};
        rb.cellular_tx_power_w = p_cell;
        s.resource_blocks.push_back(rb);
    }
    return s;
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// Plain-text snapshot, exact round-trip (doubles written with %.17g).
inline void save_scenario(const Scenario& s, std::ostream& out) {
    using detail::fmt_double;
    out << "# dsflsim scenario snapshot v1\n";
    out << "area_side_m = " << fmt_double(s.area_side_m) << "\n";
    out << "carrier_freq_hz = " << fmt_double(s.carrier_freq_hz) << "\n";
    out << "noise_psd_w_per_hz = " << fmt_double(s.noise_psd_w_per_hz) << "\n";
    out << "min_distance_m = " << fmt_double(s.min_distance_m) << "\n";
    out << "seed = " << s.seed << "\n";
    out << "[devices]\n";
    out << "id,x_m,y_m,max_tx_power_w,cpu_hz,dataset_size\n";
    for (const auto& d : s.devices) {
        out << d.id << ',' << fmt_double(d.pos.x) << ',' << fmt_double(d.pos.y)
            << ',' << fmt_double(d.max_tx_power_w) << ',' << fmt_double(d.cpu_hz)
            << ',' << d.dataset_size << "\n";
    }
    out << "[edge_servers]\n";
    out << "id,x_m,y_m,capacity\n";
    for (const auto& e : s.edge_servers) {
        out << e.id << ',' << fmt_double(e.pos.x) << ',' << fmt_double(e.pos.y)
            << ',' << e.capacity << "\n";
    }
    out << "[resource_blocks]\n";
    out << "id,bandwidth_hz,cellular_x_m,cellular_y_m,cellular_tx_power_w\n";
    for (const auto& r : s.resource_blocks) {
        out << r.id << ',' << fmt_double(r.bandwidth_hz) << ','
            << fmt_double(r.cellular_pos.x) << ',' << fmt_double(r.cellular_pos.y)
            << ',' << fmt_double(r.cellular_tx_power_w) << "\n";
    }
}

inline void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    save_scenario(s, out);
}

inline Scenario load_scenario(std::istream& in) {
    Scenario s;
    std::string line;
    std::string section;
    auto split = [](const std::string& str) {
        std::vector<std::string> parts;
        std::stringstream ss(str);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        return parts;
    };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == '[') {
            section = line;
            std::getline(in, line);  // skip the column header
            continue;
        }
        if (section.empty()) {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("scenario snapshot: bad line: " + line);
            std::string key = line.substr(0, eq);
            std::string val = line.substr(eq + 1);
            auto trim = [](std::string& t) {
                t.erase(0, t.find_first_not_of(" \t"));
                t.erase(t.find_last_not_of(" \t") + 1);
            };
            trim(key);
            trim(val);
            if (key == "area_side_m") s.area_side_m = std::stod(val);
            else if (key == "carrier_freq_hz") s.carrier_freq_hz = std::stod(val);
            else if (key == "noise_psd_w_per_hz") s.noise_psd_w_per_hz = std::stod(val);
            else if (key == "min_distance_m") s.min_distance_m = std::stod(val);
            else if (key == "seed") s.seed = std::stoull(val);
            else throw std::runtime_error("scenario snapshot: unknown key: " + key);
        } else if (section == "[devices]") {
            const auto p = split(line);
            if (p.size() != 6)
                throw std::runtime_error("scenario snapshot: bad device row");
            s.devices.push_back({std::stoi(p[0]),
                                 {std::stod(p[1]), std::stod(p[2])},
                                 std::stod(p[3]),
                                 std::stod(p[4]),
                                 std::stoi(p[5])});
        } else if (section == "[edge_servers]") {
            const auto p = split(line);
            if (p.size() != 4)
                throw std::runtime_error("scenario snapshot: bad server row");
            s.edge_servers.push_back({std::stoi(p[0]),
                                      {std::stod(p[1]), std::stod(p[2])},
                                      std::stoi(p[3])});
        } else if (section == "[resource_blocks]") {
            const auto p = split(line);
            if (p.size() != 5)
                throw std::runtime_error("scenario snapshot: bad rb row");
            s.resource_blocks.push_back({std::stoi(p[0]),
                                         std::stod(p[1]),
                                         {std::stod(p[2]), std::stod(p[3])},
                                         std::stod(p[4])});
        } else {
            throw std::runtime_error("scenario snapshot: unknown section " + section);
        }
    }
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return load_scenario(in);
}

}  // namespace dsfl
