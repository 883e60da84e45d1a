#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dsflsim/allocation.hpp"
#include "dsflsim/channel.hpp"
#include "dsflsim/scenario.hpp"

namespace dsfl {

inline constexpr double kInfeasibleCost = std::numeric_limits<double>::infinity();

// Parameters of the per-device cost
//   (1 + theta) * (w_L * latency + w_E * energy).
//
// In the default (literal) mode only the transmission terms enter, which
// makes the theta block's optimum the lower bound theta_min. With
// include_local_compute the latency term gains the local computing time of
// a * ln(1/theta) local iterations and the energy term gains the CPU energy
// kappa * cycles * f^2 of those iterations, trading local accuracy against
// compute. Iteration count is kept continuous inside the cost so the
// per-device theta objective stays smooth; local_iterations() reports the
// integral count.
struct CostParams {
    double upload_size_bits = 1e5;
    double weight_latency = 0.5;
    double weight_energy = 0.5;
    double iteration_coeff = 10.0;  // a in I(theta) = a * ln(1/theta)
    double theta_min = 0.05;
    double theta_max = 0.95;
    bool include_local_compute = false;
    double cycles_per_sample = 1e6;
    double compute_kappa = 1e-28;  // J per cycle per Hz^2

    bool operator==(const CostParams&) const = default;
};

inline void validate_cost_params(const CostParams& p) {
    auto fail = [](const std::string& what) {
        throw std::invalid_argument("cost params: " + what);
    };
    if (p.upload_size_bits <= 0) fail("upload_size_bits must be > 0");
    if (p.weight_latency < 0 || p.weight_energy < 0)
        fail("cost weights must be >= 0");
    if (std::abs(p.weight_latency + p.weight_energy - 1.0) > 1e-12)
        fail("cost weights must sum to 1");
    if (!(p.theta_min > 0 && p.theta_min < p.theta_max && p.theta_max < 1))
        fail("theta bounds must satisfy 0 < theta_min < theta_max < 1");
    if (p.iteration_coeff <= 0) fail("iteration_coeff must be > 0");
    if (p.cycles_per_sample <= 0) fail("cycles_per_sample must be > 0");
    if (p.compute_kappa <= 0) fail("compute_kappa must be > 0");
}

// latency = payload / rate; a zero rate is reported as an infinite latency,
// never a finite value.
inline double transmission_latency(double upload_size_bits, double rate_bps) {
    if (upload_size_bits <= 0)
        throw std::invalid_argument("transmission_latency: upload_size must be > 0");
    if (rate_bps < 0)
        throw std::invalid_argument("transmission_latency: rate must be >= 0");
    if (rate_bps == 0.0) return kInfeasibleCost;
    return upload_size_bits / rate_bps;
}

inline double transmission_energy(double tx_power_w, double latency_s) {
    if (tx_power_w < 0)
        throw std::invalid_argument("transmission_energy: power must be >= 0");
    if (latency_s < 0)
        throw std::invalid_argument("transmission_energy: latency must be >= 0");
    if (std::isinf(latency_s)) return kInfeasibleCost;
    return tx_power_w * latency_s;
}

// Number of local iterations needed to reach relative local accuracy theta,
// I(theta) = ceil(a * ln(1/theta)). Nonincreasing in theta; zero at theta=1.
inline int local_iterations(double theta, double a) {
    if (theta <= 0.0 || theta > 1.0)
        throw std::domain_error("local_iterations: theta must be in (0, 1]");
    return static_cast<int>(std::ceil(a * std::log(1.0 / theta)));
}

inline double local_compute_time(double dataset_size, double cycles_per_sample,
                                 double cpu_freq_hz, double iterations) {
    if (cpu_freq_hz <= 0)
        throw std::invalid_argument("local_compute_time: cpu_freq must be > 0");
    if (dataset_size < 0 || cycles_per_sample < 0 || iterations < 0)
        throw std::invalid_argument("local_compute_time: inputs must be >= 0");
    return iterations * dataset_size * cycles_per_sample / cpu_freq_hz;
}

// Local-compute context of one device, used only in extended mode.
struct DeviceCompute {
    double dataset_size = 0.0;
    double cpu_hz = 0.0;
};

namespace detail {

inline double continuous_iterations(double theta, double a) {
    return a * std::log(1.0 / theta);
}

struct ComputeTerms {
    double time_s = 0.0;
    double energy_j = 0.0;
};

inline ComputeTerms compute_terms(double theta, const CostParams& p,
                                  const DeviceCompute& dc) {
    if (!p.include_local_compute || dc.dataset_size <= 0 || dc.cpu_hz <= 0)
        return {};
    const double iters = continuous_iterations(theta, p.iteration_coeff);
    const double cycles = iters * dc.dataset_size * p.cycles_per_sample;
    return {cycles / dc.cpu_hz, p.compute_kappa * cycles * dc.cpu_hz * dc.cpu_hz};
}

}  // namespace detail

inline double device_cost(double theta, double latency_s, double energy_j,
                          const CostParams& params,
                          const DeviceCompute& dc = {}) {
    if (theta < 0.0 || theta > 1.0)
        throw std::domain_error("device_cost: theta must be in [0, 1]");
    if (std::isinf(latency_s) || std::isinf(energy_j)) return kInfeasibleCost;
    double lat = latency_s;
    double en = energy_j;
    if (params.include_local_compute) {
        if (theta <= 0.0)
            throw std::domain_error("device_cost: theta must be > 0 in extended mode");
        const auto ct = detail::compute_terms(theta, params, dc);
        lat += ct.time_s;
        en += ct.energy_j;
    }
    return (1.0 + theta) *
           (params.weight_latency * lat + params.weight_energy * en);
}

struct DeviceCostRow {
    int device = 0;
    double latency_s = 0.0;
    double energy_j = 0.0;
    double local_compute_s = 0.0;
    double theta = 0.0;
    double cost = 0.0;
    bool feasible = false;
};

struct CostBreakdown {
    std::vector<DeviceCostRow> rows;
    double total_cost = 0.0;    // infinite if any device is infeasible
    double covered_cost = 0.0;  // sum over devices holding both an RB and a server
    int uncovered_count = 0;
    bool feasible = false;
};

// Composes sinr -> rate -> latency -> energy -> device_cost per device and
// sums. A device without a resource block or without a server is infeasible
// and makes the total infeasible; covered_cost still accumulates the rest.
inline CostBreakdown total_cost(const AllocationSolution& sol, const Scenario& s,
                                const ChannelState& ch, const CostParams& params) {
    const int n = s.num_devices();
    if (sol.size() != n)
        throw std::invalid_argument("total_cost: solution/scenario shape mismatch");
    CostBreakdown out;
    out.rows.reserve(n);
    out.feasible = true;
    for (int d = 0; d < n; ++d) {
        DeviceCostRow row;
        row.device = d;
        row.theta = sol.theta[d];
        const int rb = sol.rb_of[d];
        const int srv = sol.server_of[d];
        if (rb < 0 || srv < 0) {
            row.latency_s = kInfeasibleCost;
            row.energy_j = kInfeasibleCost;
            row.cost = kInfeasibleCost;
            row.feasible = false;
            out.uncovered_count += 1;
            out.feasible = false;
        } else {
            const double snr = sinr(d, rb, srv, sol.power_w[d], s, ch);
            const double rate =
                achievable_rate(snr, s.resource_blocks[rb].bandwidth_hz);
            row.latency_s = transmission_latency(params.upload_size_bits, rate);
            row.energy_j = transmission_energy(sol.power_w[d], row.latency_s);
            const DeviceCompute dc{static_cast<double>(s.devices[d].dataset_size),
                                   s.devices[d].cpu_hz};
            row.local_compute_s = detail::compute_terms(row.theta, params, dc).time_s;
            row.cost = device_cost(row.theta, row.latency_s, row.energy_j, params, dc);
            row.feasible = std::isfinite(row.cost);
            if (row.feasible) {
                out.covered_cost += row.cost;
            } else {
                out.feasible = false;
            }
        }
        out.rows.push_back(row);
    }
    out.total_cost = out.feasible ? out.covered_cost : kInfeasibleCost;
    return out;
}

}  // namespace dsfl
