#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dsflsim/allocation.hpp"
#include "dsflsim/assignment.hpp"
#include "dsflsim/channel.hpp"
#include "dsflsim/cost.hpp"
#include "dsflsim/rng.hpp"
#include "dsflsim/scenario.hpp"

namespace dsfl {

// Joint cost minimization over transmit power, resource blocks, association
// and relative local accuracy by cyclic block minimization. Each block is
// minimized exactly (capacity-constrained assignment for the combinatorial
// blocks, 1-D search for the continuous ones) and an accepted update never
// increases the objective, so the trace is monotone nonincreasing.
//
// Coverage is lexicographically first: when resource blocks or capacity are
// short, the solver minimizes the number of unserved devices, then the cost
// over the served ones.

struct SolverParams {
    int max_iterations = 200;   // full block cycles
    double tolerance = 1e-4;    // relative covered-cost improvement per cycle
    double min_tx_power_w = 1e-6;
    bool require_full_coverage = false;
    int golden_iterations = 90;
    CostParams cost;

    bool operator==(const SolverParams&) const = default;
};

enum class Block { assoc, rb, power, theta };

inline const char* block_name(Block b) {
    switch (b) {
        case Block::assoc: return "assoc";
        case Block::rb: return "rb";
        case Block::power: return "power";
        case Block::theta: return "theta";
    }
    return "?";
}

struct TraceEntry {
    int cycle = 0;  // full-cycle index, starting at 1
    Block block = Block::assoc;
    double total_cost = 0.0;    // infinite while any device is uncovered
    double covered_cost = 0.0;  // cost over covered devices only
    int uncovered = 0;
};

struct SolverTrace {
    std::vector<TraceEntry> entries;
    bool converged = false;
    int iterations_used = 0;  // full cycles executed
    bool infeasible_reported = false;
    std::vector<int> uncovered;  // devices unserved at exit

    // cost at the end of each full cycle (the per-iteration data product)
    std::vector<double> cycle_costs(bool covered_only = false) const {
        std::vector<double> out;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (i + 1 == entries.size() || entries[i + 1].cycle != entries[i].cycle)
                out.push_back(covered_only ? entries[i].covered_cost
                                           : entries[i].total_cost);
        }
        return out;
    }
};

struct SolveResult {
    AllocationSolution solution;
    SolverTrace trace;
};

namespace detail {

struct Objective {
    int uncovered = 0;
    double covered_cost = 0.0;
    int associated = 0;
    int with_rb = 0;
};

inline Objective evaluate(const AllocationSolution& sol, const Scenario& s,
                          const ChannelState& ch, const CostParams& cp) {
    const CostBreakdown bd = total_cost(sol, s, ch, cp);
    Objective o;
    o.uncovered = bd.uncovered_count;
    o.covered_cost = bd.covered_cost;
    for (int d = 0; d < sol.size(); ++d) {
        if (sol.server_of[d] >= 0) o.associated += 1;
        if (sol.rb_of[d] >= 0) o.with_rb += 1;
    }
    return o;
}

// lexicographic: fewer unserved devices, then lower cost over the served
// ones, then more partial assignments (so coverage can grow across cycles)
inline bool strictly_better(const Objective& a, const Objective& b) {
    if (a.uncovered != b.uncovered) return a.uncovered < b.uncovered;
    if (a.covered_cost != b.covered_cost) return a.covered_cost < b.covered_cost;
    if (a.associated != b.associated) return a.associated > b.associated;
    return a.with_rb > b.with_rb;
}

inline double one_device_cost(int d, int rb, int srv, double power_w,
                              double theta, const Scenario& s,
                              const ChannelState& ch, const CostParams& cp) {
    const double snr = sinr(d, rb, srv, power_w, s, ch);
    const double rate = achievable_rate(snr, s.resource_blocks[rb].bandwidth_hz);
    const double lat = transmission_latency(cp.upload_size_bits, rate);
    const double en = transmission_energy(power_w, lat);
    const DeviceCompute dc{static_cast<double>(s.devices[d].dataset_size),
                           s.devices[d].cpu_hz};
    return device_cost(theta, lat, en, cp, dc);
}

// interference-free cost used to rank servers for a device that has no
// resource block yet; keeps association able to precede RB assignment
inline double proxy_assoc_cost(int d, int srv, double power_w, double theta,
                               const Scenario& s, const ChannelState& ch,
                               const CostParams& cp) {
    const double bw = s.num_rbs() > 0 ? s.resource_blocks[0].bandwidth_hz : 180e3;
    const double snr =
        power_w * ch.gain(d, srv) / (s.noise_psd_w_per_hz * bw);
    const double rate = achievable_rate(snr, bw);
    const double lat = transmission_latency(cp.upload_size_bits, rate);
    const double en = transmission_energy(power_w, lat);
    const DeviceCompute dc{static_cast<double>(s.devices[d].dataset_size),
                           s.devices[d].cpu_hz};
    return device_cost(theta, lat, en, cp, dc);
}

template <class F>
double golden_min(F f, double lo, double hi, int iters) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

// 1-D minimize f over [lo, hi]; the incumbent and both bounds are always
// candidates, so boundary optima are returned exactly and a repeated call
// is a fixed point.
template <class F>
double minimize_scalar(F f, double lo, double hi, double incumbent, int iters) {
    double best_x = incumbent;
    double best_f = f(incumbent);
    for (double x : {golden_min(f, lo, hi, iters), lo, hi}) {
        const double fx = f(x);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    return best_x;
}

inline void update_power_block(AllocationSolution& sol, const Scenario& s,
                               const ChannelState& ch, const SolverParams& sp) {
    for (int d = 0; d < sol.size(); ++d) {
        const int rb = sol.rb_of[d];
        const int srv = sol.server_of[d];
        if (rb < 0 || srv < 0) continue;
        const double lo = std::min(sp.min_tx_power_w, s.devices[d].max_tx_power_w);
        const double hi = s.devices[d].max_tx_power_w;
        auto f = [&](double p) {
            return one_device_cost(d, rb, srv, p, sol.theta[d], s, ch, sp.cost);
        };
        sol.power_w[d] = minimize_scalar(f, lo, hi,
                                         std::clamp(sol.power_w[d], lo, hi),
                                         sp.golden_iterations);
    }
}

inline void update_theta_block(AllocationSolution& sol, const Scenario& s,
                               const ChannelState& ch, const SolverParams& sp) {
    const CostParams& cp = sp.cost;
    if (!cp.include_local_compute) {
        // cost is strictly increasing in theta, closed-form block minimum
        std::fill(sol.theta.begin(), sol.theta.end(), cp.theta_min);
        return;
    }
    for (int d = 0; d < sol.size(); ++d) {
        const int rb = sol.rb_of[d];
        const int srv = sol.server_of[d];
        if (rb < 0 || srv < 0) {
            sol.theta[d] = std::clamp(sol.theta[d], cp.theta_min, cp.theta_max);
            continue;
        }
        auto f = [&](double th) {
            return one_device_cost(d, rb, srv, sol.power_w[d], th, s, ch, cp);
        };
        sol.theta[d] = minimize_scalar(
            f, cp.theta_min, cp.theta_max,
            std::clamp(sol.theta[d], cp.theta_min, cp.theta_max),
            sp.golden_iterations);
    }
}

inline void update_rb_block(AllocationSolution& sol, const Scenario& s,
                            const ChannelState& ch, const SolverParams& sp) {
    BipartiteAssignment prob;
    prob.n_left = sol.size();
    prob.n_right = s.num_rbs();
    prob.right_capacity.assign(prob.n_right, 1);
    prob.arcs.resize(prob.n_left);
    for (int d = 0; d < prob.n_left; ++d) {
        const int srv = sol.server_of[d];
        if (srv < 0) continue;  // cannot price an RB without a receiver
        for (int r = 0; r < prob.n_right; ++r) {
            const double c =
                one_device_cost(d, r, srv, sol.power_w[d], sol.theta[d], s, ch, sp.cost);
            if (std::isfinite(c)) prob.arcs[d].push_back({r, c});
        }
    }
    AllocationSolution candidate = sol;
    candidate.rb_of = solve_assignment(prob);
    const Objective incumbent = evaluate(sol, s, ch, sp.cost);
    const Objective updated = evaluate(candidate, s, ch, sp.cost);
    if (strictly_better(updated, incumbent)) sol = candidate;
}

inline void update_association_block(AllocationSolution& sol, const Scenario& s,
                                     const ChannelState& ch,
                                     const SolverParams& sp) {
    BipartiteAssignment prob;
    prob.n_left = sol.size();
    prob.n_right = s.num_servers();
    prob.right_capacity.resize(prob.n_right);
    for (int e = 0; e < prob.n_right; ++e)
        prob.right_capacity[e] = s.edge_servers[e].capacity;
    prob.arcs.resize(prob.n_left);
    for (int d = 0; d < prob.n_left; ++d) {
        const int rb = sol.rb_of[d];
        for (int e = 0; e < prob.n_right; ++e) {
            const double c =
                rb >= 0 ? one_device_cost(d, rb, e, sol.power_w[d], sol.theta[d],
                                          s, ch, sp.cost)
                        : proxy_assoc_cost(d, e, sol.power_w[d], sol.theta[d], s,
                                           ch, sp.cost);
            if (std::isfinite(c)) prob.arcs[d].push_back({e, c});
        }
    }
    AllocationSolution candidate = sol;
    candidate.server_of = solve_assignment(prob);
    const Objective incumbent = evaluate(sol, s, ch, sp.cost);
    const Objective updated = evaluate(candidate, s, ch, sp.cost);
    if (strictly_better(updated, incumbent)) sol = candidate;
}

// Clamp a warm start into the feasible box and drop any duplicate RB or
// over-capacity association (keeping the lowest device ids).
inline void sanitize(AllocationSolution& sol, const Scenario& s,
                     const SolverParams& sp) {
    std::vector<int> rb_owner(s.num_rbs(), -1);
    std::vector<int> srv_load(s.num_servers(), 0);
    for (int d = 0; d < sol.size(); ++d) {
        const double lo = std::min(sp.min_tx_power_w, s.devices[d].max_tx_power_w);
        sol.power_w[d] = std::clamp(sol.power_w[d], lo, s.devices[d].max_tx_power_w);
        sol.theta[d] = std::clamp(sol.theta[d], sp.cost.theta_min, sp.cost.theta_max);
        int& rb = sol.rb_of[d];
        if (rb >= s.num_rbs()) rb = -1;
        if (rb >= 0) {
            if (rb_owner[rb] >= 0) rb = -1;
            else rb_owner[rb] = d;
        }
        int& srv = sol.server_of[d];
        if (srv >= s.num_servers()) srv = -1;
        if (srv >= 0) {
            if (srv_load[srv] >= s.edge_servers[srv].capacity) srv = -1;
            else srv_load[srv] += 1;
        }
    }
}

struct FrozenBlocks {
    bool assoc = false;
    bool rb = false;
};

inline SolveResult run_bsum(const Scenario& s, const SolverParams& sp,
                            AllocationSolution sol, FrozenBlocks frozen) {
    if (sp.max_iterations < 1)
        throw std::invalid_argument("solver: max_iterations must be >= 1");
    if (sp.tolerance <= 0)
        throw std::invalid_argument("solver: tolerance must be > 0");
    validate_cost_params(sp.cost);

    const ChannelState ch = build_channel_state(s);
    sanitize(sol, s, sp);

    SolverTrace trace;
    Objective prev = evaluate(sol, s, ch, sp.cost);
    auto record = [&](int cycle, Block b) {
        const Objective o = evaluate(sol, s, ch, sp.cost);
        trace.entries.push_back({cycle, b,
                                 o.uncovered > 0 ? kInfeasibleCost : o.covered_cost,
                                 o.covered_cost, o.uncovered});
    };

    for (int cycle = 1; cycle <= sp.max_iterations; ++cycle) {
        if (!frozen.assoc) {
            update_association_block(sol, s, ch, sp);
            record(cycle, Block::assoc);
        }
        if (!frozen.rb) {
            update_rb_block(sol, s, ch, sp);
            record(cycle, Block::rb);
        }
        update_power_block(sol, s, ch, sp);
        record(cycle, Block::power);
        update_theta_block(sol, s, ch, sp);
        record(cycle, Block::theta);

        trace.iterations_used = cycle;
        const Objective cur = evaluate(sol, s, ch, sp.cost);
        if (cur.uncovered == prev.uncovered && cur.associated == prev.associated &&
            cur.with_rb == prev.with_rb) {
            const double rel = (prev.covered_cost - cur.covered_cost) /
                               std::max(std::abs(prev.covered_cost), 1e-300);
            if (rel < sp.tolerance) {
                trace.converged = true;
                prev = cur;
                break;
            }
        }
        prev = cur;
    }

    sol.uncovered = uncovered_devices(sol);
    sol.feasible =
        sol.uncovered.empty() &&
        check_solution(sol, s, sp.cost.theta_min, sp.cost.theta_max).empty();
    trace.uncovered = sol.uncovered;
    trace.infeasible_reported = sp.require_full_coverage && !sol.uncovered.empty();
    return {std::move(sol), std::move(trace)};
}

}  // namespace detail

// the four block updates, each an exact minimizer of its own block
using detail::update_association_block;
using detail::update_power_block;
using detail::update_rb_block;
using detail::update_theta_block;

// Full joint solve: cyclic assoc -> rb -> power -> theta updates until the
// relative cost improvement over a cycle falls below tolerance.
inline SolveResult solve(const Scenario& s, const SolverParams& sp,
                         const AllocationSolution* warm_start = nullptr) {
    AllocationSolution init =
        warm_start ? *warm_start
                   : AllocationSolution::empty(
                         s.num_devices(), sp.cost.theta_min,
                         s.num_devices() ? s.devices[0].max_tx_power_w : 0.0);
    if (!warm_start)
        for (int d = 0; d < s.num_devices(); ++d)
            init.power_w[d] = s.devices[d].max_tx_power_w;
    return detail::run_bsum(s, sp, std::move(init), {});
}

// Baseline-A: resource blocks drawn uniformly (one-to-one) from `seed` and
// frozen; association, power and theta still optimized.
inline SolveResult baseline_a(const Scenario& s, const SolverParams& sp,
                              std::uint64_t seed) {
    AllocationSolution init = AllocationSolution::empty(
        s.num_devices(), sp.cost.theta_min, 0.0);
    for (int d = 0; d < s.num_devices(); ++d)
        init.power_w[d] = s.devices[d].max_tx_power_w;

    Rng rng(derive_seed(seed, 0xA11C));
    std::vector<int> devices(s.num_devices());
    std::vector<int> rbs(s.num_rbs());
    for (int d = 0; d < s.num_devices(); ++d) devices[d] = d;
    for (int r = 0; r < s.num_rbs(); ++r) rbs[r] = r;
    rng.shuffle(devices);
    rng.shuffle(rbs);
    const int m = std::min(s.num_devices(), s.num_rbs());
    for (int i = 0; i < m; ++i) init.rb_of[devices[i]] = rbs[i];

    return detail::run_bsum(s, sp, std::move(init), {.assoc = false, .rb = true});
}

// Baseline-R: association drawn uniformly among servers with free capacity
// from `seed` and frozen; resource blocks, power and theta still optimized.
inline SolveResult baseline_r(const Scenario& s, const SolverParams& sp,
                              std::uint64_t seed) {
    AllocationSolution init = AllocationSolution::empty(
        s.num_devices(), sp.cost.theta_min, 0.0);
    for (int d = 0; d < s.num_devices(); ++d)
        init.power_w[d] = s.devices[d].max_tx_power_w;

    Rng rng(derive_seed(seed, 0xA55C));
    std::vector<int> order(s.num_devices());
    for (int d = 0; d < s.num_devices(); ++d) order[d] = d;
    rng.shuffle(order);
    std::vector<int> remaining(s.num_servers());
    for (int e = 0; e < s.num_servers(); ++e)
        remaining[e] = s.edge_servers[e].capacity;
    for (int d : order) {
        std::vector<int> open;
        for (int e = 0; e < s.num_servers(); ++e)
            if (remaining[e] > 0) open.push_back(e);
        if (open.empty()) break;
        const int pick = open[static_cast<std::size_t>(rng.below(open.size()))];
        init.server_of[d] = pick;
        remaining[pick] -= 1;
    }

    return detail::run_bsum(s, sp, std::move(init), {.assoc = true, .rb = false});
}

inline std::vector<double> make_power_grid(double lo, double hi, int levels) {
    std::vector<double> grid;
    if (levels == 1) return {hi};
    grid.reserve(levels);
    for (int i = 0; i < levels; ++i)
        grid.push_back(lo + (hi - lo) * i / (levels - 1));
    return grid;
}

// Exhaustive certification oracle for guard-sized instances: enumerates all
// feasible (rb, assoc) structures and, per covered device, every
// (theta in {theta_min, theta_max}) x (power in grid) choice. Lexicographic
// objective as in solve: coverage first, then cost over covered devices.
inline AllocationSolution brute_force(const Scenario& s, const SolverParams& sp,
                                      const std::vector<double>& power_grid) {
    const int n = s.num_devices();
    const int n_rb = s.num_rbs();
    const int n_srv = s.num_servers();
    if (n > 4 || n_rb > 3 || n_srv > 2 ||
        static_cast<int>(power_grid.size()) > 16)
        throw std::invalid_argument(
            "brute_force: instance above guard limits (4 devices, 3 RBs, "
            "2 servers, 16 power levels)");
    validate_cost_params(sp.cost);
    const ChannelState ch = build_channel_state(s);

    AllocationSolution best = AllocationSolution::empty(
        n, sp.cost.theta_min, n ? s.devices[0].max_tx_power_w : 0.0);
    int best_uncovered = n + 1;
    double best_cost = kInfeasibleCost;

    std::vector<int> assoc(n, -1), rbs(n, -1);
    std::vector<int> load(n_srv, 0);
    std::vector<bool> rb_used(n_rb, false);

    // enumerate associations (device -> server or none) within capacity
    auto enum_rbs = [&](auto&& self, int d, auto&& complete) -> void {
        if (d == n) {
            complete();
            return;
        }
        rbs[d] = -1;
        self(self, d + 1, complete);
        for (int r = 0; r < n_rb; ++r) {
            if (rb_used[r]) continue;
            rb_used[r] = true;
            rbs[d] = r;
            self(self, d + 1, complete);
            rbs[d] = -1;
            rb_used[r] = false;
        }
    };

    auto score = [&]() {
        int uncovered = 0;
        double cost = 0.0;
        std::vector<double> pick_theta(n, sp.cost.theta_min);
        std::vector<double> pick_power(n, 0.0);
        for (int d = 0; d < n; ++d) {
            pick_power[d] = s.devices[d].max_tx_power_w;
            if (assoc[d] < 0 || rbs[d] < 0) {
                uncovered += 1;
                continue;
            }
            double dev_best = kInfeasibleCost;
            for (double th : {sp.cost.theta_min, sp.cost.theta_max}) {
                for (double p : power_grid) {
                    const double c = detail::one_device_cost(
                        d, rbs[d], assoc[d], p, th, s, ch, sp.cost);
                    if (c < dev_best) {
                        dev_best = c;
                        pick_theta[d] = th;
                        pick_power[d] = p;
                    }
                }
            }
            if (!std::isfinite(dev_best)) {
                uncovered += 1;
                continue;
            }
            cost += dev_best;
        }
        if (uncovered < best_uncovered ||
            (uncovered == best_uncovered && cost < best_cost)) {
            best_uncovered = uncovered;
            best_cost = cost;
            best.rb_of = rbs;
            best.server_of = assoc;
            best.theta = pick_theta;
            best.power_w = pick_power;
        }
    };

    auto enum_assoc = [&](auto&& self, int d) -> void {
        if (d == n) {
            enum_rbs(enum_rbs, 0, score);
            return;
        }
        assoc[d] = -1;
        self(self, d + 1);
        for (int e = 0; e < n_srv; ++e) {
            if (load[e] >= s.edge_servers[e].capacity) continue;
            load[e] += 1;
            assoc[d] = e;
            self(self, d + 1);
            assoc[d] = -1;
            load[e] -= 1;
        }
    };
    enum_assoc(enum_assoc, 0);

    best.uncovered = uncovered_devices(best);
    best.feasible =
        best.uncovered.empty() &&
        check_solution(best, s, sp.cost.theta_min, sp.cost.theta_max).empty();
    return best;
}

}  // namespace dsfl
