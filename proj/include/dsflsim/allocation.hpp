#pragma once

#include <string>
#include <vector>

#include "dsflsim/scenario.hpp"

namespace dsfl {

// Joint allocation decision: per-device transmit power, resource block,
// server association and relative local accuracy. Index -1 means
// unassigned. Row constraints (at most one RB / one server per device) are
// structural in this encoding; column constraints (exclusive RB use, server
// capacity) are validated by check_solution.
struct AllocationSolution {
    std::vector<double> power_w;
    std::vector<int> rb_of;
    std::vector<int> server_of;
    std::vector<double> theta;
    bool feasible = false;           // fully covered and all constraints hold
    std::vector<int> uncovered;      // devices lacking an RB or a server

    int size() const { return static_cast<int>(power_w.size()); }

    static AllocationSolution empty(int num_devices, double theta0, double power0) {
        AllocationSolution s;
        s.power_w.assign(num_devices, power0);
        s.rb_of.assign(num_devices, -1);
        s.server_of.assign(num_devices, -1);
        s.theta.assign(num_devices, theta0);
        return s;
    }
};

inline std::vector<int> uncovered_devices(const AllocationSolution& s) {
    std::vector<int> out;
    for (int d = 0; d < s.size(); ++d)
        if (s.rb_of[d] < 0 || s.server_of[d] < 0) out.push_back(d);
    return out;
}

// Validates the four constraint families plus the box bounds. Returns one
// human-readable line per violation; empty means the solution is valid.
inline std::vector<std::string> check_solution(const AllocationSolution& sol,
                                               const Scenario& s,
                                               double theta_min, double theta_max) {
    std::vector<std::string> v;
    const int n = s.num_devices();
    if (sol.size() != n) {
        v.push_back("solution size does not match device count");
        return v;
    }
    std::vector<int> rb_use(s.num_rbs(), 0);
    std::vector<int> srv_use(s.num_servers(), 0);
    for (int d = 0; d < n; ++d) {
        const int rb = sol.rb_of[d];
        const int srv = sol.server_of[d];
        if (rb >= s.num_rbs())
            v.push_back("device " + std::to_string(d) + ": rb index out of range");
        else if (rb >= 0)
            rb_use[rb] += 1;
        if (srv >= s.num_servers())
            v.push_back("device " + std::to_string(d) + ": server index out of range");
        else if (srv >= 0)
            srv_use[srv] += 1;
        if (sol.power_w[d] < 0 || sol.power_w[d] > s.devices[d].max_tx_power_w)
            v.push_back("device " + std::to_string(d) + ": power outside [0, p_max]");
        if (sol.theta[d] < theta_min || sol.theta[d] > theta_max)
            v.push_back("device " + std::to_string(d) + ": theta outside bounds");
    }
    for (int r = 0; r < s.num_rbs(); ++r)
        if (rb_use[r] > 1)
            v.push_back("rb " + std::to_string(r) + " assigned to " +
                        std::to_string(rb_use[r]) + " devices");
    for (int e = 0; e < s.num_servers(); ++e)
        if (srv_use[e] > s.edge_servers[e].capacity)
            v.push_back("server " + std::to_string(e) + " over capacity: " +
                        std::to_string(srv_use[e]) + " > " +
                        std::to_string(s.edge_servers[e].capacity));
    return v;
}

}  // namespace dsfl
