#include <catch_amalgamated.hpp>
#include <algorithm>
#include <numeric>
#include <vector>

#include "dsflsim/assignment.hpp"
#include "dsflsim/rng.hpp"

using namespace dsfl;

namespace {

// exhaustive reference: tries every (right or none) choice per left node,
// honoring capacities; maximizes cardinality first and then minimizes cost
struct BestRef {
    int assigned = -1;
    double cost = 0.0;
    std::vector<int> pick;
};

void enumerate(const BipartiteAssignment& p, std::vector<int>& cap,
               std::vector<int>& pick, int left, int assigned, double cost,
               BestRef& best) {
    if (left == p.n_left) {
        if (assigned > best.assigned ||
            (assigned == best.assigned && cost < best.cost)) {
            best = {assigned, cost, pick};
        }
        return;
    }
    pick[left] = -1;
    enumerate(p, cap, pick, left + 1, assigned, cost, best);
    for (const auto& [right, c] : p.arcs[left]) {
        if (cap[right] == 0) continue;
        cap[right] -= 1;
        pick[left] = right;
        enumerate(p, cap, pick, left + 1, assigned + 1, cost + c, best);
        pick[left] = -1;
        cap[right] += 1;
    }
}

BestRef reference_solve(const BipartiteAssignment& p) {
    BestRef best;
    std::vector<int> cap = p.right_capacity;
    std::vector<int> pick(p.n_left, -1);
    enumerate(p, cap, pick, 0, 0, 0.0, best);
    return best;
}

double solution_cost(const BipartiteAssignment& p, const std::vector<int>& sol,
                     int& assigned) {
    double cost = 0.0;
    assigned = 0;
    for (int i = 0; i < p.n_left; ++i) {
        if (sol[i] < 0) continue;
        assigned += 1;
        for (const auto& [right, c] : p.arcs[i])
            if (right == sol[i]) cost += c;
    }
    return cost;
}

}  // namespace

TEST_CASE("assignment matches exhaustive enumeration on random instances") {
    Rng rng(4242);
    for (int trial = 0; trial < 120; ++trial) {
        BipartiteAssignment p;
        p.n_left = 1 + static_cast<int>(rng.below(5));
        p.n_right = 1 + static_cast<int>(rng.below(5));
        p.right_capacity.resize(p.n_right);
        for (int j = 0; j < p.n_right; ++j)
            p.right_capacity[j] = 1 + static_cast<int>(rng.below(2));
        p.arcs.resize(p.n_left);
        for (int i = 0; i < p.n_left; ++i)
            for (int j = 0; j < p.n_right; ++j)
                if (rng.uniform() < 0.8)
                    p.arcs[i].push_back({j, rng.uniform(0.0, 10.0)});

        const auto sol = solve_assignment(p);
        const auto ref = reference_solve(p);
        int assigned = 0;
        const double cost = solution_cost(p, sol, assigned);
        CHECK(assigned == ref.assigned);
        CHECK(cost == Catch::Approx(ref.cost).epsilon(1e-9).margin(1e-9));

        // capacity respected
        std::vector<int> use(p.n_right, 0);
        for (int i = 0; i < p.n_left; ++i)
            if (sol[i] >= 0) use[sol[i]] += 1;
        for (int j = 0; j < p.n_right; ++j) CHECK(use[j] <= p.right_capacity[j]);
    }
}

TEST_CASE("assignment is deterministic") {
    BipartiteAssignment p;
    p.n_left = 4;
    p.n_right = 4;
    p.right_capacity = {1, 1, 1, 1};
    p.arcs.resize(4);
    Rng rng(7);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) p.arcs[i].push_back({j, rng.uniform(0.0, 5.0)});
    const auto a = solve_assignment(p);
    const auto b = solve_assignment(p);
    CHECK(a == b);
}

TEST_CASE("assignment handles isolated left nodes") {
    BipartiteAssignment p;
    p.n_left = 3;
    p.n_right = 2;
    p.right_capacity = {1, 1};
    p.arcs.resize(3);
    p.arcs[0].push_back({0, 2.0});
    p.arcs[2].push_back({0, 1.0});
    p.arcs[2].push_back({1, 5.0});
    const auto sol = solve_assignment(p);
    CHECK(sol[1] == -1);            // no arcs at all
    CHECK(sol[0] == 0);             // forced to the only right it can use
    CHECK(sol[2] == 1);             // max cardinality beats its cheaper arc
}
