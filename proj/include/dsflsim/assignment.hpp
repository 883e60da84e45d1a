#pragma once

#include <limits>
#include <set>
#include <utility>
#include <vector>

namespace dsfl {

// Max-cardinality min-cost bipartite assignment, solved as a min-cost flow
// with successive shortest paths (Dijkstra + Johnson potentials). Arc costs
// must be >= 0. Among assignments of maximum cardinality the returned one
// has minimum total cost; ties resolve toward low node ids through the
// ordered path search, so the result is reproducible.
class MinCostFlow {
  public:
    struct Arc {
        int to;
        int cap;
        double cost;
        int rev;
    };

    explicit MinCostFlow(int n) : graph_(n) {}

    void add_arc(int u, int v, int cap, double cost) {
        graph_[u].push_back({v, cap, cost, static_cast<int>(graph_[v].size())});
        graph_[v].push_back({u, 0, -cost, static_cast<int>(graph_[u].size()) - 1});
    }

    // Pushes unit augmentations until the sink is unreachable.
    // Returns (flow, cost).
    std::pair<int, double> run(int s, int t) {
        const int n = static_cast<int>(graph_.size());
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> potential(n, 0.0);
        int flow = 0;
        double total_cost = 0.0;
        for (;;) {
            std::vector<double> dist(n, inf);
            std::vector<int> prev_node(n, -1), prev_arc(n, -1);
            dist[s] = 0.0;
            std::set<std::pair<double, int>> queue;
            queue.insert({0.0, s});
            while (!queue.empty()) {
                const auto [du, u] = *queue.begin();
                queue.erase(queue.begin());
                if (du > dist[u]) continue;
                for (int i = 0; i < static_cast<int>(graph_[u].size()); ++i) {
                    const Arc& a = graph_[u][i];
                    if (a.cap <= 0) continue;
                    const double nd = du + a.cost + potential[u] - potential[a.to];
                    if (nd < dist[a.to]) {
                        queue.erase({dist[a.to], a.to});
                        dist[a.to] = nd;
                        prev_node[a.to] = u;
                        prev_arc[a.to] = i;
                        queue.insert({nd, a.to});
                    }
                }
            }
            if (dist[t] == inf) break;
            for (int v = 0; v < n; ++v)
                if (dist[v] < inf) potential[v] += dist[v];
            for (int v = t; v != s; v = prev_node[v]) {
                Arc& a = graph_[prev_node[v]][prev_arc[v]];
                a.cap -= 1;
                graph_[a.to][a.rev].cap += 1;
                total_cost += a.cost;
            }
            flow += 1;
        }
        return {flow, total_cost};
    }

    const std::vector<Arc>& arcs_from(int u) const { return graph_[u]; }

  private:
    std::vector<std::vector<Arc>> graph_;
};

struct BipartiteAssignment {
    int n_left = 0;
    int n_right = 0;
    std::vector<int> right_capacity;                     // size n_right
    std::vector<std::vector<std::pair<int, double>>> arcs;  // per left: (right, cost)
};

// result[left] = assigned right index, or -1 when left stays unassigned.
inline std::vector<int> solve_assignment(const BipartiteAssignment& p) {
    const int n = 2 + p.n_left + p.n_right;
    const int source = 0;
    const int sink = n - 1;
    auto left_node = [](int i) { return 1 + i; };
    auto right_node = [&](int j) { return 1 + p.n_left + j; };

    MinCostFlow mcf(n);
    for (int i = 0; i < p.n_left; ++i) mcf.add_arc(source, left_node(i), 1, 0.0);
    for (int i = 0; i < p.n_left; ++i)
        for (const auto& [j, cost] : p.arcs[i])
            mcf.add_arc(left_node(i), right_node(j), 1, cost);
    for (int j = 0; j < p.n_right; ++j)
        mcf.add_arc(right_node(j), sink, p.right_capacity[j], 0.0);
    mcf.run(source, sink);

    std::vector<int> result(p.n_left, -1);
    for (int i = 0; i < p.n_left; ++i) {
        for (const auto& a : mcf.arcs_from(left_node(i))) {
            if (a.to == source || a.cap != 0) continue;
            const int j = a.to - 1 - p.n_left;
            if (j >= 0 && j < p.n_right) {
                result[i] = j;
                break;
            }
        }
    }
    return result;
}

}  // namespace dsfl
