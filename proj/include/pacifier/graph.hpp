#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pacifier/errors.hpp"

namespace pacifier {

struct Edge {
    int u = 0;
    int v = 0;
    double w = 1.0;
};

struct Neighbor {
    int id;
    double w;
};

// Undirected weighted graph with per-node self-weights. Immutable after
// construction: node removal is expressed as an activity mask kept by the
// caller, so node ids, opinion vectors and intervention marks stay aligned.
class Graph {
public:
    Graph() = default;

    // Validates ids, rejects self-loops and duplicate undirected edges.
    // Self-weights default to 1 (unweighted social graphs).
    static Graph build(int n, std::vector<Edge> edges) {
        if (n < 0) throw InvalidGraph("negative node count");
        std::set<std::pair<int, int>> seen;
        for (const Edge& e : edges) {
            if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
                throw InvalidGraph("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                   ") out of range for n=" + std::to_string(n));
            if (e.u == e.v) throw InvalidGraph("self-loop at node " + std::to_string(e.u));
            if (e.w < 0) throw InvalidGraph("negative weight on edge (" + std::to_string(e.u) + "," +
                                            std::to_string(e.v) + ")");
            auto key = std::minmax(e.u, e.v);
            if (!seen.insert(key).second)
                throw InvalidGraph("duplicate edge (" + std::to_string(key.first) + "," +
                                   std::to_string(key.second) + ")");
        }
        Graph g;
        g.n_ = n;
        g.edges_ = std::move(edges);
        g.self_weights_.assign(n, 1.0);
        g.build_adjacency();
        return g;
    }

    int node_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    double self_weight(int v) const { return self_weights_[v]; }
    void set_self_weight(int v, double w) {
        if (w <= 0) throw InvalidGraph("self-weight must be positive");
        self_weights_[v] = w;
    }

    // Neighbors in ascending id order.
    std::span<const Neighbor> neighbors(int v) const {
        return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
    }

    int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }

    double weighted_degree(int v) const {
        double d = 0;
        for (const Neighbor& nb : neighbors(v)) d += nb.w;
        return d;
    }

private:
    void build_adjacency() {
        offsets_.assign(n_ + 1, 0);
        for (const Edge& e : edges_) {
            ++offsets_[e.u + 1];
            ++offsets_[e.v + 1];
        }
        for (int i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
        adj_.resize(2 * edges_.size());
        std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
        for (const Edge& e : edges_) {
            adj_[cursor[e.u]++] = {e.v, e.w};
            adj_[cursor[e.v]++] = {e.u, e.w};
        }
        for (int v = 0; v < n_; ++v)
            std::sort(adj_.begin() + offsets_[v], adj_.begin() + offsets_[v + 1],
                      [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
    }

    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<double> self_weights_;
    std::vector<int> offsets_;
    std::vector<Neighbor> adj_;
};

// Node-removal view over an immutable graph. Ids stay stable; removed nodes
// and their incident edges are inactive.
struct GraphView {
    const Graph* g = nullptr;
    std::vector<std::uint8_t> active;

    int active_count() const {
        int c = 0;
        for (auto a : active) c += a;
        return c;
    }

    bool edge_active(int u, int v) const { return active[u] && active[v]; }

    int degree(int v) const {
        if (!active[v]) return 0;
        int d = 0;
        for (const Neighbor& nb : g->neighbors(v)) d += active[nb.id];
        return d;
    }
};

inline GraphView full_view(const Graph& g) {
    return GraphView{&g, std::vector<std::uint8_t>(g.node_count(), 1)};
}

inline GraphView remove_node(const GraphView& view, int v) {
    if (v < 0 || v >= view.g->node_count()) throw InvalidAction("remove_node: id out of range");
    if (!view.active[v]) throw InvalidAction("remove_node: node already removed");
    GraphView out = view;
    out.active[v] = 0;
    return out;
}

// Weighted Laplacian restricted to active nodes: inactive rows/cols are zero.
inline Eigen::SparseMatrix<double> laplacian_sparse(const Graph& g,
                                                    const std::vector<std::uint8_t>* active = nullptr) {
    const int n = g.node_count();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(4 * g.edges().size() + n);
    std::vector<double> diag(n, 0.0);
    for (const Edge& e : g.edges()) {
        if (active && (!(*active)[e.u] || !(*active)[e.v])) continue;
        trips.emplace_back(e.u, e.v, -e.w);
        trips.emplace_back(e.v, e.u, -e.w);
        diag[e.u] += e.w;
        diag[e.v] += e.w;
    }
    for (int i = 0; i < n; ++i)
        if (diag[i] != 0.0) trips.emplace_back(i, i, diag[i]);
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(trips.begin(), trips.end());
    return L;
}

inline Eigen::MatrixXd laplacian_dense(const Graph& g,
                                       const std::vector<std::uint8_t>* active = nullptr) {
    return Eigen::MatrixXd(laplacian_sparse(g, active));
}

inline bool is_connected(const Graph& g, const std::vector<std::uint8_t>* active = nullptr) {
    const int n = g.node_count();
    if (n == 0) return true;
    int start = -1;
    int want = 0;
    for (int i = 0; i < n; ++i) {
        if (!active || (*active)[i]) {
            if (start < 0) start = i;
            ++want;
        }
    }
    if (start < 0) return true;  // no active nodes
    std::vector<std::uint8_t> seen(n, 0);
    std::queue<int> q;
    q.push(start);
    seen[start] = 1;
    int found = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const Neighbor& nb : g.neighbors(v)) {
            if (seen[nb.id]) continue;
            if (active && !(*active)[nb.id]) continue;
            seen[nb.id] = 1;
            ++found;
            q.push(nb.id);
        }
    }
    return found == want;
}

}  // namespace pacifier
