#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pacifier/errors.hpp"
#include "pacifier/graph.hpp"

namespace pacifier {

using Vec = Eigen::VectorXd;

// Moderation task variants. The "family" decides which opinion attribute an
// action neutralizes and which solver settles the system.
enum class Variant {
    mi,             // zero internal opinions, binary instance
    mi_cost,        // mi with heterogeneous costs
    mi_continuous,  // mi on continuous internal opinions
    mi_bias,        // mi under biased-assimilation dynamics
    me,             // pin expressed opinions to zero
    me_cost,
    me_continuous,
    node_removal,   // remove nodes from the graph
};

enum class ActionFamily { internal, expressed, removal };

inline ActionFamily family(Variant v) {
    switch (v) {
        case Variant::me:
        case Variant::me_cost:
        case Variant::me_continuous:
            return ActionFamily::expressed;
        case Variant::node_removal:
            return ActionFamily::removal;
        default:
            return ActionFamily::internal;
    }
}

inline bool uses_bias_dynamics(Variant v) { return v == Variant::mi_bias; }

inline std::string variant_name(Variant v) {
    switch (v) {
        case Variant::mi: return "mi";
        case Variant::mi_cost: return "mi-cost";
        case Variant::mi_continuous: return "mi-continuous";
        case Variant::mi_bias: return "mi-bias";
        case Variant::me: return "me";
        case Variant::me_cost: return "me-cost";
        case Variant::me_continuous: return "me-continuous";
        case Variant::node_removal: return "node-removal";
    }
    return "?";
}

inline Variant variant_from_name(const std::string& name) {
    for (Variant v : {Variant::mi, Variant::mi_cost, Variant::mi_continuous, Variant::mi_bias,
                      Variant::me, Variant::me_cost, Variant::me_continuous, Variant::node_removal})
        if (variant_name(v) == name) return v;
    throw InvalidInput("unknown variant '" + name + "'");
}

// Biased-assimilation iteration parameters: exponent b weights confirmatory
// neighbor mass against disconfirmatory mass.
struct BiasConfig {
    double b = 1.0;
    int max_iters = 200000;
    double tol = 1e-10;
};

// One planning problem: graph, internal opinions, costs, budget, task.
struct Instance {
    Graph graph;
    Vec s0;
    Vec costs;
    int budget = 1;
    Variant variant = Variant::mi;
    std::optional<BiasConfig> bias;

    int n() const { return graph.node_count(); }

    double total_cost() const { return costs.sum(); }

    void validate() const {
        const int nn = graph.node_count();
        if (s0.size() != nn || costs.size() != nn) throw InvalidInput("instance vector length != n");
        if (budget < 1 || budget > nn) throw InvalidBudget("budget must be in [1, n]");
        for (int i = 0; i < nn; ++i) {
            if (s0[i] < -1.0 || s0[i] > 1.0) throw InvalidInput("internal opinion outside [-1, 1]");
            if (costs[i] <= 0.0) throw InvalidInput("costs must be positive");
        }
        if (uses_bias_dynamics(variant) && !bias) throw InvalidInput("bias variant requires BiasConfig");
    }
};

// --- edge-list text format ---------------------------------------------
// One edge per line: "u v [w]", '#' starts a comment. Ids need not be dense;
// they are remapped densely in first-seen order and the mapping is returned.

struct LoadedEdgeList {
    Graph graph;
    std::vector<std::int64_t> original_ids;  // dense id -> id on disk
    bool remapped = false;
};

inline LoadedEdgeList load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open edge file '" + path + "'");
    std::map<std::int64_t, int> id_map;
    std::vector<std::int64_t> original_ids;
    std::vector<Edge> edges;
    std::string line;
    int line_no = 0;
    auto dense = [&](std::int64_t raw) {
        auto it = id_map.find(raw);
        if (it != id_map.end()) return it->second;
        int d = static_cast<int>(original_ids.size());
        id_map.emplace(raw, d);
        original_ids.push_back(raw);
        return d;
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::int64_t u, v;
        if (!(ss >> u)) continue;  // blank/comment line
        if (!(ss >> v)) throw IngestError(path + ":" + std::to_string(line_no) + ": expected 'u v [w]'");
        double w = 1.0;
        ss >> w;
        if (u == v)
            throw IngestError(path + ":" + std::to_string(line_no) + ": self-loop on node " +
                              std::to_string(u));
        if (w < 0) throw IngestError(path + ":" + std::to_string(line_no) + ": negative weight");
        edges.push_back({dense(u), dense(v), w});
    }
    LoadedEdgeList out;
    const int n = static_cast<int>(original_ids.size());
    try {
        out.graph = Graph::build(n, std::move(edges));
    } catch (const InvalidGraph& e) {
        throw IngestError(path + ": " + e.what());
    }
    out.remapped = false;
    for (int i = 0; i < n; ++i)
        if (original_ids[i] != i) out.remapped = true;
    out.original_ids = std::move(original_ids);
    return out;
}

inline void save_edge_list(const std::string& path, const Graph& g) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << "# " << g.node_count() << " nodes, " << g.edge_count() << " edges\n";
    for (const Edge& e : g.edges()) {
        out << e.u << ' ' << e.v;
        if (e.w != 1.0) out << ' ' << e.w;
        out << '\n';
    }
}

// --- per-node value files (opinions, costs): one value per line ---------

inline Vec load_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open '" + path + "'");
    std::vector<double> vals;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double x;
        if (!(ss >> x)) continue;
        vals.push_back(x);
    }
    Vec v(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
    return v;
}

inline void save_value_file(const std::string& path, const Vec& v) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out.precision(17);
    for (int i = 0; i < v.size(); ++i) out << v[i] << '\n';
}

// Instance on disk = <prefix>.edges + <prefix>.opinions + <prefix>.costs.
inline void save_instance(const std::string& prefix, const Instance& inst) {
    save_edge_list(prefix + ".edges", inst.graph);
    save_value_file(prefix + ".opinions", inst.s0);
    save_value_file(prefix + ".costs", inst.costs);
}

inline Instance load_instance(const std::string& prefix, int budget, Variant variant,
                              std::optional<BiasConfig> bias = std::nullopt) {
    Instance inst;
    inst.graph = load_edge_list(prefix + ".edges").graph;
    inst.s0 = load_value_file(prefix + ".opinions");
    inst.costs = load_value_file(prefix + ".costs");
    inst.budget = budget;
    inst.variant = variant;
    inst.bias = bias;
    if (uses_bias_dynamics(variant) && !inst.bias) inst.bias = BiasConfig{};
    inst.validate();
    return inst;
}

}  // namespace pacifier
