#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "pacifier/errors.hpp"
#include "pacifier/graph.hpp"
#include "pacifier/instance.hpp"
#include "pacifier/rng.hpp"

namespace pacifier {

enum class OpinionMode { binary, continuous };
enum class CostMode { unit, random };

struct GenConfig {
    int n_min = 18;
    int n_max = 50;
    // Preferential-attachment parameter, sampled per camp from [ba_m_min,
    // ba_m_max]; the resulting average degrees track the regimes observed on
    // real polarized topic graphs.
    int ba_m_min = 1;
    int ba_m_max = 4;
    // Inter-camp edge count = ratio * (intra-camp edge count), ratio sampled
    // uniformly from this range.
    double cross_ratio_min = 0.01;
    double cross_ratio_max = 0.17;
    OpinionMode opinion_mode = OpinionMode::binary;
    CostMode cost_mode = CostMode::unit;
    int max_connect_retries = 50;

    void validate() const {
        if (n_min < 4 || n_max < n_min) throw InvalidInput("need 4 <= n_min <= n_max");
        if (ba_m_min < 1 || ba_m_max < ba_m_min) throw InvalidInput("need 1 <= ba_m_min <= ba_m_max");
        if (cross_ratio_min < 0 || cross_ratio_max < cross_ratio_min || cross_ratio_max > 1)
            throw InvalidInput("need 0 <= cross_ratio_min <= cross_ratio_max <= 1");
    }
};

namespace detail {

// Barabasi-Albert preferential attachment on `size` nodes with ids
// offset..offset+size-1. Node i (i >= 1) attaches to min(m, i) distinct
// earlier nodes chosen proportionally to degree; the repeated-endpoint list
// makes the degree-proportional draw O(1). Always connected.
inline void ba_subgraph(int offset, int size, int m, RngStream& rng, std::vector<Edge>& out) {
    if (size <= 0) return;
    std::vector<int> endpoint_pool;  // node repeated once per incident edge
    endpoint_pool.reserve(2 * static_cast<std::size_t>(m) * size);
    for (int i = 1; i < size; ++i) {
        const int attach = std::min(m, i);
        std::set<int> targets;
        while (static_cast<int>(targets.size()) < attach) {
            int t;
            if (endpoint_pool.empty()) {
                t = static_cast<int>(rng.uniform_int(0, i - 1));
            } else {
                t = endpoint_pool[static_cast<std::size_t>(
                    rng.uniform_int(0, static_cast<std::int64_t>(endpoint_pool.size()) - 1))];
            }
            targets.insert(t);
        }
        for (int t : targets) {
            out.push_back({offset + i, offset + t, 1.0});
            endpoint_pool.push_back(i);
            endpoint_pool.push_back(t);
        }
    }
}

}  // namespace detail

inline Vec sample_costs(int n, CostMode mode, RngStream& rng) {
    if (n < 0) throw InvalidInput("negative size");
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = mode == CostMode::unit ? 1.0 : rng.uniform(0.5, 1.5);
    return c;
}

// camps: +1 / -1 per node. Magnitudes are Uniform(0,1], sign follows camp.
inline Vec sample_continuous_opinions(const std::vector<int>& camps, RngStream& rng) {
    Vec s(camps.size());
    for (std::size_t i = 0; i < camps.size(); ++i) {
        if (camps[i] != 1 && camps[i] != -1) throw InvalidInput("camp labels must be +1 or -1");
        s[static_cast<int>(i)] = camps[i] * rng.uniform01_open_low();
    }
    return s;
}

struct GeneratedInstance {
    Instance instance;
    std::vector<int> camps;   // +1 for V+, -1 for V-
    double cross_ratio = 0;   // sampled target ratio (inter / intra)
};

// Two-echo-chamber instance: a BA subgraph per camp, sparse inter-camp edges,
// camp-aligned opinions. The budget is left at 1; callers set it per episode.
inline GeneratedInstance generate_instance(const GenConfig& cfg, RngStream& rng,
                                           Variant variant = Variant::mi) {
    cfg.validate();
    const int n = static_cast<int>(rng.uniform_int(cfg.n_min, cfg.n_max));
    const int n_pos = (n + 1) / 2;
    const int n_neg = n - n_pos;
    const int m_pos = static_cast<int>(rng.uniform_int(cfg.ba_m_min, cfg.ba_m_max));
    const int m_neg = static_cast<int>(rng.uniform_int(cfg.ba_m_min, cfg.ba_m_max));

    std::vector<Edge> intra;
    detail::ba_subgraph(0, n_pos, m_pos, rng, intra);
    detail::ba_subgraph(n_pos, n_neg, m_neg, rng, intra);
    const int intra_count = static_cast<int>(intra.size());

    const double ratio = rng.uniform(cfg.cross_ratio_min, cfg.cross_ratio_max);
    int n_cross = static_cast<int>(std::lround(ratio * intra_count));
    if (ratio > 0 && n_cross == 0) n_cross = 1;  // a positive ratio must bridge the camps

    Graph graph;
    bool connected = false;
    for (int attempt = 0; attempt < cfg.max_connect_retries && !connected; ++attempt) {
        std::vector<Edge> edges = intra;
        std::set<std::pair<int, int>> used;
        int placed = 0, guard = 0;
        while (placed < n_cross && guard < 200 * (n_cross + 1)) {
            ++guard;
            int u = static_cast<int>(rng.uniform_int(0, n_pos - 1));
            int v = n_pos + static_cast<int>(rng.uniform_int(0, n_neg - 1));
            if (!used.insert({u, v}).second) continue;
            edges.push_back({u, v, 1.0});
            ++placed;
        }
        if (placed < n_cross) continue;
        graph = Graph::build(n, std::move(edges));
        connected = is_connected(graph);
    }
    if (!connected)
        throw GenerationFailed("could not produce a connected two-camp graph (cross ratio " +
                               std::to_string(ratio) + ")");

    GeneratedInstance out;
    out.camps.assign(n, 1);
    for (int i = n_pos; i < n; ++i) out.camps[i] = -1;
    out.cross_ratio = ratio;
    out.instance.graph = std::move(graph);
    if (cfg.opinion_mode == OpinionMode::binary) {
        out.instance.s0 = Vec(n);
        for (int i = 0; i < n; ++i) out.instance.s0[i] = out.camps[i];
    } else {
        out.instance.s0 = sample_continuous_opinions(out.camps, rng);
    }
    out.instance.costs = sample_costs(n, cfg.cost_mode, rng);
    out.instance.budget = 1;
    out.instance.variant = variant;
    if (uses_bias_dynamics(variant)) out.instance.bias = BiasConfig{};
    return out;
}

}  // namespace pacifier
