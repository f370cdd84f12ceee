#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "pacifier/dynamics.hpp"
#include "pacifier/environment.hpp"
#include "pacifier/errors.hpp"
#include "pacifier/instance.hpp"
#include "pacifier/metrics.hpp"
#include "pacifier/rng.hpp"

namespace pacifier {

struct Plan {
    std::vector<int> actions;
    std::string method;
    std::vector<double> scores;  // per-step selection scores where meaningful
};

namespace detail {

// Descending by score, ties broken by ascending node id.
inline std::vector<int> rank_desc(const Vec& score) {
    std::vector<int> order(score.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return a < b;
    });
    return order;
}

inline void check_budget(const Instance& inst) {
    if (inst.budget > inst.n()) throw InvalidBudget("budget exceeds node count");
}

}  // namespace detail

inline Plan plan_random(const Instance& inst, RngStream& rng) {
    detail::check_budget(inst);
    Plan p;
    p.method = "random";
    p.actions = rng.sample_without_replacement(inst.n(), inst.budget);
    return p;
}

// Power iteration with damping 0.85; edge weights shape the transition
// probabilities, dangling mass is redistributed uniformly.
inline Plan plan_pagerank(const Instance& inst, double damping = 0.85, double tol = 1e-10,
                          int max_iters = 200) {
    detail::check_budget(inst);
    const Graph& g = inst.graph;
    const int n = g.node_count();
    Vec r = Vec::Constant(n, 1.0 / n);
    Vec wdeg(n);
    for (int v = 0; v < n; ++v) wdeg[v] = g.weighted_degree(v);
    for (int it = 0; it < max_iters; ++it) {
        Vec next = Vec::Zero(n);
        double dangling = 0;
        for (int v = 0; v < n; ++v) {
            if (wdeg[v] <= 0) {
                dangling += r[v];
                continue;
            }
            const double share = r[v] / wdeg[v];
            for (const Neighbor& nb : g.neighbors(v)) next[nb.id] += share * nb.w;
        }
        next = damping * (next.array() + dangling / n) + (1.0 - damping) / n;
        const double delta = (next - r).cwiseAbs().maxCoeff();
        r = next;
        if (delta < tol) break;
    }
    Plan p;
    p.method = "pagerank";
    auto order = detail::rank_desc(r);
    p.actions.assign(order.begin(), order.begin() + inst.budget);
    for (int a : p.actions) p.scores.push_back(r[a]);
    return p;
}

// Rank by |z^(0)|: most extreme settled opinions first.
inline Plan plan_extreme_expressed(const Instance& inst, const Vec& z0) {
    detail::check_budget(inst);
    if (z0.size() != inst.n()) throw InvalidInput("z0 length != n");
    Plan p;
    p.method = "extreme-expressed";
    auto order = detail::rank_desc(z0.cwiseAbs());
    p.actions.assign(order.begin(), order.begin() + inst.budget);
    for (int a : p.actions) p.scores.push_back(std::abs(z0[a]));
    return p;
}

// Rank by the |z^(0)| mass of the neighborhood.
inline Plan plan_extreme_neighbours(const Instance& inst, const Vec& z0) {
    detail::check_budget(inst);
    if (z0.size() != inst.n()) throw InvalidInput("z0 length != n");
    const Graph& g = inst.graph;
    Vec score = Vec::Zero(inst.n());
    for (int v = 0; v < inst.n(); ++v)
        for (const Neighbor& nb : g.neighbors(v)) score[v] += std::abs(z0[nb.id]);
    Plan p;
    p.method = "extreme-neighbours";
    auto order = detail::rank_desc(score);
    p.actions.assign(order.begin(), order.begin() + inst.budget);
    for (int a : p.actions) p.scores.push_back(score[a]);
    return p;
}

// Matching pursuit on the settled-opinion residual. Zeroing the internal
// opinion of node i moves the steady state by exactly -s_i q_i (q_i a column
// of the influence operator), so the residual update is exact under the
// linear internal-moderation family and needs no re-equilibration.
//
// Step scoring uses ||r - s_i q_i||^2 = ||r||^2 - 2 s_i <r, q_i> + s_i^2 ||q_i||^2,
// where all <r, q_i> come from a single adjoint solve. Under heterogeneous
// costs the residual-norm reduction is divided by c_i (benefit per cost).
inline Plan plan_bomp(const Instance& inst, const Vec& z0) {
    detail::check_budget(inst);
    if (family(inst.variant) != ActionFamily::internal || uses_bias_dynamics(inst.variant))
        throw UnsupportedVariant("bomp requires a linear internal-moderation task");
    if (z0.size() != inst.n()) throw InvalidInput("z0 length != n");
    const int n = inst.n();
    const bool cost_aware = inst.variant == Variant::mi_cost;
    InfluenceOperator Q(inst.graph);
    const Vec& qnorm = Q.col_sqnorms();

    Plan p;
    p.method = "bomp";
    Vec r = z0;
    Vec s = inst.s0;
    std::vector<std::uint8_t> taken(n, 0);
    for (int step = 0; step < inst.budget; ++step) {
        Vec dots = Q.column_dots(r);  // <r, q_i> for all i
        int best = -1;
        double best_key = 0;
        for (int i = 0; i < n; ++i) {
            if (taken[i]) continue;
            const double reduction = 2.0 * s[i] * dots[i] - s[i] * s[i] * qnorm[i];
            const double key = cost_aware ? reduction / inst.costs[i] : reduction;
            if (best < 0 || key > best_key) {
                best = i;
                best_key = key;
            }
        }
        taken[best] = 1;
        p.actions.push_back(best);
        p.scores.push_back(best_key);
        if (s[best] != 0.0) r -= s[best] * Q.column(best);
        s[best] = 0.0;
    }
    return p;
}

// Exhaustive oracle: enumerates every ordered sequence of k distinct nodes
// and returns the one with the lowest accumulated score. Replays sequences
// through the environment, so it is an evaluation oracle, not a one-shot
// planner; guarded to tiny instances.
inline Plan plan_exhaustive(const Instance& inst) {
    if (inst.budget < 1) throw Refused("exhaustive oracle needs k >= 1");
    if (inst.n() > 12 || inst.budget > 3)
        throw Refused("exhaustive oracle limited to n <= 12, k <= 3");
    auto shared = std::make_shared<Instance>(inst);
    std::vector<int> current;
    std::vector<std::uint8_t> used(inst.n(), 0);
    Plan best;
    best.method = "exhaustive";
    double best_anp = std::numeric_limits<double>::infinity();
    auto recurse = [&](auto&& self) -> void {
        if (static_cast<int>(current.size()) == inst.budget) {
            double a = evaluate_plan(shared, current).anp;
            if (a < best_anp) {
                best_anp = a;
                best.actions = current;
            }
            return;
        }
        for (int v = 0; v < inst.n(); ++v) {
            if (used[v]) continue;
            used[v] = 1;
            current.push_back(v);
            self(self);
            current.pop_back();
            used[v] = 0;
        }
    };
    recurse(recurse);
    best.scores.assign(1, best_anp);
    return best;
}

}  // namespace pacifier
