#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pacifier/dynamics.hpp"
#include "pacifier/errors.hpp"
#include "pacifier/graph.hpp"
#include "pacifier/instance.hpp"

namespace pacifier {

// pi(z) = ||z||^2 / n.
inline double polarization_index(const Vec& z) {
    if (z.size() == 0) throw InvalidInput("polarization of empty vector");
    return z.squaredNorm() / static_cast<double>(z.size());
}

// The per-step normalization divides the index by n once more. That double
// normalization is the published convention; raw mode skips it. Rankings are
// invariant to the choice.
enum class PolNorm { paper, raw };

inline double normalized_polarization(const Vec& z, PolNorm mode = PolNorm::paper) {
    double p = polarization_index(z);
    return mode == PolNorm::paper ? p / static_cast<double>(z.size()) : p;
}

// Accumulated normalized polarization: (1/k) * sum_{t=0..k} pol_hat_t.
// A discrete area under the trajectory over the normalized horizon t/k.
inline double anp(const std::vector<double>& pol_hat_steps, int k) {
    if (k < 1) throw InvalidInput("anp requires k >= 1");
    if (static_cast<int>(pol_hat_steps.size()) != k + 1)
        throw InvalidInput("anp needs exactly k+1 trajectory values");
    double sum = 0;
    for (double p : pol_hat_steps) sum += p;
    return sum / static_cast<double>(k);
}

// Ordered intervention run: actions, polarization per step in both
// conventions, and the accumulated score.
struct Trajectory {
    std::vector<int> actions;
    std::vector<double> pol_raw;   // pi(z^(t)),     t = 0..k
    std::vector<double> pol_hat;   // pi(z^(t)) / n, t = 0..k
    std::vector<double> costs_spent;
    double anp = 0;
    Variant variant = Variant::mi;
};

struct DatasetStats {
    std::string name;
    int n = 0;
    int m = 0;
    int camp_pos = 0;
    int camp_neg = 0;
    double avg_degree = 0;
    double initial_polarization = 0;
    double cross_camp_ratio = 0;
    double avg_degree_pos = 0;
    double avg_degree_neg = 0;
};

// Partition-aware structural statistics. camps holds +1/-1 per node; the
// initial polarization is evaluated under the extreme assignment s_i = camp_i.
inline DatasetStats dataset_stats(const Graph& g, const std::vector<int>& camps,
                                  const std::string& name = "") {
    if (static_cast<int>(camps.size()) != g.node_count())
        throw InvalidInput("camp partition length != node count");
    for (int c : camps)
        if (c != 1 && c != -1) throw InvalidInput("camp labels must be +1 or -1");
    DatasetStats st;
    st.name = name;
    st.n = g.node_count();
    st.m = g.edge_count();
    int cross = 0;
    long long deg_pos = 0, deg_neg = 0;
    for (const Edge& e : g.edges())
        if (camps[e.u] != camps[e.v]) ++cross;
    for (int v = 0; v < g.node_count(); ++v) {
        if (camps[v] > 0) {
            ++st.camp_pos;
            deg_pos += g.degree(v);
        } else {
            ++st.camp_neg;
            deg_neg += g.degree(v);
        }
    }
    st.avg_degree = st.n > 0 ? 2.0 * st.m / st.n : 0.0;
    st.cross_camp_ratio = st.m > 0 ? static_cast<double>(cross) / st.m : 0.0;
    st.avg_degree_pos = st.camp_pos > 0 ? static_cast<double>(deg_pos) / st.camp_pos : 0.0;
    st.avg_degree_neg = st.camp_neg > 0 ? static_cast<double>(deg_neg) / st.camp_neg : 0.0;
    Vec s(st.n);
    for (int v = 0; v < st.n; ++v) s[v] = camps[v];
    st.initial_polarization = st.n > 0 ? polarization_index(solve_fj_direct(g, s)) : 0.0;
    return st;
}

inline std::vector<DatasetStats> filter_by_polarization(const std::vector<DatasetStats>& stats,
                                                        double threshold) {
    if (threshold < 0) throw InvalidInput("threshold must be nonnegative");
    std::vector<DatasetStats> out;
    for (const DatasetStats& s : stats)
        if (s.initial_polarization > threshold) out.push_back(s);
    return out;
}

}  // namespace pacifier
