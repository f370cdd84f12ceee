#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "pacifier/errors.hpp"
#include "pacifier/graph.hpp"
#include "pacifier/instance.hpp"

namespace pacifier {

// Counts steady-state computations made through settle(). Planners must keep
// this untouched: all settles belong to the environment (rewards/evaluation).
inline std::atomic<std::int64_t>& settle_call_counter() {
    static std::atomic<std::int64_t> counter{0};
    return counter;
}

struct NonConvergedIterate : NonConverged {
    NonConvergedIterate(const std::string& msg, Vec last_iterate)
        : NonConverged(msg), last(std::move(last_iterate)) {}
    Vec last;
};

struct IterativeResult {
    Vec z;
    int iters = 0;
    bool converged = false;
};

namespace detail {

// How inactive nodes leave the linear system.
//   induced_subgraph: node removal; incident edges vanish from degrees too.
//   grounded: expressed opinions pinned to 0; degrees keep edges to pinned
//             neighbors, only the off-diagonal couplings are dropped.
enum class Reduction { induced_subgraph, grounded };

struct ReducedSystem {
    std::vector<int> to_reduced;   // -1 for inactive
    std::vector<int> to_full;
    Eigen::SparseMatrix<double> A;  // (L + W) on the reduced index set, SPD
};

inline ReducedSystem build_system(const Graph& g, const std::vector<std::uint8_t>* active,
                                  Reduction reduction) {
    const int n = g.node_count();
    ReducedSystem sys;
    sys.to_reduced.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        if (!active || (*active)[i]) {
            sys.to_reduced[i] = static_cast<int>(sys.to_full.size());
            sys.to_full.push_back(i);
        }
    }
    const int m = static_cast<int>(sys.to_full.size());
    std::vector<double> diag(m, 0.0);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * g.edges().size() + m);
    for (const Edge& e : g.edges()) {
        const int ru = sys.to_reduced[e.u];
        const int rv = sys.to_reduced[e.v];
        if (ru >= 0 && rv >= 0) {
            trips.emplace_back(ru, rv, -e.w);
            trips.emplace_back(rv, ru, -e.w);
            diag[ru] += e.w;
            diag[rv] += e.w;
        } else if (reduction == Reduction::grounded) {
            if (ru >= 0) diag[ru] += e.w;
            if (rv >= 0) diag[rv] += e.w;
        }
    }
    for (int r = 0; r < m; ++r) trips.emplace_back(r, r, diag[r] + g.self_weight(sys.to_full[r]));
    sys.A.resize(m, m);
    sys.A.setFromTriplets(trips.begin(), trips.end());
    return sys;
}

}  // namespace detail

// Solver for the steady-state system (L + W) z = rhs, W = diag(self-weights).
// The matrix is SPD, so a dense Cholesky factorization is used up to
// kDenseLimit nodes and conjugate gradients on the sparse system above that.
// The factorization is reusable across right-hand sides.
class FjSolver {
public:
    static constexpr int kDenseLimit = 2000;

    explicit FjSolver(const Graph& g, const std::vector<std::uint8_t>* active = nullptr,
                      detail::Reduction reduction = detail::Reduction::induced_subgraph)
        : g_(&g), sys_(detail::build_system(g, active, reduction)) {
        const int m = static_cast<int>(sys_.to_full.size());
        if (m <= kDenseLimit) {
            dense_ = std::make_unique<Eigen::LLT<Eigen::MatrixXd>>(Eigen::MatrixXd(sys_.A));
            if (dense_->info() != Eigen::Success) throw NumericalFailure("Cholesky factorization failed");
        } else {
            cg_ = std::make_unique<Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                                                            Eigen::Lower | Eigen::Upper>>();
            cg_->setTolerance(1e-13);
            cg_->setMaxIterations(20L * m + 100);
            cg_->compute(sys_.A);
        }
    }

    int full_size() const { return g_->node_count(); }
    int reduced_size() const { return static_cast<int>(sys_.to_full.size()); }

    // Solves (L+W) z = rhs over the active set; inactive entries of z are 0.
    Vec solve_rhs(const Vec& rhs) const {
        if (rhs.size() != g_->node_count()) throw InvalidInput("rhs length != node count");
        const int m = reduced_size();
        Vec b(m);
        for (int r = 0; r < m; ++r) b[r] = rhs[sys_.to_full[r]];
        Vec x;
        if (dense_) {
            x = dense_->solve(b);
        } else {
            x = cg_->solve(b);
            if (cg_->info() != Eigen::Success && cg_->error() > 1e-10)
                throw NumericalFailure("conjugate gradient did not converge");
        }
        double resid = m > 0 ? (sys_.A * x - b).cwiseAbs().maxCoeff() : 0.0;
        if (!std::isfinite(resid) || resid > 1e-8) throw NumericalFailure("solve residual too large");
        Vec z = Vec::Zero(g_->node_count());
        for (int r = 0; r < m; ++r) z[sys_.to_full[r]] = x[r];
        return z;
    }

    // Steady state for internal opinions s: rhs_i = w_ii * s_i.
    Vec solve_internal(const Vec& s) const {
        if (s.size() != g_->node_count()) throw InvalidInput("opinion length != node count");
        Vec rhs(s.size());
        for (int i = 0; i < s.size(); ++i) rhs[i] = g_->self_weight(i) * s[i];
        return solve_rhs(rhs);
    }

private:
    const Graph* g_;
    detail::ReducedSystem sys_;
    std::unique_ptr<Eigen::LLT<Eigen::MatrixXd>> dense_;
    std::unique_ptr<Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper>>
        cg_;
};

// z = (L+W)^{-1} W s, direct solve.
inline Vec solve_fj_direct(const Graph& g, const Vec& s,
                           const std::vector<std::uint8_t>* active = nullptr) {
    FjSolver solver(g, active, detail::Reduction::induced_subgraph);
    return solver.solve_internal(s);
}

// Fixed-point iteration of the expressed-opinion update
//   z_i <- (w_ii s_i + sum_j w_ij z_j) / (w_ii + sum_j w_ij)
// starting from z = s, until the sup-norm step falls below tol.
inline Vec solve_fj_iterative(const Graph& g, const Vec& s, double tol = 1e-10,
                              int max_iters = 1000000) {
    if (s.size() != g.node_count()) throw InvalidInput("opinion length != node count");
    if (tol <= 0) throw InvalidInput("tol must be positive");
    const int n = g.node_count();
    Vec z = s, next(n);
    for (int it = 0; it < max_iters; ++it) {
        double delta = 0;
        for (int i = 0; i < n; ++i) {
            double num = g.self_weight(i) * s[i];
            double den = g.self_weight(i);
            for (const Neighbor& nb : g.neighbors(i)) {
                num += nb.w * z[nb.id];
                den += nb.w;
            }
            next[i] = num / den;
            delta = std::max(delta, std::abs(next[i] - z[i]));
        }
        z.swap(next);
        if (delta < tol) return z;
    }
    throw NonConvergedIterate("fixed-point iteration exceeded " + std::to_string(max_iters) + " iterations",
                              z);
}

// Expressed-opinion steady state with z pinned to 0 on fixed_zero: grounded
// principal-submatrix solve over the free nodes.
inline Vec solve_me_constrained(const Graph& g, const Vec& s,
                                const std::vector<std::uint8_t>& fixed_zero) {
    if (s.size() != g.node_count()) throw InvalidInput("opinion length != node count");
    if (static_cast<int>(fixed_zero.size()) != g.node_count())
        throw InvalidInput("fixed_zero mask length != node count");
    std::vector<std::uint8_t> free_mask(fixed_zero.size());
    for (std::size_t i = 0; i < fixed_zero.size(); ++i) free_mask[i] = fixed_zero[i] ? 0 : 1;
    FjSolver solver(g, &free_mask, detail::Reduction::grounded);
    return solver.solve_internal(s);
}

// Biased-assimilation update in the [0,1] opinion domain:
//   x_i <- (w_ii x_i + x_i^b m_i) / (w_ii + x_i^b m_i + (1-x_i)^b (d_i - m_i)),
// with m_i the weighted neighbor opinion mass and d_i the weighted degree.
// Opinions map affinely between [-1,1] and [0,1] so the neutral value 0 sits
// at x = 1/2.
inline IterativeResult solve_bias_assimilation(const Graph& g, const Vec& s, const BiasConfig& cfg) {
    if (s.size() != g.node_count()) throw InvalidInput("opinion length != node count");
    if (cfg.b < 0) throw InvalidInput("bias exponent must be nonnegative");
    if (cfg.tol <= 0 || cfg.max_iters < 1) throw InvalidInput("bad bias iteration parameters");
    const int n = g.node_count();
    Vec x(n), wdeg(n);
    for (int i = 0; i < n; ++i) {
        x[i] = (s[i] + 1.0) / 2.0;
        wdeg[i] = g.weighted_degree(i);
    }
    Vec next(n);
    IterativeResult res;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        double delta = 0;
        for (int i = 0; i < n; ++i) {
            double mass = 0;
            for (const Neighbor& nb : g.neighbors(i)) mass += nb.w * x[nb.id];
            const double conf = std::pow(x[i], cfg.b);
            const double disc = std::pow(1.0 - x[i], cfg.b);
            const double num = g.self_weight(i) * x[i] + conf * mass;
            const double den = g.self_weight(i) + conf * mass + disc * (wdeg[i] - mass);
            double xi = num / den;
            if (!std::isfinite(xi)) throw NumericalFailure("biased assimilation produced non-finite value");
            if (xi < 0.0) {
                if (xi < -1e-12) throw NumericalFailure("biased assimilation iterate left [0,1]");
                xi = 0.0;
            } else if (xi > 1.0) {
                if (xi > 1.0 + 1e-12) throw NumericalFailure("biased assimilation iterate left [0,1]");
                xi = 1.0;
            }
            next[i] = xi;
            delta = std::max(delta, std::abs(xi - x[i]));
        }
        x.swap(next);
        if (delta < cfg.tol) {
            res.z = 2.0 * x.array() - 1.0;
            res.iters = it;
            res.converged = true;
            return res;
        }
    }
    res.z = 2.0 * x.array() - 1.0;
    res.iters = cfg.max_iters;
    res.converged = false;
    return res;
}

// Evolving environment state: internal opinions, settled expressed opinions,
// ME pins and removed nodes. z is recomputed lazily via settle().
struct OpinionState {
    Vec s;
    Vec z;
    std::vector<std::uint8_t> fixed_zero;
    std::vector<std::uint8_t> removed;
    bool dirty = true;

    static OpinionState initial(const Instance& inst) {
        OpinionState st;
        st.s = inst.s0;
        st.z = Vec::Zero(inst.n());
        st.fixed_zero.assign(inst.n(), 0);
        st.removed.assign(inst.n(), 0);
        st.dirty = true;
        return st;
    }

    std::vector<std::uint8_t> active_mask() const {
        std::vector<std::uint8_t> a(removed.size());
        for (std::size_t i = 0; i < removed.size(); ++i) a[i] = removed[i] ? 0 : 1;
        return a;
    }
};

// Settles the expressed opinions for the given task variant, caches the
// result in state.z and bumps the instrumentation counter.
inline const Vec& settle(OpinionState& state, const Graph& g, Variant variant,
                         const std::optional<BiasConfig>& bias = std::nullopt,
                         const FjSolver* cached_solver = nullptr) {
    for (std::size_t i = 0; i < state.fixed_zero.size(); ++i)
        if (state.fixed_zero[i] && state.removed[i]) throw StateError("node both pinned and removed");
    settle_call_counter().fetch_add(1, std::memory_order_relaxed);
    switch (family(variant)) {
        case ActionFamily::internal:
            if (uses_bias_dynamics(variant)) {
                state.z = solve_bias_assimilation(g, state.s, bias.value_or(BiasConfig{})).z;
            } else if (cached_solver) {
                state.z = cached_solver->solve_internal(state.s);
            } else {
                state.z = solve_fj_direct(g, state.s);
            }
            break;
        case ActionFamily::expressed:
            state.z = solve_me_constrained(g, state.s, state.fixed_zero);
            break;
        case ActionFamily::removal: {
            auto active = state.active_mask();
            state.z = solve_fj_direct(g, state.s, &active);
            break;
        }
    }
    state.dirty = false;
    return state.z;
}

// Influence operator Q = (L+W)^{-1} W of the untouched instance graph.
// Supplies columns q_i (the expressed-opinion response to unit internal
// opinion at i), applications Q r, and all column norms. Columns are
// obtained by linear solves against a single cached factorization; the full
// inverse is materialized only on the dense path.
class InfluenceOperator {
public:
    explicit InfluenceOperator(const Graph& g) : g_(&g), solver_(g) {}

    int n() const { return g_->node_count(); }

    Vec column(int i) {
        if (i < 0 || i >= n()) throw InvalidInput("column index out of range");
        auto it = col_cache_.find(i);
        if (it != col_cache_.end()) return it->second;
        Vec e = Vec::Zero(n());
        e[i] = g_->self_weight(i);
        Vec q = solver_.solve_rhs(e);
        col_cache_.emplace(i, q);
        return q;
    }

    // Q r; by symmetry of (L+W)^{-1}, (Q r)_i = <r, (L+W)^{-1} e_i> * w_ii
    // only when W = I. We want <r, q_i> for scoring, so apply the adjoint:
    // <r, q_i> = <r, (L+W)^{-1} W e_i> = w_ii * ((L+W)^{-1} r)_i.
    Vec column_dots(const Vec& r) const {
        Vec x = solver_.solve_rhs(r);
        Vec out(n());
        for (int i = 0; i < n(); ++i) out[i] = g_->self_weight(i) * x[i];
        return out;
    }

    // ||q_i||^2 for every i, computed once (n solves against the cached
    // factorization).
    const Vec& col_sqnorms() {
        if (sqnorms_.size() == 0) {
            sqnorms_.resize(n());
            for (int i = 0; i < n(); ++i) sqnorms_[i] = column(i).squaredNorm();
            if (n() > 256) col_cache_.clear();  // keep memory bounded at scale
        }
        return sqnorms_;
    }

private:
    const Graph* g_;
    FjSolver solver_;
    std::map<int, Vec> col_cache_;
    Vec sqnorms_;
};

}  // namespace pacifier
