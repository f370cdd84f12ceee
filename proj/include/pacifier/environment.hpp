#pragma once

#include <memory>
#include <set>
#include <vector>

#include "pacifier/dynamics.hpp"
#include "pacifier/errors.hpp"
#include "pacifier/instance.hpp"
#include "pacifier/metrics.hpp"

namespace pacifier {

// Pure bookkeeping view of an intervention prefix: current opinion attribute,
// intervened marks and the activity mask. Everything a planner or the policy
// may legally consume; contains no settled opinions and triggers no solves.
struct PlanningState {
    Vec s_attr;                        // opinion attribute column of the node features
    std::vector<std::uint8_t> marked;  // 1 for already-intervened nodes
    std::vector<std::uint8_t> active;  // 0 for removed nodes (removal task)
    int marked_count = 0;

    static PlanningState initial(const Instance& inst) {
        PlanningState st;
        st.s_attr = inst.s0;
        st.marked.assign(inst.n(), 0);
        st.active.assign(inst.n(), 1);
        st.marked_count = 0;
        return st;
    }

    bool feasible(int v) const { return !marked[v]; }

    std::vector<std::uint8_t> feasible_mask() const {
        std::vector<std::uint8_t> m(marked.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = marked[i] ? 0 : 1;
        return m;
    }

    void apply(const Instance& inst, int v) {
        if (v < 0 || v >= inst.n()) throw InvalidAction("action id out of range");
        if (marked[v]) throw InvalidAction("node already intervened");
        marked[v] = 1;
        ++marked_count;
        switch (family(inst.variant)) {
            case ActionFamily::internal:
            case ActionFamily::expressed:
                s_attr[v] = 0.0;  // neutralized (internal) or pinned (expressed)
                break;
            case ActionFamily::removal:
                active[v] = 0;
                break;
        }
    }
};

struct StepResult {
    double reward = 0;
    double pol = 0;  // pi(z^(t)) after the step
    bool done = false;
};

// MDP environment for one instance. All steady-state computation happens
// here (reset, step); planners see only the initial instance and z^(0).
class Env {
public:
    explicit Env(std::shared_ptr<const Instance> inst) : inst_(std::move(inst)) {
        inst_->validate();
        total_cost_ = inst_->total_cost();
        reset();
    }

    const Vec& reset() {
        ostate_ = OpinionState::initial(*inst_);
        pstate_ = PlanningState::initial(*inst_);
        t_ = 0;
        // The MI-family linear system matrix never changes; factorize once.
        if (family(inst_->variant) == ActionFamily::internal && !uses_bias_dynamics(inst_->variant) &&
            !cached_solver_)
            cached_solver_ = std::make_unique<FjSolver>(inst_->graph);
        settle_current();
        return ostate_.z;
    }

    StepResult step(int a) {
        if (done()) throw InvalidAction("episode already finished");
        if (a < 0 || a >= inst_->n() || !pstate_.feasible(a)) throw InvalidAction("infeasible action");
        switch (family(inst_->variant)) {
            case ActionFamily::internal:
                ostate_.s[a] = 0.0;
                break;
            case ActionFamily::expressed:
                ostate_.fixed_zero[a] = 1;
                break;
            case ActionFamily::removal:
                ostate_.removed[a] = 1;
                break;
        }
        pstate_.apply(*inst_, a);
        ostate_.dirty = true;
        settle_current();
        ++t_;
        StepResult res;
        res.pol = pol_;
        res.reward = -(pol_ / total_cost_) * inst_->costs[a];
        res.done = done();
        return res;
    }

    bool done() const { return t_ >= inst_->budget || pstate_.marked_count >= inst_->n(); }

    const Instance& instance() const { return *inst_; }
    std::shared_ptr<const Instance> instance_ptr() const { return inst_; }
    const OpinionState& opinion_state() const { return ostate_; }
    const PlanningState& planning_state() const { return pstate_; }
    const Vec& z() const { return ostate_.z; }
    double pol() const { return pol_; }
    int t() const { return t_; }

    std::vector<std::uint8_t> feasible_mask() const { return pstate_.feasible_mask(); }

private:
    void settle_current() {
        // Removed nodes are normalized against the original n: their z stays 0,
        // keeping the polarization index comparable along a removal trajectory.
        settle(ostate_, inst_->graph, inst_->variant, inst_->bias, cached_solver_.get());
        pol_ = polarization_index(ostate_.z);
    }

    std::shared_ptr<const Instance> inst_;
    OpinionState ostate_;
    PlanningState pstate_;
    std::unique_ptr<FjSolver> cached_solver_;
    double total_cost_ = 1;
    double pol_ = 0;
    int t_ = 0;
};

// Replays an ordered plan through the environment, recording the
// polarization trajectory and its accumulated score.
inline Trajectory evaluate_plan(std::shared_ptr<const Instance> inst, const std::vector<int>& actions,
                                PolNorm mode = PolNorm::paper) {
    if (actions.empty()) throw InvalidPlan("plan must contain at least one action");
    if (static_cast<int>(actions.size()) > inst->budget)
        throw InvalidPlan("plan longer than the instance budget");
    std::set<int> uniq(actions.begin(), actions.end());
    if (static_cast<int>(uniq.size()) != static_cast<int>(actions.size()))
        throw InvalidPlan("plan contains repeated actions");
    for (int a : actions)
        if (a < 0 || a >= inst->n()) throw InvalidPlan("plan action out of range");

    Env env(inst);
    const int n = inst->n();
    Trajectory traj;
    traj.actions = actions;
    traj.variant = inst->variant;
    traj.pol_raw.push_back(env.pol());
    traj.pol_hat.push_back(env.pol() / n);
    traj.costs_spent.push_back(0.0);
    double spent = 0;
    for (int a : actions) {
        StepResult r = env.step(a);
        spent += inst->costs[a];
        traj.pol_raw.push_back(r.pol);
        traj.pol_hat.push_back(r.pol / n);
        traj.costs_spent.push_back(spent);
    }
    const int k = static_cast<int>(actions.size());
    traj.anp = anp(mode == PolNorm::paper ? traj.pol_hat : traj.pol_raw, k);
    return traj;
}

}  // namespace pacifier
