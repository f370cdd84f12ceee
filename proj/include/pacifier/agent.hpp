#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "pacifier/baselines.hpp"
#include "pacifier/encoder.hpp"
#include "pacifier/environment.hpp"
#include "pacifier/errors.hpp"
#include "pacifier/instance.hpp"
#include "pacifier/neural.hpp"
#include "pacifier/rng.hpp"
#include "pacifier/synthgen.hpp"

namespace pacifier {

constexpr double kMaskPenalty = 1e9;

// State-action interaction of node and graph embeddings, concatenated with
// the aux features and mapped through the shared MLP. Returns the n x 1
// pre-mask Q node. The scalar form is the algebraic reduction of
// (h_v g^T) w; the element-wise form keeps per-dimension products.
inline int decode_q_on_tape(nn::Tape& tape, PolicyParams& pp, const EncodingNodes& enc,
                            const AuxFeatures& aux, int n) {
    const int w = tape.param(pp.w_bilinear);  // 1 x d
    int z;
    if (pp.enc.elementwise_decoder) {
        z = tape.mul_rows(tape.mul_rows(enc.h, enc.g), w);
    } else {
        const int alpha = tape.matmul_nt(enc.g, w);  // 1x1: g . w
        z = tape.scale_by_scalar(enc.h, alpha);
    }
    nn::Mat urow(1, 6);
    for (int j = 0; j < 6; ++j) urow(0, j) = aux[j];
    const int cat = tape.concat_cols(z, tape.broadcast_row(tape.input(urow), n));
    const int h1 = tape.relu(tape.add_bias(tape.matmul_nt(cat, tape.param(pp.mlp1_w)),
                                           tape.param(pp.mlp1_b)));
    const int h2 = tape.relu(tape.add_bias(tape.matmul_nt(h1, tape.param(pp.mlp2_w)),
                                           tape.param(pp.mlp2_b)));
    return tape.add_bias(tape.matmul_nt(h2, tape.param(pp.mlp3_w)), tape.param(pp.mlp3_b));
}

// Full forward pass: feasibility-masked Q for every node, one batched
// evaluation. Infeasible nodes receive a large negative offset so they can
// never win the argmax against the bounded network outputs.
inline Vec q_values(PolicyParams& pp, const Instance& inst, const PlanningState& st) {
    nn::Tape tape(&pp.store);
    const nn::Mat features = build_node_features(inst, st);
    const AuxFeatures aux = build_aux_features(inst, st);
    const EncodingNodes enc = encode_on_tape(tape, pp, features, inst.graph, st.active);
    const int qn = decode_q_on_tape(tape, pp, enc, aux, inst.n());
    Vec q = tape.value(qn).col(0);
    for (int v = 0; v < inst.n(); ++v)
        if (st.marked[v]) q[v] -= kMaskPenalty;
    return q;
}

// Epsilon-greedy over feasible nodes; argmax ties break to the lowest id.
inline int select_action(const Vec& q, const std::vector<std::uint8_t>& feasible, double eps,
                         RngStream& rng) {
    std::vector<int> candidates;
    for (std::size_t v = 0; v < feasible.size(); ++v)
        if (feasible[v]) candidates.push_back(static_cast<int>(v));
    if (candidates.empty()) throw EpisodeDone("no feasible action");
    if (eps > 0 && rng.uniform01() < eps)
        return candidates[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(candidates.size()) - 1))];
    int best = candidates[0];
    for (int v : candidates)
        if (q[v] > q[best]) best = v;
    return best;
}

// State snapshot for replay: everything needed to re-encode under current
// parameters. Immutable once stored.
struct StateSnapshot {
    std::shared_ptr<const Instance> inst;
    PlanningState pstate;
};

struct Transition {
    StateSnapshot state;
    int action = -1;
    double nstep_return = 0;
    bool terminal = false;
    StateSnapshot next;  // state after n more steps; unset when terminal
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(int capacity) : capacity_(capacity) {
        if (capacity < 1) throw InvalidInput("replay capacity must be positive");
    }

    void push(Transition t) {
        if (static_cast<int>(data_.size()) < capacity_) {
            data_.push_back(std::move(t));
        } else {
            data_[write_pos_] = std::move(t);
        }
        write_pos_ = (write_pos_ + 1) % capacity_;
    }

    int size() const { return static_cast<int>(data_.size()); }

    const Transition& sample_one(RngStream& rng) const {
        if (data_.empty()) throw StateError("sampling from empty replay buffer");
        return data_[static_cast<std::size_t>(rng.uniform_int(0, size() - 1))];
    }

private:
    int capacity_;
    std::size_t write_pos_ = 0;
    std::vector<Transition> data_;
};

struct EpisodeStep {
    StateSnapshot state;
    int action;
    double reward;
};

// Converts one finished episode into replay entries with truncated n-step
// returns R = sum_{i<n} gamma^i r_{t+i}. Entries whose lookahead crosses the
// episode end are terminal: the bootstrap term is dropped.
inline void push_nstep(const std::vector<EpisodeStep>& steps, const StateSnapshot& final_state,
                       double gamma, int n, ReplayBuffer& buffer) {
    if (n < 1) throw InvalidInput("n_step must be >= 1");
    const int T = static_cast<int>(steps.size());
    for (int t = 0; t < T; ++t) {
        Transition tr;
        tr.state = steps[t].state;
        tr.action = steps[t].action;
        double ret = 0, disc = 1;
        const int horizon = std::min(n, T - t);
        for (int i = 0; i < horizon; ++i) {
            ret += disc * steps[t + i].reward;
            disc *= gamma;
        }
        tr.nstep_return = ret;
        tr.terminal = (t + n >= T);
        if (!tr.terminal)
            tr.next = steps[t + n].state;
        else
            tr.next = final_state;
        buffer.push(std::move(tr));
    }
}

struct AgentConfig {
    double gamma = 0.99;
    int n_step = 5;
    double eps_start = 1.0;
    double eps_end = 0.05;
    int eps_decay_episodes = 0;  // 0: anneal over 70% of the episodes
    double lr = 1e-4;
    int batch = 64;
    int target_sync_every = 1000;  // gradient steps between target refreshes
    int episodes = 2000;
    int replay_capacity = 50000;
    int grad_steps_per_episode = 2;
    int min_buffer_fill = 200;
    double budget_frac_min = 0.10;  // per-episode budget as a fraction of n
    double budget_frac_max = 0.30;
    int val_every = 50;  // 0 disables validation
    int val_instances = 10;
    bool greedy_variant = false;  // uniform rollouts, y = r, no bootstrap
    // Multiplies rewards inside the learning targets. Q scales linearly with
    // it, so greedy argmax policies are unaffected; it only conditions the
    // regression (raw rewards are O(pi/C), far below the initial output
    // scale of the network).
    double target_scale = 1.0;
    EncoderConfig enc;
    std::uint64_t seed = 1;

    void validate() const {
        if (gamma <= 0 || gamma > 1) throw InvalidInput("gamma must be in (0, 1]");
        if (n_step < 1) throw InvalidInput("n_step must be >= 1");
        if (eps_end < 0 || eps_start < eps_end || eps_start > 1)
            throw InvalidInput("need 0 <= eps_end <= eps_start <= 1");
        if (episodes < 1 || batch < 1 || grad_steps_per_episode < 0)
            throw InvalidInput("bad training loop sizes");
        if (budget_frac_min <= 0 || budget_frac_max < budget_frac_min || budget_frac_max > 1)
            throw InvalidInput("bad budget fraction range");
    }
};

struct TrainLogRow {
    int episode = 0;
    double epsilon = 0;
    double loss = std::numeric_limits<double>::quiet_NaN();  // mean over the episode's updates
    double val_anp = std::numeric_limits<double>::quiet_NaN();
    int grad_steps_total = 0;
};

// Greedy feed-forward deployment: encode, score, argmax, mark, repeat.
// Consumes only the initial instance and its own prefix marks; triggers no
// steady-state computation.
inline Plan deploy(const Instance& inst, PolicyParams& pp, bool greedy_variant = false) {
    if (inst.budget > inst.n()) throw InvalidBudget("budget exceeds node count");
    PlanningState st = PlanningState::initial(inst);
    Plan plan;
    plan.method = greedy_variant ? "pacifier-greedy" : "pacifier-rl";
    for (int t = 0; t < inst.budget; ++t) {
        const Vec q = q_values(pp, inst, st);
        int best = -1;
        for (int v = 0; v < inst.n(); ++v) {
            if (!st.feasible(v)) continue;
            if (best < 0 || q[v] > q[best]) best = v;
        }
        if (best < 0) break;
        plan.actions.push_back(best);
        plan.scores.push_back(q[best]);
        st.apply(inst, best);
    }
    return plan;
}

// n-step TD target: R + gamma^n max_a' Q_target(s', a') over feasible a',
// or the bare truncated return on terminal entries. The greedy variant never
// bootstraps (y = r).
inline double td_target(const Transition& tr, PolicyParams& target, const AgentConfig& cfg) {
    double y = cfg.target_scale * tr.nstep_return;
    if (!cfg.greedy_variant && !tr.terminal) {
        const Vec qn = q_values(target, *tr.next.inst, tr.next.pstate);
        double qmax = -std::numeric_limits<double>::infinity();
        for (int v = 0; v < tr.next.inst->n(); ++v)
            if (!tr.next.pstate.marked[v]) qmax = std::max(qmax, qn[v]);
        if (std::isfinite(qmax)) y += std::pow(cfg.gamma, cfg.n_step) * qmax;
    }
    return y;
}

namespace detail {

inline double validation_anp(PolicyParams& pp, const AgentConfig& cfg,
                             const std::vector<std::shared_ptr<const Instance>>& val_set) {
    double sum = 0;
    for (const auto& inst : val_set) {
        Plan p = deploy(*inst, pp, cfg.greedy_variant);
        sum += evaluate_plan(inst, p.actions).anp;
    }
    return val_set.empty() ? std::numeric_limits<double>::quiet_NaN()
                           : sum / static_cast<double>(val_set.size());
}

inline int pick_budget(int n, const AgentConfig& cfg, RngStream& rng) {
    const double f = rng.uniform(cfg.budget_frac_min, cfg.budget_frac_max);
    return std::clamp(static_cast<int>(std::lround(f * n)), 1, n);
}

}  // namespace detail

// Trains the policy in place. RL variant: epsilon-greedy rollouts, replay
// with n-step targets against a periodically synced target network. Greedy
// variant: uniform rollouts, y = r, no target network. Throws
// TrainingDiverged after restoring the last finite parameter snapshot.
inline std::vector<TrainLogRow> train(PolicyParams& pp, const GenConfig& gen, const AgentConfig& cfg,
                                      Variant task) {
    cfg.validate();
    RngStream root(cfg.seed);
    RngStream gen_rng = root.substream(1);
    RngStream rollout_rng = root.substream(2);
    RngStream sample_rng = root.substream(3);
    RngStream val_rng = root.substream(4);

    std::vector<std::shared_ptr<const Instance>> val_set;
    for (int i = 0; i < cfg.val_instances; ++i) {
        GeneratedInstance gi = generate_instance(gen, val_rng, task);
        gi.instance.budget = detail::pick_budget(gi.instance.n(), cfg, val_rng);
        val_set.push_back(std::make_shared<Instance>(std::move(gi.instance)));
    }

    PolicyParams target = pp;  // value snapshot for bootstrapped targets
    std::vector<nn::Mat> last_good = pp.store.snapshot_values();
    ReplayBuffer buffer(cfg.replay_capacity);
    std::vector<TrainLogRow> log;
    const int decay_eps =
        cfg.eps_decay_episodes > 0 ? cfg.eps_decay_episodes : std::max(1, (cfg.episodes * 7) / 10);
    int grad_steps = 0;

    for (int ep = 1; ep <= cfg.episodes; ++ep) {
        double eps = 0.0;
        if (!cfg.greedy_variant) {
            const double frac = std::min(1.0, static_cast<double>(ep - 1) / decay_eps);
            eps = cfg.eps_start + frac * (cfg.eps_end - cfg.eps_start);
        }

        GeneratedInstance gi = generate_instance(gen, gen_rng, task);
        gi.instance.budget = detail::pick_budget(gi.instance.n(), cfg, gen_rng);
        auto inst = std::make_shared<const Instance>(std::move(gi.instance));
        Env env(inst);

        std::vector<EpisodeStep> steps;
        while (!env.done()) {
            StateSnapshot snap{inst, env.planning_state()};
            int a;
            if (cfg.greedy_variant) {
                a = select_action(Vec::Zero(inst->n()), env.feasible_mask(), 1.0, rollout_rng);
            } else {
                const Vec q = q_values(pp, *inst, env.planning_state());
                a = select_action(q, env.feasible_mask(), eps, rollout_rng);
            }
            StepResult r = env.step(a);
            steps.push_back({std::move(snap), a, r.reward});
        }
        StateSnapshot final_snap{inst, env.planning_state()};
        if (cfg.greedy_variant)
            push_nstep(steps, final_snap, cfg.gamma, 1, buffer);  // 1-step tuples, y = r
        else
            push_nstep(steps, final_snap, cfg.gamma, cfg.n_step, buffer);

        TrainLogRow row;
        row.episode = ep;
        row.epsilon = eps;
        double loss_sum = 0;
        int updates = 0;
        if (buffer.size() >= std::max(cfg.batch, cfg.min_buffer_fill)) {
            for (int gstep = 0; gstep < cfg.grad_steps_per_episode; ++gstep) {
                pp.store.zero_grad();
                double batch_loss = 0;
                for (int b = 0; b < cfg.batch; ++b) {
                    const Transition& tr = buffer.sample_one(sample_rng);
                    const double y = td_target(tr, target, cfg);
                    nn::Tape tape(&pp.store);
                    const nn::Mat features = build_node_features(*tr.state.inst, tr.state.pstate);
                    const AuxFeatures aux = build_aux_features(*tr.state.inst, tr.state.pstate);
                    const EncodingNodes enc = encode_on_tape(tape, pp, features, tr.state.inst->graph,
                                                             tr.state.pstate.active);
                    const int qnode = decode_q_on_tape(tape, pp, enc, aux, tr.state.inst->n());
                    const int qa = tape.pick(qnode, tr.action, 0);
                    const int sq = tape.square(tape.add_const(qa, -y));
                    batch_loss += tape.value(sq)(0, 0);
                    tape.backward(tape.mul_const(sq, 1.0 / cfg.batch));
                }
                batch_loss /= cfg.batch;
                if (!std::isfinite(batch_loss)) {
                    pp.store.load_values(last_good);
                    throw TrainingDiverged("non-finite loss at episode " + std::to_string(ep));
                }
                pp.store.adam_step(cfg.lr);
                loss_sum += batch_loss;
                ++updates;
                ++grad_steps;
                if (!cfg.greedy_variant && grad_steps % cfg.target_sync_every == 0) {
                    if (pp.store.finite()) last_good = pp.store.snapshot_values();
                    target.store.load_values(pp.store.snapshot_values());
                }
            }
        }
        if (updates > 0) row.loss = loss_sum / updates;
        row.grad_steps_total = grad_steps;
        if (cfg.val_every > 0 && (ep % cfg.val_every == 0 || ep == cfg.episodes))
            row.val_anp = detail::validation_anp(pp, cfg, val_set);
        log.push_back(row);
    }
    return log;
}

}  // namespace pacifier
