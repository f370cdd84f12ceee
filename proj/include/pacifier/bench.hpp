#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pacifier/agent.hpp"
#include "pacifier/baselines.hpp"
#include "pacifier/csv.hpp"
#include "pacifier/environment.hpp"
#include "pacifier/errors.hpp"
#include "pacifier/svg.hpp"

namespace pacifier {

enum class Method {
    random_pick,
    pagerank,
    extreme_expressed,
    extreme_neighbours,
    bomp,
    exhaustive,
    pacifier_rl,
    pacifier_greedy,
};

inline std::string method_name(Method m) {
    switch (m) {
        case Method::random_pick: return "random";
        case Method::pagerank: return "pagerank";
        case Method::extreme_expressed: return "extreme-expressed";
        case Method::extreme_neighbours: return "extreme-neighbours";
        case Method::bomp: return "bomp";
        case Method::exhaustive: return "exhaustive";
        case Method::pacifier_rl: return "pacifier-rl";
        case Method::pacifier_greedy: return "pacifier-greedy";
    }
    return "?";
}

inline Method method_from_name(const std::string& name) {
    for (Method m : {Method::random_pick, Method::pagerank, Method::extreme_expressed,
                     Method::extreme_neighbours, Method::bomp, Method::exhaustive,
                     Method::pacifier_rl, Method::pacifier_greedy})
        if (method_name(m) == name) return m;
    throw InvalidInput("unknown method '" + name + "'");
}

// Everything a one-shot planner may consume: the initial instance, its
// settled opinions, trained policies and a seed stream for the random
// baseline. The exhaustive oracle is the one exception; it replays
// sequences through the environment by design.
struct PlannerContext {
    std::shared_ptr<const Instance> inst;
    Vec z0;
    PolicyParams* rl = nullptr;
    PolicyParams* greedy = nullptr;
    std::uint64_t seed = 1;
};

inline Plan run_planner(Method m, const PlannerContext& ctx) {
    switch (m) {
        case Method::random_pick: {
            RngStream rng(ctx.seed);
            return plan_random(*ctx.inst, rng);
        }
        case Method::pagerank:
            return plan_pagerank(*ctx.inst);
        case Method::extreme_expressed:
            return plan_extreme_expressed(*ctx.inst, ctx.z0);
        case Method::extreme_neighbours:
            return plan_extreme_neighbours(*ctx.inst, ctx.z0);
        case Method::bomp:
            return plan_bomp(*ctx.inst, ctx.z0);
        case Method::exhaustive:
            return plan_exhaustive(*ctx.inst);
        case Method::pacifier_rl:
            if (!ctx.rl) throw InvalidInput("pacifier-rl requires a checkpoint");
            return deploy(*ctx.inst, *ctx.rl, false);
        case Method::pacifier_greedy:
            if (!ctx.greedy) throw InvalidInput("pacifier-greedy requires a checkpoint");
            return deploy(*ctx.inst, *ctx.greedy, true);
    }
    throw InvalidInput("unhandled method");
}

struct BenchInstance {
    std::string name;
    std::shared_ptr<const Instance> inst;
};

struct ExperimentConfig {
    std::vector<BenchInstance> instances;
    std::vector<Method> methods;
    std::vector<std::uint64_t> seeds = {1};
    PolNorm pol_norm = PolNorm::paper;
    std::string checkpoint_rl;
    std::string checkpoint_greedy;
    std::string output_dir = ".";
    bool write_trajectories = true;

    void validate() const {
        if (instances.empty()) throw InvalidInput("benchmark needs at least one instance");
        if (methods.empty()) throw InvalidInput("benchmark needs at least one method");
        if (seeds.empty()) throw InvalidInput("benchmark needs at least one seed");
    }
};

struct ResultRow {
    std::string dataset;
    std::string method;
    std::uint64_t seed = 0;
    int n = 0;
    int k = 0;
    double anp = 0;
    double final_pol = 0;
    long long wall_time_ms = 0;
    bool ok = false;
    std::string error;
};

struct BenchOutput {
    std::vector<ResultRow> rows;
    std::vector<Trajectory> trajectories;  // parallel to rows; empty on failure
    int failures = 0;
};

inline int bench_thread_count() {
    const char* env = std::getenv("PACIFIER_THREADS");
    if (!env) return 1;
    const int t = std::atoi(env);
    return t < 1 ? 1 : t;
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    CsvWriter csv(path, {"t", "x", "pol", "pol_hat", "cost_spent", "action"});
    const int k = static_cast<int>(traj.actions.size());
    for (int t = 0; t <= k; ++t) {
        csv.row({csv_num(t), csv_num(k > 0 ? static_cast<double>(t) / k : 0.0),
                 csv_num(traj.pol_raw[t]), csv_num(traj.pol_hat[t]), csv_num(traj.costs_spent[t]),
                 t == 0 ? "" : csv_num(traj.actions[t - 1])});
    }
}

// Full sweep over (instance x method x seed). Each run plans once and
// evaluates once; failures are recorded per row and do not stop the sweep.
// Rows are ordered by run index, so output is independent of thread timing.
inline BenchOutput run_benchmark(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);

    std::optional<PolicyParams> rl, greedy;
    if (!cfg.checkpoint_rl.empty()) rl.emplace(load_policy(cfg.checkpoint_rl));
    if (!cfg.checkpoint_greedy.empty()) greedy.emplace(load_policy(cfg.checkpoint_greedy));

    // settle each instance once; z0 is part of the planners' input
    std::vector<Vec> z0s(cfg.instances.size());
    for (std::size_t i = 0; i < cfg.instances.size(); ++i) {
        Env env(cfg.instances[i].inst);
        z0s[i] = env.z();
    }

    struct Run {
        std::size_t inst_idx, method_idx, seed_idx;
    };
    std::vector<Run> runs;
    for (std::size_t i = 0; i < cfg.instances.size(); ++i)
        for (std::size_t m = 0; m < cfg.methods.size(); ++m)
            for (std::size_t s = 0; s < cfg.seeds.size(); ++s) runs.push_back({i, m, s});

    BenchOutput out;
    out.rows.resize(runs.size());
    out.trajectories.resize(runs.size());

    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};
    auto worker = [&]() {
        // thread-local policy copies: forwarding is read-only but cheap to isolate
        std::optional<PolicyParams> rl_local = rl, greedy_local = greedy;
        while (true) {
            const std::size_t r = next.fetch_add(1);
            if (r >= runs.size()) break;
            const Run& run = runs[r];
            const BenchInstance& bi = cfg.instances[run.inst_idx];
            const Method method = cfg.methods[run.method_idx];
            ResultRow& row = out.rows[r];
            row.dataset = bi.name;
            row.method = method_name(method);
            row.seed = cfg.seeds[run.seed_idx];
            row.n = bi.inst->n();
            row.k = bi.inst->budget;
            try {
                PlannerContext ctx;
                ctx.inst = bi.inst;
                ctx.z0 = z0s[run.inst_idx];
                ctx.rl = rl_local ? &*rl_local : nullptr;
                ctx.greedy = greedy_local ? &*greedy_local : nullptr;
                ctx.seed = RngStream(row.seed).substream(run.inst_idx * 131 + run.method_idx).seed();
                const auto t0 = std::chrono::steady_clock::now();
                Plan plan = run_planner(method, ctx);
                Trajectory traj = evaluate_plan(bi.inst, plan.actions, cfg.pol_norm);
                const auto t1 = std::chrono::steady_clock::now();
                row.wall_time_ms =
                    std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
                row.anp = traj.anp;
                row.final_pol = traj.pol_raw.back();
                row.ok = true;
                out.trajectories[r] = std::move(traj);
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
                failures.fetch_add(1);
            }
        }
    };

    const int threads = bench_thread_count();
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    out.failures = failures.load();

    if (cfg.write_trajectories) {
        for (std::size_t r = 0; r < runs.size(); ++r) {
            if (!out.rows[r].ok) continue;
            const std::string path = cfg.output_dir + "/traj_" + out.rows[r].dataset + "_" +
                                     out.rows[r].method + "_seed" + std::to_string(out.rows[r].seed) +
                                     ".csv";
            write_trajectory_csv(path, out.trajectories[r]);
        }
    }
    return out;
}

inline void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    CsvWriter csv(path, {"dataset", "method", "seed", "n", "k", "anp", "final_pol", "wall_time_ms"});
    for (const ResultRow& r : rows) {
        if (!r.ok) continue;
        csv.row({r.dataset, r.method, std::to_string(r.seed), csv_num(r.n), csv_num(r.k),
                 csv_num(r.anp), csv_num(r.final_pol), csv_num(static_cast<long long>(r.wall_time_ms))});
    }
}

inline void write_errors_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    CsvWriter csv(path, {"dataset", "method", "seed", "error"});
    for (const ResultRow& r : rows)
        if (!r.ok) csv.row({r.dataset, r.method, std::to_string(r.seed), r.error});
}

// Bar chart + heatmap of mean anp per dataset x method, and one trajectory
// chart per dataset (first seed of each method). No rows, no files.
inline bool emit_plots(const BenchOutput& out, const std::string& out_dir) {
    std::vector<std::string> datasets, methods;
    std::map<std::string, std::size_t> dataset_idx, method_idx;
    for (const ResultRow& r : out.rows) {
        if (!r.ok) continue;
        if (!dataset_idx.count(r.dataset)) {
            dataset_idx[r.dataset] = datasets.size();
            datasets.push_back(r.dataset);
        }
        if (!method_idx.count(r.method)) {
            method_idx[r.method] = methods.size();
            methods.push_back(r.method);
        }
    }
    if (datasets.empty()) return false;
    std::filesystem::create_directories(out_dir);

    std::vector<std::vector<double>> sum(datasets.size(), std::vector<double>(methods.size(), 0));
    std::vector<std::vector<int>> count(datasets.size(), std::vector<int>(methods.size(), 0));
    for (const ResultRow& r : out.rows) {
        if (!r.ok) continue;
        sum[dataset_idx[r.dataset]][method_idx[r.method]] += r.anp;
        ++count[dataset_idx[r.dataset]][method_idx[r.method]];
    }
    for (std::size_t d = 0; d < datasets.size(); ++d)
        for (std::size_t m = 0; m < methods.size(); ++m)
            if (count[d][m]) sum[d][m] /= count[d][m];

    svg_bar_chart(out_dir + "/anp_bars.svg", datasets, methods, sum);
    svg_heatmap(out_dir + "/anp_heatmap.svg", datasets, methods, sum);

    for (std::size_t d = 0; d < datasets.size(); ++d) {
        std::map<std::string, std::vector<double>> series;
        for (std::size_t r = 0; r < out.rows.size(); ++r) {
            const ResultRow& row = out.rows[r];
            if (!row.ok || row.dataset != datasets[d]) continue;
            if (series.count(row.method)) continue;  // first seed only
            series[row.method] = out.trajectories[r].pol_hat;
        }
        svg_trajectory_chart(out_dir + "/trajectory_" + datasets[d] + ".svg", series);
    }
    return true;
}

}  // namespace pacifier
