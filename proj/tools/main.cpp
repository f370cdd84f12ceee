// pacifier: polarization moderation under Friedkin-Johnsen opinion dynamics.
//
// Subcommands: generate, stats, plan, train, evaluate, bench, plot.
// Exit codes: 0 success, 2 configuration/usage error, 3 partial failures.
// PACIFIER_THREADS controls benchmark sweep parallelism (default 1).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pacifier/agent.hpp"
#include "pacifier/baselines.hpp"
#include "pacifier/bench.hpp"
#include "pacifier/config.hpp"
#include "pacifier/csv.hpp"
#include "pacifier/dynamics.hpp"
#include "pacifier/encoder.hpp"
#include "pacifier/environment.hpp"
#include "pacifier/errors.hpp"
#include "pacifier/graph.hpp"
#include "pacifier/ingest.hpp"
#include "pacifier/instance.hpp"
#include "pacifier/metrics.hpp"
#include "pacifier/svg.hpp"
#include "pacifier/synthgen.hpp"

namespace fs = std::filesystem;
using namespace pacifier;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

struct InstanceFlags {
    std::string prefix;     // <prefix>.edges/.opinions/.costs
    std::string edges;      // or edge list + labels
    std::string labels;
    std::string variant = "mi";
    int budget = 0;
    double budget_frac = 0;
    double bias_b = 1.0;
    bool force = false;

    void add_to(CLI::App* cmd, bool need_budget) {
        cmd->add_option("--instance", prefix, "instance file prefix (.edges/.opinions/.costs)");
        cmd->add_option("--edges", edges, "edge list file (u v [w] per line)");
        cmd->add_option("--labels", labels, "camp label file (id camp per line)");
        cmd->add_option("--variant", variant,
                        "task variant: mi|mi-cost|mi-continuous|mi-bias|me|me-cost|me-continuous|node-removal");
        cmd->add_option("--bias-b", bias_b, "confirmation-bias exponent for mi-bias");
        cmd->add_flag("--force", force, "keep disconnected ingested graphs");
        auto* b = cmd->add_option("--budget", budget, "intervention budget k");
        auto* f = cmd->add_option("--budget-frac", budget_frac, "budget as a fraction of n");
        if (need_budget) {
            b->excludes(f);
            f->excludes(b);
        }
    }

    std::shared_ptr<Instance> load() const {
        const Variant v = variant_from_name(variant);
        std::optional<BiasConfig> bias;
        if (uses_bias_dynamics(v)) {
            BiasConfig bc;
            bc.b = bias_b;
            bias = bc;
        }
        Instance inst;
        if (!prefix.empty()) {
            inst = load_instance(prefix, 1, v, bias);
        } else if (!edges.empty() && !labels.empty()) {
            IngestedDataset ds = ingest_dataset(edges, labels, force);
            inst.graph = std::move(ds.graph);
            inst.s0 = ds.s0;
            inst.costs = Vec::Ones(inst.graph.node_count());
            inst.variant = v;
            inst.bias = bias;
        } else {
            throw InvalidInput("need either --instance or --edges + --labels");
        }
        int k = budget;
        if (k == 0 && budget_frac > 0)
            k = std::max(1, static_cast<int>(std::lround(budget_frac * inst.graph.node_count())));
        if (k == 0) k = 1;
        inst.budget = k;
        inst.variant = v;
        inst.validate();
        return std::make_shared<Instance>(std::move(inst));
    }
};

OpinionMode opinion_mode_from(const std::string& s) {
    if (s == "binary") return OpinionMode::binary;
    if (s == "continuous") return OpinionMode::continuous;
    throw InvalidInput("opinion mode must be binary or continuous");
}

CostMode cost_mode_from(const std::string& s) {
    if (s == "unit") return CostMode::unit;
    if (s == "random") return CostMode::random;
    throw InvalidInput("cost mode must be unit or random");
}

PolNorm pol_norm_from(const std::string& s) {
    if (s == "paper") return PolNorm::paper;
    if (s == "raw") return PolNorm::raw;
    throw InvalidInput("pol norm must be paper or raw");
}

GenConfig gen_config_from(const ConfigFile& cfg, const std::string& section) {
    GenConfig gen;
    gen.n_min = static_cast<int>(cfg.get_int(section, "n_min", gen.n_min));
    gen.n_max = static_cast<int>(cfg.get_int(section, "n_max", gen.n_max));
    gen.ba_m_min = static_cast<int>(cfg.get_int(section, "ba_m_min", gen.ba_m_min));
    gen.ba_m_max = static_cast<int>(cfg.get_int(section, "ba_m_max", gen.ba_m_max));
    gen.cross_ratio_min = cfg.get_real(section, "cross_ratio_min", gen.cross_ratio_min);
    gen.cross_ratio_max = cfg.get_real(section, "cross_ratio_max", gen.cross_ratio_max);
    gen.opinion_mode = opinion_mode_from(cfg.get(section, "opinion_mode", "binary"));
    gen.cost_mode = cost_mode_from(cfg.get(section, "cost_mode", "unit"));
    return gen;
}

const std::set<std::string> kGenerateKeys = {"n_min",           "n_max",           "ba_m_min",
                                             "ba_m_max",        "cross_ratio_min", "cross_ratio_max",
                                             "opinion_mode",    "cost_mode"};

// --- generate ------------------------------------------------------------

int cmd_generate(int n_min, int n_max, int count, std::uint64_t seed, const std::string& opinion_mode,
                 const std::string& cost_mode, const std::string& out_dir) {
    GenConfig cfg;
    cfg.n_min = n_min;
    cfg.n_max = n_max;
    cfg.opinion_mode = opinion_mode_from(opinion_mode);
    cfg.cost_mode = cost_mode_from(cost_mode);
    cfg.validate();
    fs::create_directories(out_dir);
    RngStream root(seed);
    CsvWriter manifest(out_dir + "/manifest.csv",
                       {"name", "n", "m", "cross_camp_ratio", "initial_polarization"});
    for (int i = 0; i < count; ++i) {
        RngStream rng = root.substream(i);
        GeneratedInstance gi = generate_instance(cfg, rng);
        char name[32];
        std::snprintf(name, sizeof(name), "inst_%04d", i);
        save_instance(out_dir + "/" + name, gi.instance);
        DatasetStats st = dataset_stats(gi.instance.graph, gi.camps, name);
        manifest.row({name, csv_num(st.n), csv_num(st.m), csv_num(st.cross_camp_ratio),
                      csv_num(st.initial_polarization)});
    }
    std::cout << "wrote " << count << " instances to " << out_dir << "\n";
    return kExitOk;
}

// --- stats ---------------------------------------------------------------

int cmd_stats(const std::string& edges, const std::string& labels, const std::string& name,
              bool force, const std::string& idmap_out) {
    IngestedDataset ds = ingest_dataset(edges, labels, force);
    if (!idmap_out.empty()) {
        std::ofstream out(idmap_out);
        out << "# dense_id original_id\n";
        for (std::size_t i = 0; i < ds.original_ids.size(); ++i)
            out << i << ' ' << ds.original_ids[i] << '\n';
    }
    DatasetStats st = dataset_stats(ds.graph, ds.camps, name.empty() ? fs::path(edges).stem().string()
                                                                     : name);
    std::cout << "dataset,n,m,camp_pos,camp_neg,avg_degree,initial_polarization,cross_camp_ratio,"
                 "avg_degree_pos,avg_degree_neg\n";
    std::cout << st.name << ',' << st.n << ',' << st.m << ',' << st.camp_pos << ',' << st.camp_neg
              << ',' << csv_num(st.avg_degree) << ',' << csv_num(st.initial_polarization) << ','
              << csv_num(st.cross_camp_ratio) << ',' << csv_num(st.avg_degree_pos) << ','
              << csv_num(st.avg_degree_neg) << "\n";
    return kExitOk;
}

// --- plan ----------------------------------------------------------------

int cmd_plan(const InstanceFlags& flags, const std::string& method, std::uint64_t seed,
             const std::string& checkpoint, const std::string& out_path) {
    auto inst = flags.load();
    const Method m = method_from_name(method);

    PlannerContext ctx;
    ctx.inst = inst;
    ctx.seed = seed;
    {
        Env env(inst);  // instance preparation: settles z^(0) once
        ctx.z0 = env.z();
    }
    std::optional<PolicyParams> policy;
    if (m == Method::pacifier_rl || m == Method::pacifier_greedy) {
        if (checkpoint.empty()) throw InvalidInput("--checkpoint is required for pacifier methods");
        policy.emplace(load_policy(checkpoint));
        (m == Method::pacifier_rl ? ctx.rl : ctx.greedy) = &*policy;
    }
    Plan plan = run_planner(m, ctx);

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw InvalidInput("cannot write '" + out_path + "'");
        for (int a : plan.actions) out << a << '\n';
    }
    std::cout << "method=" << plan.method << " k=" << plan.actions.size() << " plan=";
    for (std::size_t i = 0; i < plan.actions.size(); ++i)
        std::cout << (i ? " " : "") << plan.actions[i];
    std::cout << "\n";
    return kExitOk;
}

// --- train ---------------------------------------------------------------

const std::set<std::string> kTrainKeys = {
    "variant",        "algo",          "gamma",         "n_step",
    "eps_start",      "eps_end",       "eps_decay_episodes", "lr",
    "batch",          "target_sync_every", "episodes",  "replay_capacity",
    "grad_steps_per_episode", "min_buffer_fill", "budget_frac_min", "budget_frac_max",
    "val_every",      "val_instances", "embed_dim",     "rounds",
    "decoder"};

int cmd_train(const std::string& config_path, std::uint64_t seed, const std::string& out_dir) {
    ConfigFile cfg = ConfigFile::parse_file(config_path);
    cfg.check_schema({{"generate", kGenerateKeys}, {"train", kTrainKeys}});

    GenConfig gen = gen_config_from(cfg, "generate");
    AgentConfig agent;
    const std::string algo = cfg.get("train", "algo", "rl");
    if (algo != "rl" && algo != "greedy") throw ConfigError("algo must be rl or greedy");
    agent.greedy_variant = (algo == "greedy");
    agent.gamma = cfg.get_real("train", "gamma", agent.gamma);
    agent.n_step = static_cast<int>(cfg.get_int("train", "n_step", agent.n_step));
    agent.eps_start = cfg.get_real("train", "eps_start", agent.eps_start);
    agent.eps_end = cfg.get_real("train", "eps_end", agent.eps_end);
    agent.eps_decay_episodes =
        static_cast<int>(cfg.get_int("train", "eps_decay_episodes", agent.eps_decay_episodes));
    agent.lr = cfg.get_real("train", "lr", agent.lr);
    agent.batch = static_cast<int>(cfg.get_int("train", "batch", agent.batch));
    agent.target_sync_every =
        static_cast<int>(cfg.get_int("train", "target_sync_every", agent.target_sync_every));
    agent.episodes = static_cast<int>(cfg.get_int("train", "episodes", agent.episodes));
    agent.replay_capacity =
        static_cast<int>(cfg.get_int("train", "replay_capacity", agent.replay_capacity));
    agent.grad_steps_per_episode =
        static_cast<int>(cfg.get_int("train", "grad_steps_per_episode", agent.grad_steps_per_episode));
    agent.min_buffer_fill =
        static_cast<int>(cfg.get_int("train", "min_buffer_fill", agent.min_buffer_fill));
    agent.budget_frac_min = cfg.get_real("train", "budget_frac_min", agent.budget_frac_min);
    agent.budget_frac_max = cfg.get_real("train", "budget_frac_max", agent.budget_frac_max);
    agent.val_every = static_cast<int>(cfg.get_int("train", "val_every", agent.val_every));
    agent.val_instances = static_cast<int>(cfg.get_int("train", "val_instances", agent.val_instances));
    agent.enc.embed_dim = static_cast<int>(cfg.get_int("train", "embed_dim", agent.enc.embed_dim));
    agent.enc.rounds = static_cast<int>(cfg.get_int("train", "rounds", agent.enc.rounds));
    const std::string decoder = cfg.get("train", "decoder", "scalar");
    if (decoder != "scalar" && decoder != "elementwise")
        throw ConfigError("decoder must be scalar or elementwise");
    agent.enc.elementwise_decoder = (decoder == "elementwise");
    agent.seed = seed;
    const Variant task = variant_from_name(cfg.get("train", "variant", "mi"));

    fs::create_directories(out_dir);
    RngStream init_rng = RngStream(seed).substream(0);
    PolicyParams pp(agent.enc, init_rng);
    std::vector<TrainLogRow> log = train(pp, gen, agent, task);

    save_policy(out_dir + "/checkpoint.bin", pp);
    CsvWriter csv(out_dir + "/training_log.csv",
                  {"episode", "epsilon", "loss", "val_anp", "grad_steps"});
    for (const TrainLogRow& r : log)
        csv.row({csv_num(r.episode), csv_num(r.epsilon),
                 std::isnan(r.loss) ? "" : csv_num(r.loss),
                 std::isnan(r.val_anp) ? "" : csv_num(r.val_anp), csv_num(r.grad_steps_total)});
    std::cout << "trained " << agent.episodes << " episodes (" << algo << ", "
              << variant_name(task) << "); checkpoint in " << out_dir << "\n";
    return kExitOk;
}

// --- evaluate ------------------------------------------------------------

int cmd_evaluate(const InstanceFlags& flags, const std::string& plan_path,
                 const std::string& out_path, const std::string& pol_norm) {
    auto inst = flags.load();
    std::ifstream in(plan_path);
    if (!in) throw InvalidInput("cannot open plan '" + plan_path + "'");
    std::vector<int> actions;
    int a;
    while (in >> a) actions.push_back(a);
    Trajectory traj = evaluate_plan(inst, actions, pol_norm_from(pol_norm));
    if (!out_path.empty()) write_trajectory_csv(out_path, traj);
    std::cout << "k=" << actions.size() << " anp=" << csv_num(traj.anp)
              << " final_pol=" << csv_num(traj.pol_raw.back()) << "\n";
    return kExitOk;
}

// --- bench ---------------------------------------------------------------

const std::set<std::string> kBenchKeys = {"methods",       "seeds",          "budget",
                                          "budget_frac",   "variant",        "pol_norm",
                                          "checkpoint_rl", "checkpoint_greedy", "output_dir",
                                          "plots",         "trajectories",   "bias_b"};
const std::set<std::string> kInstancesKeys = {"mode",   "count",  "seed",   "names", "edges",
                                              "labels", "prefixes", "force", "n_min", "n_max",
                                              "ba_m_min", "ba_m_max", "cross_ratio_min",
                                              "cross_ratio_max", "opinion_mode", "cost_mode"};

int cmd_bench(const std::string& config_path) {
    ConfigFile cfg = ConfigFile::parse_file(config_path);
    cfg.check_schema({{"bench", kBenchKeys}, {"instances", kInstancesKeys}});

    ExperimentConfig exp;
    for (const std::string& m : cfg.get_list("bench", "methods"))
        exp.methods.push_back(method_from_name(m));
    exp.seeds.clear();
    for (const std::string& s : cfg.get_list("bench", "seeds"))
        exp.seeds.push_back(std::stoull(s));
    if (exp.seeds.empty()) exp.seeds = {1};
    exp.pol_norm = pol_norm_from(cfg.get("bench", "pol_norm", "paper"));
    exp.checkpoint_rl = cfg.get("bench", "checkpoint_rl");
    exp.checkpoint_greedy = cfg.get("bench", "checkpoint_greedy");
    exp.output_dir = cfg.get("bench", "output_dir", "bench_out");
    exp.write_trajectories = cfg.get("bench", "trajectories", "true") != "false";

    const Variant variant = variant_from_name(cfg.get("bench", "variant", "mi"));
    std::optional<BiasConfig> bias;
    if (uses_bias_dynamics(variant)) {
        BiasConfig bc;
        bc.b = cfg.get_real("bench", "bias_b", 1.0);
        bias = bc;
    }
    const int budget = static_cast<int>(cfg.get_int("bench", "budget", 0));
    const double budget_frac = cfg.get_real("bench", "budget_frac", 0.0);
    if (budget <= 0 && budget_frac <= 0) throw ConfigError("bench needs budget or budget_frac");
    auto pick_budget = [&](int n) {
        int k = budget > 0 ? budget : static_cast<int>(std::lround(budget_frac * n));
        return std::clamp(k, 1, n);
    };

    const std::string mode = cfg.get("instances", "mode", "generate");
    if (mode == "generate") {
        GenConfig gen = gen_config_from(cfg, "instances");
        const int count = static_cast<int>(cfg.get_int("instances", "count", 5));
        RngStream root(static_cast<std::uint64_t>(cfg.get_int("instances", "seed", 1)));
        for (int i = 0; i < count; ++i) {
            RngStream rng = root.substream(i);
            GeneratedInstance gi = generate_instance(gen, rng, variant);
            gi.instance.budget = pick_budget(gi.instance.n());
            gi.instance.bias = bias;
            char name[32];
            std::snprintf(name, sizeof(name), "synth_%03d", i);
            exp.instances.push_back({name, std::make_shared<Instance>(std::move(gi.instance))});
        }
    } else if (mode == "files") {
        const bool force = cfg.get("instances", "force", "false") == "true";
        auto edges = cfg.get_list("instances", "edges");
        auto labels = cfg.get_list("instances", "labels");
        auto prefixes = cfg.get_list("instances", "prefixes");
        auto names = cfg.get_list("instances", "names");
        if (!prefixes.empty()) {
            for (std::size_t i = 0; i < prefixes.size(); ++i) {
                Instance inst = *InstanceFlags{prefixes[i], "", "", variant_name(variant), 0, 0,
                                               bias ? bias->b : 1.0, force}
                                     .load();
                inst.budget = pick_budget(inst.n());
                const std::string name =
                    i < names.size() ? names[i] : fs::path(prefixes[i]).stem().string();
                exp.instances.push_back({name, std::make_shared<Instance>(std::move(inst))});
            }
        } else {
            if (edges.size() != labels.size())
                throw ConfigError("instances: edges and labels lists must pair up");
            for (std::size_t i = 0; i < edges.size(); ++i) {
                IngestedDataset ds = ingest_dataset(edges[i], labels[i], force);
                Instance inst;
                inst.graph = std::move(ds.graph);
                inst.s0 = ds.s0;
                inst.costs = Vec::Ones(inst.graph.node_count());
                inst.variant = variant;
                inst.bias = bias;
                inst.budget = pick_budget(inst.n());
                const std::string name =
                    i < names.size() ? names[i] : fs::path(edges[i]).stem().string();
                exp.instances.push_back({name, std::make_shared<Instance>(std::move(inst))});
            }
        }
    } else {
        throw ConfigError("instances mode must be generate or files");
    }

    BenchOutput out = run_benchmark(exp);
    write_results_csv(exp.output_dir + "/results.csv", out.rows);
    if (out.failures > 0) write_errors_csv(exp.output_dir + "/errors.csv", out.rows);
    if (cfg.get("bench", "plots", "false") == "true") emit_plots(out, exp.output_dir);

    int ok = 0;
    for (const ResultRow& r : out.rows) ok += r.ok;
    std::cout << "bench: " << ok << "/" << out.rows.size() << " runs ok; results in "
              << exp.output_dir << "\n";
    if (out.failures > 0) {
        std::cerr << out.failures << " runs failed (see errors.csv)\n";
        return kExitPartial;
    }
    return kExitOk;
}

// --- plot (from emitted CSVs) ---------------------------------------------

int cmd_plot(const std::string& results_path, const std::string& traj_dir,
             const std::string& out_dir) {
    auto rows = read_csv(results_path);
    if (rows.size() <= 1) {
        std::cerr << "warning: no result rows; nothing to plot\n";
        return kExitOk;
    }
    BenchOutput out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() < 8) throw InvalidInput(results_path + ": bad row width");
        ResultRow row;
        row.dataset = r[0];
        row.method = r[1];
        row.seed = std::stoull(r[2]);
        row.n = std::stoi(r[3]);
        row.k = std::stoi(r[4]);
        row.anp = std::stod(r[5]);
        row.final_pol = std::stod(r[6]);
        row.wall_time_ms = std::stoll(r[7]);
        row.ok = true;
        Trajectory traj;
        if (!traj_dir.empty()) {
            const std::string tpath = traj_dir + "/traj_" + row.dataset + "_" + row.method + "_seed" +
                                      std::to_string(row.seed) + ".csv";
            if (fs::exists(tpath)) {
                auto trows = read_csv(tpath);
                for (std::size_t t = 1; t < trows.size(); ++t) {
                    traj.pol_raw.push_back(std::stod(trows[t][2]));
                    traj.pol_hat.push_back(std::stod(trows[t][3]));
                    traj.costs_spent.push_back(std::stod(trows[t][4]));
                    if (!trows[t][5].empty()) traj.actions.push_back(std::stoi(trows[t][5]));
                }
            }
        }
        out.rows.push_back(std::move(row));
        out.trajectories.push_back(std::move(traj));
    }
    if (!emit_plots(out, out_dir)) {
        std::cerr << "warning: no plottable rows\n";
        return kExitOk;
    }
    std::cout << "plots written to " << out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential opinion-polarization moderation under Friedkin-Johnsen dynamics"};
    app.require_subcommand(1);

    // generate
    auto* g = app.add_subcommand("generate", "generate synthetic two-echo-chamber instances");
    int g_nmin = 18, g_nmax = 50, g_count = 10;
    std::uint64_t g_seed = 1;
    std::string g_opinion = "binary", g_cost = "unit", g_out = "instances";
    g->add_option("--n-min", g_nmin, "minimum node count");
    g->add_option("--n-max", g_nmax, "maximum node count");
    g->add_option("--count", g_count, "number of instances");
    g->add_option("--seed", g_seed, "generator seed");
    g->add_option("--opinion-mode", g_opinion, "binary|continuous");
    g->add_option("--cost-mode", g_cost, "unit|random");
    g->add_option("--out", g_out, "output directory");

    // stats
    auto* st = app.add_subcommand("stats", "partition-aware statistics of a labeled graph");
    std::string st_edges, st_labels, st_name, st_idmap;
    bool st_force = false;
    st->add_option("--edges", st_edges, "edge list file")->required();
    st->add_option("--labels", st_labels, "camp label file")->required();
    st->add_option("--name", st_name, "dataset name for the output row");
    st->add_option("--idmap-out", st_idmap, "write the dense-id mapping here");
    st->add_flag("--force", st_force, "keep disconnected graphs");

    // plan
    auto* pl = app.add_subcommand("plan", "produce a one-shot intervention plan");
    InstanceFlags pl_inst;
    pl_inst.add_to(pl, true);
    std::string pl_method = "bomp", pl_checkpoint, pl_out;
    std::uint64_t pl_seed = 1;
    pl->add_option("--method", pl_method,
                   "random|pagerank|extreme-expressed|extreme-neighbours|bomp|exhaustive|"
                   "pacifier-rl|pacifier-greedy");
    pl->add_option("--seed", pl_seed, "seed for the random baseline");
    pl->add_option("--checkpoint", pl_checkpoint, "policy checkpoint for pacifier methods");
    pl->add_option("--out", pl_out, "write the plan (one node id per line)");

    // train
    auto* tr = app.add_subcommand("train", "train a policy on synthetic instances");
    std::string tr_config, tr_out = "train_out";
    std::uint64_t tr_seed = 1;
    tr->add_option("--config", tr_config, "training config file")->required();
    tr->add_option("--seed", tr_seed, "training seed");
    tr->add_option("--out-dir", tr_out, "output directory (checkpoint + log)");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "replay a plan and score its trajectory");
    InstanceFlags ev_inst;
    ev_inst.add_to(ev, true);
    std::string ev_plan, ev_out, ev_norm = "paper";
    ev->add_option("--plan", ev_plan, "plan file (one node id per line)")->required();
    ev->add_option("--out", ev_out, "write the per-step trajectory CSV here");
    ev->add_option("--pol-norm", ev_norm, "paper|raw");

    // bench
    auto* be = app.add_subcommand("bench", "sweep methods x instances x seeds");
    std::string be_config;
    be->add_option("--config", be_config, "benchmark config file")->required();

    // plot
    auto* po = app.add_subcommand("plot", "render SVG charts from emitted CSVs");
    std::string po_results, po_traj, po_out = "plots";
    po->add_option("--results", po_results, "results.csv from bench")->required();
    po->add_option("--trajectories", po_traj, "directory holding traj_*.csv files");
    po->add_option("--out", po_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*g) return cmd_generate(g_nmin, g_nmax, g_count, g_seed, g_opinion, g_cost, g_out);
        if (*st) return cmd_stats(st_edges, st_labels, st_name, st_force, st_idmap);
        if (*pl) return cmd_plan(pl_inst, pl_method, pl_seed, pl_checkpoint, pl_out);
        if (*tr) return cmd_train(tr_config, tr_seed, tr_out);
        if (*ev) return cmd_evaluate(ev_inst, ev_plan, ev_out, ev_norm);
        if (*be) return cmd_bench(be_config);
        if (*po) return cmd_plot(po_results, po_traj, po_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
