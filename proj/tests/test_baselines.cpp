#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <set>

#include "pacifier/baselines.hpp"
#include "pacifier/environment.hpp"
#include "pacifier/synthgen.hpp"

using namespace pacifier;

namespace {

Instance k3_instance(Variant v, int budget) {
    Instance inst;
    inst.graph = Graph::build(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
    inst.s0 = Vec(3);
    inst.s0 << 1, 1, -1;
    inst.costs = Vec::Ones(3);
    inst.budget = budget;
    inst.variant = v;
    return inst;
}

Vec settle_initial(const Instance& inst) { return solve_fj_direct(inst.graph, inst.s0); }

}  // namespace

TEST_CASE("random planner draws distinct nodes and is seed-stable") {
    Instance inst = k3_instance(Variant::mi, 3);
    RngStream a(5), b(5);
    Plan pa = plan_random(inst, a);
    Plan pb = plan_random(inst, b);
    CHECK(pa.actions == pb.actions);
    std::set<int> uniq(pa.actions.begin(), pa.actions.end());
    CHECK(uniq.size() == 3);  // k = n: a permutation

    inst.budget = 0;
    RngStream c(1);
    CHECK(plan_random(inst, c).actions.empty());
}

TEST_CASE("pagerank ranks the star center first and breaks ties by id") {
    Instance star;
    star.graph = Graph::build(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
    star.s0 = Vec::Ones(4);
    star.costs = Vec::Ones(4);
    star.budget = 4;
    star.variant = Variant::mi;
    Plan p = plan_pagerank(star);
    CHECK(p.actions[0] == 0);

    Instance k3 = k3_instance(Variant::mi, 3);
    CHECK(plan_pagerank(k3).actions == std::vector<int>{0, 1, 2});

    Instance p2;
    p2.graph = Graph::build(2, {{0, 1, 1.0}});
    p2.s0 = Vec::Ones(2);
    p2.costs = Vec::Ones(2);
    p2.budget = 2;
    p2.variant = Variant::mi;
    CHECK(plan_pagerank(p2).actions == std::vector<int>{0, 1});
}

TEST_CASE("extreme-expressed ranks by settled magnitude") {
    Instance inst = k3_instance(Variant::mi, 3);
    Plan p = plan_extreme_expressed(inst, settle_initial(inst));
    CHECK(p.actions == std::vector<int>{0, 1, 2});  // |z| = (.5, .5, 0)

    Vec flat = Vec::Zero(3);
    CHECK(plan_extreme_expressed(inst, flat).actions == std::vector<int>{0, 1, 2});
}

TEST_CASE("extreme-neighbours sums neighbor magnitudes") {
    Instance inst = k3_instance(Variant::mi, 3);
    // exact settled opinions (.5, .5, 0); neighbor sums (.5, .5, 1.0) tie
    // nodes 0/1 exactly, so the id rule decides
    Vec z0(3);
    z0 << 0.5, 0.5, 0.0;
    Plan p = plan_extreme_neighbours(inst, z0);
    CHECK(p.actions == std::vector<int>{2, 0, 1});

    Instance star;
    star.graph = Graph::build(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
    star.s0 = Vec(4);
    star.s0 << 0, 1, 1, -1;
    star.costs = Vec::Ones(4);
    star.budget = 1;
    star.variant = Variant::mi;
    Plan ps = plan_extreme_neighbours(star, settle_initial(star));
    CHECK(ps.actions[0] == 0);

    // isolated node scores zero and lands last
    Instance iso;
    iso.graph = Graph::build(3, {{0, 1, 1.0}});
    iso.s0 = Vec(3);
    iso.s0 << 1, -1, 1;
    iso.costs = Vec::Ones(3);
    iso.budget = 3;
    iso.variant = Variant::mi;
    Plan pi = plan_extreme_neighbours(iso, settle_initial(iso));
    CHECK(pi.actions.back() == 2);
}

TEST_CASE("bomp on the path faces an exact tie") {
    Instance p2;
    p2.graph = Graph::build(2, {{0, 1, 1.0}});
    p2.s0 = Vec(2);
    p2.s0 << 1, -1;
    p2.costs = Vec::Ones(2);
    p2.budget = 1;
    p2.variant = Variant::mi;
    // both choices leave the same residual ||r - s_i q_i||^2 = 5/9; the
    // solve noise (~1e-16) decides between them, so assert the tie itself
    Vec z0 = settle_initial(p2);
    Plan p = plan_bomp(p2, z0);
    REQUIRE(p.actions.size() == 1);
    InfluenceOperator Q(p2.graph);
    const double r0 = (z0 - p2.s0[0] * Q.column(0)).squaredNorm();
    const double r1 = (z0 - p2.s0[1] * Q.column(1)).squaredNorm();
    CHECK(r0 == Catch::Approx(5.0 / 9).margin(1e-10));
    CHECK(r1 == Catch::Approx(5.0 / 9).margin(1e-10));
}

TEST_CASE("bomp never picks the node whose zeroing inflates the residual") {
    Instance inst = k3_instance(Variant::mi, 1);
    Plan p = plan_bomp(inst, settle_initial(inst));
    CHECK((p.actions[0] == 0 || p.actions[0] == 1));
    CHECK(p.actions[0] != 2);
}

TEST_CASE("bomp with the full budget zeroes the residual exactly") {
    GenConfig cfg;
    cfg.n_min = 8;
    cfg.n_max = 14;
    RngStream rng(31);
    GeneratedInstance gi = generate_instance(cfg, rng, Variant::mi);
    gi.instance.budget = gi.instance.n();
    Vec z0 = settle_initial(gi.instance);
    Plan p = plan_bomp(gi.instance, z0);
    CHECK(static_cast<int>(p.actions.size()) == gi.instance.n());
    Trajectory tr = evaluate_plan(std::make_shared<Instance>(gi.instance), p.actions);
    CHECK(tr.pol_raw.back() == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("bomp residual tracks the environment settle along its own plan") {
    GenConfig cfg;
    cfg.n_min = 8;
    cfg.n_max = 20;
    RngStream rng(32);
    for (int trial = 0; trial < 10; ++trial) {
        GeneratedInstance gi = generate_instance(cfg, rng, Variant::mi);
        gi.instance.budget = std::min(4, gi.instance.n());
        auto inst = std::make_shared<Instance>(std::move(gi.instance));
        Plan p = plan_bomp(*inst, settle_initial(*inst));
        Trajectory tr = evaluate_plan(inst, p.actions);

        InfluenceOperator Q(inst->graph);
        Vec r = settle_initial(*inst);
        for (std::size_t t = 0; t < p.actions.size(); ++t) {
            const int a = p.actions[t];
            r -= inst->s0[a] * Q.column(a);
            CHECK(std::abs(polarization_index(r) - tr.pol_raw[t + 1]) < 1e-8);
        }
    }
}

TEST_CASE("bomp rejects non-linear and expressed variants") {
    Instance me = k3_instance(Variant::me, 1);
    CHECK_THROWS_AS(plan_bomp(me, settle_initial(me)), UnsupportedVariant);
    Instance bias = k3_instance(Variant::mi_bias, 1);
    bias.bias = BiasConfig{};
    CHECK_THROWS_AS(plan_bomp(bias, settle_initial(bias)), UnsupportedVariant);
}

TEST_CASE("exhaustive oracle enumerates the triangle") {
    Instance inst = k3_instance(Variant::mi, 1);
    Plan p = plan_exhaustive(inst);
    CHECK(p.actions == std::vector<int>{0});  // ties 0/1, lower id enumerated first

    Instance big = k3_instance(Variant::mi, 1);
    big.graph = Graph::build(20, [] {
        std::vector<Edge> e;
        for (int i = 1; i < 20; ++i) e.push_back({0, i, 1.0});
        return e;
    }());
    big.s0 = Vec::Ones(20);
    big.costs = Vec::Ones(20);
    big.budget = 1;
    CHECK_THROWS_AS(plan_exhaustive(big), Refused);

    Instance k0 = k3_instance(Variant::mi, 1);
    k0.budget = 0;
    CHECK_THROWS_AS(plan_exhaustive(k0), Refused);
}

TEST_CASE("exhaustive lower-bounds the greedy planners") {
    GenConfig cfg;
    cfg.n_min = 6;
    cfg.n_max = 10;
    RngStream rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        GeneratedInstance gi = generate_instance(cfg, rng, Variant::mi);
        gi.instance.budget = 2;
        auto inst = std::make_shared<Instance>(std::move(gi.instance));
        Vec z0 = settle_initial(*inst);
        const double best = evaluate_plan(inst, plan_exhaustive(*inst).actions).anp;
        RngStream prng(trial);
        for (const Plan& p : {plan_bomp(*inst, z0), plan_extreme_expressed(*inst, z0),
                              plan_extreme_neighbours(*inst, z0), plan_pagerank(*inst),
                              plan_random(*inst, prng)}) {
            CHECK(best <= evaluate_plan(inst, p.actions).anp + 1e-10);
        }
    }
}

TEST_CASE("bomp matches the oracle's first action when the optimum is unique") {
    GenConfig cfg;
    cfg.n_min = 6;
    cfg.n_max = 10;
    RngStream rng(34);
    int checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
        GeneratedInstance gi = generate_instance(cfg, rng, Variant::mi);
        gi.instance.budget = 1;
        auto inst = std::make_shared<Instance>(std::move(gi.instance));

        // unique optimum: enumerate all k=1 scores directly
        std::vector<double> anps(inst->n());
        int argmin = 0;
        for (int v = 0; v < inst->n(); ++v) {
            anps[v] = evaluate_plan(inst, {v}).anp;
            if (anps[v] < anps[argmin]) argmin = v;
        }
        bool unique = true;
        for (int v = 0; v < inst->n(); ++v)
            if (v != argmin && anps[v] < anps[argmin] + 1e-12) unique = false;
        if (!unique) continue;
        ++checked;
        Plan p = plan_bomp(*inst, settle_initial(*inst));
        CHECK(p.actions[0] == argmin);
    }
    // symmetric camps tie often under binary opinions; make sure the check
    // is not vacuous
    CHECK(checked >= 10);
}

TEST_CASE("planners never touch the settle counter") {
    GenConfig cfg;
    cfg.n_min = 10;
    cfg.n_max = 14;
    RngStream rng(35);
    GeneratedInstance gi = generate_instance(cfg, rng, Variant::mi);
    gi.instance.budget = 3;
    Instance inst = gi.instance;
    Vec z0 = settle_initial(inst);  // raw solve, not a settle

    const auto before = settle_call_counter().load();
    RngStream prng(3);
    plan_random(inst, prng);
    plan_pagerank(inst);
    plan_extreme_expressed(inst, z0);
    plan_extreme_neighbours(inst, z0);
    plan_bomp(inst, z0);
    CHECK(settle_call_counter().load() == before);
}

TEST_CASE("cost-aware bomp prefers cheap near-equivalent interventions") {
    // two symmetric halves; make one side's hub absurdly expensive
    GenConfig cfg;
    cfg.n_min = 12;
    cfg.n_max = 12;
    RngStream rng(36);
    GeneratedInstance gi = generate_instance(cfg, rng, Variant::mi_cost);
    gi.instance.budget = 1;
    Vec z0 = settle_initial(gi.instance);
    Plan base = plan_bomp(gi.instance, z0);
    const int pick = base.actions[0];
    gi.instance.costs[pick] = 1e6;  // price the unweighted choice out
    Plan priced = plan_bomp(gi.instance, z0);
    CHECK(priced.actions[0] != pick);
}
