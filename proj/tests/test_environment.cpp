#include <catch2/catch_amalgamated.hpp>

#include <memory>

#include "pacifier/environment.hpp"
#include "pacifier/synthgen.hpp"

using namespace pacifier;

namespace {

std::shared_ptr<Instance> p2_instance(Variant v, int budget = 1) {
    auto inst = std::make_shared<Instance>();
    inst->graph = Graph::build(2, {{0, 1, 1.0}});
    inst->s0 = Vec(2);
    inst->s0 << 1, -1;
    inst->costs = Vec::Ones(2);
    inst->budget = budget;
    inst->variant = v;
    return inst;
}

std::shared_ptr<Instance> k3_instance(Variant v, int budget = 1) {
    auto inst = std::make_shared<Instance>();
    inst->graph = Graph::build(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
    inst->s0 = Vec(3);
    inst->s0 << 1, 1, -1;
    inst->costs = Vec::Ones(3);
    inst->budget = budget;
    inst->variant = v;
    return inst;
}

}  // namespace

TEST_CASE("reset settles the untouched instance") {
    Env env(p2_instance(Variant::mi));
    CHECK(env.z()[0] == Catch::Approx(1.0 / 3).margin(1e-12));
    CHECK(env.z()[1] == Catch::Approx(-1.0 / 3).margin(1e-12));
    CHECK(env.pol() == Catch::Approx(1.0 / 9).margin(1e-12));
    CHECK(env.t() == 0);
    CHECK_FALSE(env.done());

    auto flat = p2_instance(Variant::mi);
    flat->s0.setZero();
    Env env0(flat);
    CHECK(env0.pol() == 0.0);
}

TEST_CASE("bias variant with isolated nodes settles at the internal opinions") {
    auto inst = std::make_shared<Instance>();
    inst->graph = Graph::build(3, {});
    inst->s0 = Vec(3);
    inst->s0 << 0.5, -0.25, 0.0;
    inst->costs = Vec::Ones(3);
    inst->budget = 1;
    inst->variant = Variant::mi_bias;
    inst->bias = BiasConfig{};
    Env env(inst);
    CHECK((env.z() - inst->s0).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("internal moderation step can raise polarization") {
    Env env(p2_instance(Variant::mi));
    StepResult r = env.step(0);
    // zeroing the positive anchor drags both nodes negative: pi rises
    CHECK(r.pol == Catch::Approx(5.0 / 18).margin(1e-12));
    CHECK(r.pol > 1.0 / 9);
    CHECK(r.reward == Catch::Approx(-(5.0 / 18) / 2.0).margin(1e-12));
    CHECK(r.done);
    CHECK_THROWS_AS(env.step(1), InvalidAction);
}

TEST_CASE("expressed moderation pins and re-settles") {
    Env env(p2_instance(Variant::me));
    StepResult r = env.step(0);
    CHECK(env.z()[0] == 0.0);
    CHECK(env.z()[1] == Catch::Approx(-0.5).margin(1e-12));
    CHECK(r.pol == Catch::Approx(0.125).margin(1e-12));
}

TEST_CASE("node removal normalizes by the original node count") {
    Env env(k3_instance(Variant::node_removal));
    StepResult r = env.step(2);
    CHECK(env.z()[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(env.z()[1] == Catch::Approx(1.0).margin(1e-12));
    CHECK(env.z()[2] == 0.0);
    CHECK(r.pol == Catch::Approx(2.0 / 3).margin(1e-12));
}

TEST_CASE("step rejects repeated and out-of-range actions") {
    Env env(k3_instance(Variant::mi, 3));
    env.step(1);
    CHECK_THROWS_AS(env.step(1), InvalidAction);
    CHECK_THROWS_AS(env.step(7), InvalidAction);
    auto mask = env.feasible_mask();
    CHECK(mask[0] == 1);
    CHECK(mask[1] == 0);
}

TEST_CASE("rewards are never positive") {
    GenConfig cfg;
    cfg.n_min = 10;
    cfg.n_max = 16;
    cfg.cost_mode = CostMode::random;
    RngStream rng(5);
    for (int t = 0; t < 10; ++t) {
        GeneratedInstance gi = generate_instance(cfg, rng, Variant::mi_cost);
        gi.instance.budget = 4;
        Env env(std::make_shared<Instance>(std::move(gi.instance)));
        while (!env.done()) {
            int a = -1;
            auto mask = env.feasible_mask();
            for (int v = 0; v < static_cast<int>(mask.size()); ++v)
                if (mask[v]) {
                    a = v;
                    break;
                }
            StepResult r = env.step(a);
            CHECK(r.reward <= 0.0);
        }
    }
}

TEST_CASE("evaluate_plan replays and scores a trajectory") {
    auto inst = k3_instance(Variant::mi, 2);
    Trajectory tr = evaluate_plan(inst, {0, 1});
    REQUIRE(tr.pol_raw.size() == 3);
    REQUIRE(tr.pol_hat.size() == 3);
    CHECK(tr.pol_raw[0] == Catch::Approx(1.0 / 6).margin(1e-12));
    // after zeroing both positive anchors only s2 = -1 remains
    CHECK(tr.pol_hat[2] == Catch::Approx(tr.pol_raw[2] / 3).margin(1e-14));
    const double expect_anp = (tr.pol_hat[0] + tr.pol_hat[1] + tr.pol_hat[2]) / 2.0;
    CHECK(tr.anp == Catch::Approx(expect_anp).margin(1e-14));
    CHECK(tr.costs_spent.back() == Catch::Approx(2.0));
}

TEST_CASE("evaluate_plan guards its inputs") {
    auto inst = k3_instance(Variant::mi, 2);
    CHECK_THROWS_AS(evaluate_plan(inst, {}), InvalidPlan);
    CHECK_THROWS_AS(evaluate_plan(inst, {0, 0}), InvalidPlan);
    CHECK_THROWS_AS(evaluate_plan(inst, {0, 1, 2}), InvalidPlan);
    CHECK_THROWS_AS(evaluate_plan(inst, {5}), InvalidPlan);
}

TEST_CASE("full moderation drives polarization to zero") {
    auto inst = k3_instance(Variant::mi, 3);
    Trajectory tr = evaluate_plan(inst, {0, 1, 2});
    CHECK(tr.pol_raw.back() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("order changes the trajectory but not the final state") {
    auto inst = k3_instance(Variant::mi, 2);
    Trajectory ab = evaluate_plan(inst, {0, 2});
    Trajectory ba = evaluate_plan(inst, {2, 0});
    CHECK(ab.pol_raw.back() == Catch::Approx(ba.pol_raw.back()).margin(1e-10));
    CHECK(ab.anp != Catch::Approx(ba.anp).margin(1e-12));
}

TEST_CASE("environment replay matches superposition at every step") {
    GenConfig cfg;
    cfg.n_min = 8;
    cfg.n_max = 24;
    RngStream rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        GeneratedInstance gi = generate_instance(cfg, rng, Variant::mi);
        gi.instance.budget = std::min(5, gi.instance.n());
        auto inst = std::make_shared<Instance>(std::move(gi.instance));
        std::vector<int> plan = rng.sample_without_replacement(inst->n(), inst->budget);

        InfluenceOperator Q(inst->graph);
        Vec z = solve_fj_direct(inst->graph, inst->s0);
        std::vector<double> expect_pol{polarization_index(z)};
        for (int a : plan) {
            z -= inst->s0[a] * Q.column(a);
            expect_pol.push_back(polarization_index(z));
        }

        Trajectory tr = evaluate_plan(inst, plan);
        for (std::size_t t = 0; t < expect_pol.size(); ++t)
            CHECK(tr.pol_raw[t] == Catch::Approx(expect_pol[t]).margin(1e-8));
    }
}

TEST_CASE("pinning an already-neutral node still spends budget and marks it") {
    // on the triangle, node 2 settles at exactly 0; pinning it changes nothing
    // in z but the state must still record the intervention
    auto inst = k3_instance(Variant::me, 1);
    Env env(inst);
    Vec z_before = env.z();
    CHECK(z_before[2] == Catch::Approx(0.0).margin(1e-12));
    StepResult r = env.step(2);
    CHECK((env.z() - z_before).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(env.planning_state().marked[2] == 1);
    CHECK(env.t() == 1);
    CHECK(r.done);
}

TEST_CASE("one-shot split: plan construction triggers no settles") {
    auto inst = k3_instance(Variant::mi, 2);
    Env env(inst);  // settles once on construction
    const auto before = settle_call_counter().load();
    // building a plan from initial info only must not settle anything
    std::vector<int> plan = {0, 1};
    CHECK(settle_call_counter().load() == before);
    evaluate_plan(inst, plan);  // replay owns the settles
    CHECK(settle_call_counter().load() == before + 3);  // reset + 2 steps
}
