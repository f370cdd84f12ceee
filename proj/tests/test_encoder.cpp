#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <memory>

#include "pacifier/encoder.hpp"
#include "pacifier/environment.hpp"
#include "pacifier/synthgen.hpp"

using namespace pacifier;
using nn::Mat;

namespace {

Instance k3_instance(Variant v, int budget = 1) {
    Instance inst;
    inst.graph = Graph::build(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
    inst.s0 = Vec(3);
    inst.s0 << 1, 1, -1;
    inst.costs = Vec::Ones(3);
    inst.budget = budget;
    inst.variant = v;
    return inst;
}

}  // namespace

TEST_CASE("node features carry state, origin, mark and cost") {
    Instance inst = k3_instance(Variant::mi, 2);
    PlanningState st = PlanningState::initial(inst);
    Mat x0 = build_node_features(inst, st);
    REQUIRE(x0.rows() == 3);
    REQUIRE(x0.cols() == 4);
    CHECK(x0.col(2).cwiseAbs().maxCoeff() == 0.0);  // no marks at t = 0
    CHECK(x0(0, 0) == 1.0);
    CHECK(x0(2, 0) == -1.0);
    CHECK(x0(0, 3) == 1.0);  // unit costs

    st.apply(inst, 0);
    Mat x1 = build_node_features(inst, st);
    CHECK(x1(0, 0) == 0.0);  // neutralized attribute
    CHECK(x1(0, 1) == 1.0);  // original opinion preserved
    CHECK(x1(0, 2) == 1.0);  // marked
    CHECK(x1(1, 2) == 0.0);
}

TEST_CASE("expressed pins and removals are marked in features") {
    Instance me = k3_instance(Variant::me, 2);
    PlanningState st = PlanningState::initial(me);
    st.apply(me, 2);
    Mat x = build_node_features(me, st);
    CHECK(x(2, 0) == 0.0);
    CHECK(x(2, 2) == 1.0);

    Instance rem = k3_instance(Variant::node_removal, 2);
    PlanningState str = PlanningState::initial(rem);
    str.apply(rem, 1);
    Mat xr = build_node_features(rem, str);
    CHECK(xr(1, 2) == 1.0);
    CHECK(str.active[1] == 0);
}

TEST_CASE("aux features: hand-counted triangle case") {
    Instance inst = k3_instance(Variant::mi, 2);
    PlanningState st = PlanningState::initial(inst);
    st.apply(inst, 2);
    AuxFeatures u = build_aux_features(inst, st);
    CHECK(u[0] == Catch::Approx(1.0 / 3));
    CHECK(u[1] == Catch::Approx(2.0 / 3));  // both edges at node 2 covered
    CHECK(u[2] == 0.0);                      // remaining edge joins two positives
    CHECK(u[3] == 0.0);                      // active degrees are 1: no two-hop pairs
    CHECK(u[4] == 0.0);
    CHECK(u[5] == 0.0);
}

TEST_CASE("aux features: cross-sign edge on the path") {
    Instance inst;
    inst.graph = Graph::build(2, {{0, 1, 1.0}});
    inst.s0 = Vec(2);
    inst.s0 << 1, -1;
    inst.costs = Vec::Ones(2);
    inst.budget = 1;
    inst.variant = Variant::mi;
    PlanningState st = PlanningState::initial(inst);
    AuxFeatures u = build_aux_features(inst, st);
    CHECK(u[0] == 0.0);
    CHECK(u[1] == 0.0);
    CHECK(u[2] == Catch::Approx(1.0));
    CHECK(u[3] == 0.0);
}

TEST_CASE("aux feature bounds under random intervention prefixes") {
    GenConfig cfg;
    cfg.n_min = 10;
    cfg.n_max = 30;
    RngStream rng(61);
    for (int trial = 0; trial < 40; ++trial) {
        GeneratedInstance gi = generate_instance(cfg, rng, Variant::mi);
        gi.instance.budget = gi.instance.n();
        PlanningState st = PlanningState::initial(gi.instance);
        const int prefix = static_cast<int>(rng.uniform_int(0, gi.instance.n() - 1));
        for (int a : rng.sample_without_replacement(gi.instance.n(), prefix))
            st.apply(gi.instance, a);
        AuxFeatures u = build_aux_features(gi.instance, st);
        for (int j = 0; j < 3; ++j) {
            CHECK(u[j] >= 0.0);
            CHECK(u[j] <= 1.0);
        }
        for (int j = 3; j < 6; ++j) CHECK(u[j] >= 0.0);
        CHECK(u[4] <= u[3] + 1e-12);
        CHECK(u[5] <= u[3] + 1e-12);
    }
}

TEST_CASE("two-hop statistic counts wedges") {
    // path 0-1-2: the middle node has active degree 2 -> one wedge
    Instance inst;
    inst.graph = Graph::build(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    inst.s0 = Vec(3);
    inst.s0 << 1, 1, 1;
    inst.costs = Vec::Ones(3);
    inst.budget = 1;
    inst.variant = Variant::mi;
    PlanningState st = PlanningState::initial(inst);
    AuxFeatures u = build_aux_features(inst, st);
    CHECK(u[3] == Catch::Approx(1.0 / 9));
    CHECK(u[4] == Catch::Approx(1.0 / 9));  // all nodes positive
    CHECK(u[5] == 0.0);
}

TEST_CASE("state aliasing is resolved by the mark column") {
    // expressed-moderation on the path 0-1-2 with opinions (1, 0, -1): the
    // middle node settles at exactly zero, and pinning it changes neither the
    // settled opinions nor any opinion attribute. Only the mark separates the
    // pinned state from the untouched one.
    Instance inst;
    inst.graph = Graph::build(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    inst.s0 = Vec(3);
    inst.s0 << 1, 0, -1;
    inst.costs = Vec::Ones(3);
    inst.budget = 1;
    inst.variant = Variant::me;

    PlanningState before = PlanningState::initial(inst);
    PlanningState after = before;
    after.apply(inst, 1);

    CHECK(before.s_attr == after.s_attr);  // identical opinion attributes

    // settled opinions coincide too: the aliasing the mark must resolve
    OpinionState ob = OpinionState::initial(inst);
    settle(ob, inst.graph, inst.variant);
    OpinionState oa = OpinionState::initial(inst);
    oa.fixed_zero[1] = 1;
    settle(oa, inst.graph, inst.variant);
    CHECK((ob.z - oa.z).cwiseAbs().maxCoeff() < 1e-12);

    Mat xb = build_node_features(inst, before);
    Mat xa = build_node_features(inst, after);
    CHECK((xb - xa).cwiseAbs().maxCoeff() > 0.0);
    CHECK(xb(1, 2) == 0.0);
    CHECK(xa(1, 2) == 1.0);
    // every other feature entry coincides
    xa(1, 2) = 0.0;
    CHECK((xb - xa).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("encoder is permutation equivariant") {
    GenConfig cfg;
    cfg.n_min = 8;
    cfg.n_max = 30;
    RngStream rng(62);
    for (int trial = 0; trial < 5; ++trial) {
        GeneratedInstance gi = generate_instance(cfg, rng, Variant::mi);
        Instance& inst = gi.instance;
        const int n = inst.n();
        inst.budget = n;
        PlanningState st = PlanningState::initial(inst);
        for (int a : rng.sample_without_replacement(n, n / 4)) st.apply(inst, a);

        RngStream prng(900 + trial);
        EncoderConfig ecfg;
        ecfg.embed_dim = 16;
        PolicyParams pp(ecfg, prng);

        nn::Tape t1(&pp.store);
        EncodingNodes e1 = encode_on_tape(t1, pp, build_node_features(inst, st), inst.graph, st.active);

        // relabel nodes by a random permutation
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(perm);
        std::vector<Edge> pedges;
        for (const Edge& e : inst.graph.edges()) pedges.push_back({perm[e.u], perm[e.v], e.w});
        Instance pinst = inst;
        pinst.graph = Graph::build(n, pedges);
        PlanningState pst = PlanningState::initial(pinst);
        pst.marked_count = st.marked_count;
        for (int i = 0; i < n; ++i) {
            pinst.s0[perm[i]] = inst.s0[i];
            pinst.costs[perm[i]] = inst.costs[i];
            pst.s_attr[perm[i]] = st.s_attr[i];
            pst.marked[perm[i]] = st.marked[i];
            pst.active[perm[i]] = st.active[i];
        }
        nn::Tape t2(&pp.store);
        EncodingNodes e2 =
            encode_on_tape(t2, pp, build_node_features(pinst, pst), pinst.graph, pst.active);

        const Mat& h1 = t1.value(e1.h);
        const Mat& h2 = t2.value(e2.h);
        for (int i = 0; i < n; ++i)
            CHECK((h1.row(i) - h2.row(perm[i])).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((t1.value(e1.g) - t2.value(e2.g)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("isolated nodes see no neighbor mass; removed nodes vanish from the pool") {
    Instance inst;
    inst.graph = Graph::build(3, {{0, 1, 1.0}});
    inst.s0 = Vec(3);
    inst.s0 << 1, -1, 1;
    inst.costs = Vec::Ones(3);
    inst.budget = 2;
    inst.variant = Variant::node_removal;
    RngStream prng(63);
    EncoderConfig ecfg;
    ecfg.embed_dim = 8;
    PolicyParams pp(ecfg, prng);

    PlanningState st = PlanningState::initial(inst);
    st.apply(inst, 0);  // remove node 0

    nn::Tape t(&pp.store);
    EncodingNodes enc = encode_on_tape(t, pp, build_node_features(inst, st), inst.graph, st.active);
    const Mat& h = t.value(enc.h);
    CHECK(h.row(0).cwiseAbs().maxCoeff() == 0.0);  // removed: zeroed embedding
    // pool excludes the removed node
    CHECK((t.value(enc.g) - (h.row(1) + h.row(2))).cwiseAbs().maxCoeff() < 1e-12);

    // identical twin features, no edges between them: identical embeddings
    Instance twins;
    twins.graph = Graph::build(2, {});
    twins.s0 = Vec(2);
    twins.s0 << 0.5, 0.5;
    twins.costs = Vec::Ones(2);
    twins.budget = 1;
    twins.variant = Variant::mi;
    PlanningState st2 = PlanningState::initial(twins);
    nn::Tape t2(&pp.store);
    EncodingNodes e2 = encode_on_tape(t2, pp, build_node_features(twins, st2), twins.graph, st2.active);
    const Mat& h2 = t2.value(e2.h);
    CHECK((h2.row(0) - h2.row(1)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("encoder weights receive finite-difference-consistent gradients") {
    Instance inst = k3_instance(Variant::mi, 2);
    PlanningState st = PlanningState::initial(inst);
    st.apply(inst, 1);
    const Mat features = build_node_features(inst, st);

    RngStream prng(64);
    EncoderConfig ecfg;
    ecfg.embed_dim = 6;
    ecfg.rounds = 2;
    PolicyParams pp(ecfg, prng);

    auto forward = [&](nn::Tape& t) {
        EncodingNodes enc = encode_on_tape(t, pp, features, inst.graph, st.active);
        return t.sum_all(t.square(enc.g));
    };

    pp.store.zero_grad();
    {
        nn::Tape t(&pp.store);
        t.backward(forward(t));
    }
    for (int p : {pp.w0, pp.w_nbr, pp.w_self, pp.w_sage}) {
        Mat analytic = pp.store.entry(p).grad;
        REQUIRE(analytic.cwiseAbs().maxCoeff() > 0.0);
        for (int r = 0; r < analytic.rows(); r += 3)
            for (int c = 0; c < analytic.cols(); c += 2) {
                const double h = 1e-6;
                const double orig = pp.store.value(p)(r, c);
                auto eval = [&]() {
                    nn::Tape t(&pp.store);
                    return t.value(forward(t))(0, 0);
                };
                pp.store.value(p)(r, c) = orig + h;
                const double up = eval();
                pp.store.value(p)(r, c) = orig - h;
                const double down = eval();
                pp.store.value(p)(r, c) = orig;
                const double fd = (up - down) / (2 * h);
                const double scale = std::max({std::abs(fd), std::abs(analytic(r, c)), 1e-6});
                CHECK(std::abs(analytic(r, c) - fd) / scale < 1e-3);
            }
    }
}
