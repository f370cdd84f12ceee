#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <Eigen/Dense>

#include "pacifier/environment.hpp"
#include "pacifier/errors.hpp"
#include "pacifier/graph.hpp"
#include "pacifier/instance.hpp"
#include "pacifier/neural.hpp"
#include "pacifier/rng.hpp"

namespace pacifier {

// Per-node input features x_t(v) = [s_t(v), s_0(v), mark_t(v), c(v)].
// The mark bit is what disambiguates states whose opinion attributes look
// identical but whose intervention histories differ.
inline nn::Mat build_node_features(const Instance& inst, const PlanningState& st) {
    const int n = inst.n();
    nn::Mat x(n, 4);
    for (int v = 0; v < n; ++v) {
        x(v, 0) = st.s_attr[v];
        x(v, 1) = inst.s0[v];
        x(v, 2) = st.marked[v] ? 1.0 : 0.0;
        x(v, 3) = inst.costs[v];
    }
    return x;
}

// Graph-level auxiliary features:
//   u1 covered-node ratio, u2 covered-edge ratio, u3 cross-sign ratio among
//   active edges, u4 two-hop count of the active subgraph / n^2, u5/u6 the
//   same statistic restricted to the positive (s > 0) and nonpositive
//   (s <= 0) active groups.
using AuxFeatures = std::array<double, 6>;

inline AuxFeatures build_aux_features(const Instance& inst, const PlanningState& st) {
    const Graph& g = inst.graph;
    const int n = g.node_count();
    const int m = g.edge_count();
    AuxFeatures u{};
    if (n == 0) return u;

    int covered_edges = 0, cross_edges = 0;
    std::vector<int> deg_active(n, 0), deg_pos(n, 0), deg_neg(n, 0);
    auto is_pos = [&](int v) { return st.s_attr[v] > 0.0; };
    for (const Edge& e : g.edges()) {
        if (st.marked[e.u] || st.marked[e.v]) {
            ++covered_edges;
            continue;
        }
        if (is_pos(e.u) != is_pos(e.v)) ++cross_edges;
        ++deg_active[e.u];
        ++deg_active[e.v];
        if (is_pos(e.u) && is_pos(e.v)) {
            ++deg_pos[e.u];
            ++deg_pos[e.v];
        } else if (!is_pos(e.u) && !is_pos(e.v)) {
            ++deg_neg[e.u];
            ++deg_neg[e.v];
        }
    }
    double two_hop = 0, two_hop_pos = 0, two_hop_neg = 0;
    auto choose2 = [](int d) { return 0.5 * d * (d - 1); };
    for (int v = 0; v < n; ++v) {
        if (st.marked[v]) continue;
        two_hop += choose2(deg_active[v]);
        if (is_pos(v))
            two_hop_pos += choose2(deg_pos[v]);
        else
            two_hop_neg += choose2(deg_neg[v]);
    }
    const double n2 = static_cast<double>(n) * n;
    u[0] = static_cast<double>(st.marked_count) / n;
    u[1] = m > 0 ? static_cast<double>(covered_edges) / m : 0.0;
    u[2] = m > 0 ? static_cast<double>(cross_edges) / m : 0.0;
    u[3] = two_hop / n2;
    u[4] = two_hop_pos / n2;
    u[5] = two_hop_neg / n2;
    return u;
}

struct EncoderConfig {
    int embed_dim = 64;
    int rounds = 3;  // message-passing iterations
    // State-action interaction in the decoder. The written form (h_v g^T) w
    // algebraically reduces to the scalar (g . w) scaling h_v; the
    // element-wise alternative h_v o g o w keeps per-dimension interactions
    // and trains much more reliably.
    bool elementwise_decoder = false;
};

// Parameter names shared by the encoder and decoder; decoder pieces live in
// agent.hpp but are registered here so one store covers the whole policy.
struct PolicyParams {
    nn::ParamStore store;
    int w0, w_nbr, w_self, w_sage;          // encoder
    int w_bilinear;                         // state--action interaction vector
    int mlp1_w, mlp1_b, mlp2_w, mlp2_b;     // decoder MLP hidden layers
    int mlp3_w, mlp3_b;                     // decoder output
    EncoderConfig enc;

    PolicyParams(const EncoderConfig& cfg, RngStream& rng) : enc(cfg) {
        const int d = cfg.embed_dim;
        w0 = store.add_glorot("w0", d, 4, rng);
        w_nbr = store.add_glorot("w_nbr", d, d, rng);
        w_self = store.add_glorot("w_self", d, d, rng);
        w_sage = store.add_glorot("w_sage", d, 2 * d, rng);
        w_bilinear = store.add_glorot("w_bilinear", 1, d, rng);
        mlp1_w = store.add_glorot("mlp1_w", 64, d + 6, rng);
        mlp1_b = store.add("mlp1_b", 1, 64);
        mlp2_w = store.add_glorot("mlp2_w", 32, 64, rng);
        mlp2_b = store.add("mlp2_b", 1, 32);
        mlp3_w = store.add_glorot("mlp3_w", 1, 32, rng);
        mlp3_b = store.add("mlp3_b", 1, 1);
    }
};

// Policy file = dims header + parameter payload, so a checkpoint can be
// reopened without knowing the architecture in advance.
inline void save_policy(const std::string& path, const PolicyParams& pp) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write policy '" + path + "'");
    const char magic[8] = {'P', 'C', 'F', 'P', 'O', 'L', '1', '\0'};
    out.write(magic, 8);
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(pp.enc.embed_dim),
                                   static_cast<std::uint32_t>(pp.enc.rounds),
                                   pp.enc.elementwise_decoder ? 1u : 0u};
    out.write(reinterpret_cast<const char*>(dims), 12);
    nn::write_store(out, pp.store);
    if (!out) throw InvalidInput("policy write failed");
}

inline PolicyParams load_policy(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open policy '" + path + "'");
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "PCFPOL1\0", 8) != 0)
        throw InvalidInput("bad policy header in '" + path + "'");
    std::uint32_t dims[3];
    in.read(reinterpret_cast<char*>(dims), 12);
    EncoderConfig cfg;
    cfg.embed_dim = static_cast<int>(dims[0]);
    cfg.rounds = static_cast<int>(dims[1]);
    cfg.elementwise_decoder = dims[2] != 0;
    RngStream rng(0);  // values are overwritten by the payload
    PolicyParams pp(cfg, rng);
    nn::read_store(in, pp.store, "'" + path + "'");
    return pp;
}

struct EncodingNodes {
    int h = -1;  // node embeddings, n x d (L2-normalized rows, inactive rows zero)
    int g = -1;  // graph embedding, 1 x d (sum over active nodes)
};

// h0 = norm(relu(W0 x)); K rounds of
//   a_v = sum_{u in N(v)} h_u,
//   h_v = norm(relu(W_sage [W_nbr a_v ; W_self h_v]));
// g = sum_v h_v. Weights are shared across rounds. Removed nodes contribute
// neither messages nor pool mass.
inline EncodingNodes encode_on_tape(nn::Tape& tape, PolicyParams& pp, const nn::Mat& features,
                                    const Graph& g, const std::vector<std::uint8_t>& active) {
    if (features.rows() != g.node_count() || features.cols() != 4)
        throw ShapeError("node feature matrix must be n x 4");
    const int w0 = tape.param(pp.w0);
    int h = tape.l2_normalize_rows(tape.relu(tape.matmul_nt(tape.input(features), w0)));
    h = tape.mask_rows(h, active);
    const int w_nbr = tape.param(pp.w_nbr);
    const int w_self = tape.param(pp.w_self);
    const int w_sage = tape.param(pp.w_sage);
    for (int k = 0; k < pp.enc.rounds; ++k) {
        const int agg = tape.neighbor_sum(h, g, active);
        const int from_nbr = tape.matmul_nt(agg, w_nbr);
        const int from_self = tape.matmul_nt(h, w_self);
        const int cat = tape.concat_cols(from_nbr, from_self);
        h = tape.l2_normalize_rows(tape.relu(tape.matmul_nt(cat, w_sage)));
        h = tape.mask_rows(h, active);
    }
    EncodingNodes out;
    out.h = h;
    out.g = tape.sum_rows(h);
    return out;
}

}  // namespace pacifier
