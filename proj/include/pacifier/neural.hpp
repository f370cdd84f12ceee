#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pacifier/errors.hpp"
#include "pacifier/graph.hpp"
#include "pacifier/rng.hpp"

namespace pacifier::nn {

using Mat = Eigen::MatrixXd;

// Named dense parameters with gradient slots and Adam moment accumulators.
class ParamStore {
public:
    struct Entry {
        std::string name;
        Mat value;
        Mat grad;
        Mat m;  // first moment
        Mat v;  // second moment
    };

    int add(const std::string& name, int rows, int cols) {
        for (const Entry& e : entries_)
            if (e.name == name) throw StateError("duplicate parameter '" + name + "'");
        Entry e;
        e.name = name;
        e.value = Mat::Zero(rows, cols);
        e.grad = Mat::Zero(rows, cols);
        e.m = Mat::Zero(rows, cols);
        e.v = Mat::Zero(rows, cols);
        entries_.push_back(std::move(e));
        return static_cast<int>(entries_.size()) - 1;
    }

    int add_glorot(const std::string& name, int rows, int cols, RngStream& rng) {
        int idx = add(name, rows, cols);
        const double limit = std::sqrt(6.0 / (rows + cols));
        Mat& w = entries_[idx].value;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) w(r, c) = rng.uniform(-limit, limit);
        return idx;
    }

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].name == name) return static_cast<int>(i);
        throw StateError("no parameter named '" + name + "'");
    }

    int size() const { return static_cast<int>(entries_.size()); }
    Entry& entry(int i) { return entries_[i]; }
    const Entry& entry(int i) const { return entries_[i]; }
    Mat& value(int i) { return entries_[i].value; }
    const Mat& value(int i) const { return entries_[i].value; }
    Mat& grad(int i) { return entries_[i].grad; }

    void zero_grad() {
        for (Entry& e : entries_) e.grad.setZero();
    }

    // Standard Adam with bias correction; clears gradients afterwards.
    void adam_step(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
        ++step_;
        const double bc1 = 1.0 - std::pow(beta1, step_);
        const double bc2 = 1.0 - std::pow(beta2, step_);
        for (Entry& e : entries_) {
            e.m = beta1 * e.m + (1.0 - beta1) * e.grad;
            e.v = beta2 * e.v + (1.0 - beta2) * e.grad.cwiseProduct(e.grad);
            e.value.array() -=
                lr * (e.m.array() / bc1) / ((e.v.array() / bc2).sqrt() + eps);
            e.grad.setZero();
        }
    }

    int step_count() const { return step_; }

    // Deep copy of the values only (target-network snapshot).
    std::vector<Mat> snapshot_values() const {
        std::vector<Mat> out;
        out.reserve(entries_.size());
        for (const Entry& e : entries_) out.push_back(e.value);
        return out;
    }

    void load_values(const std::vector<Mat>& vals) {
        if (vals.size() != entries_.size()) throw ShapeError("snapshot size mismatch");
        for (std::size_t i = 0; i < vals.size(); ++i) {
            if (vals[i].rows() != entries_[i].value.rows() || vals[i].cols() != entries_[i].value.cols())
                throw ShapeError("snapshot shape mismatch for '" + entries_[i].name + "'");
            entries_[i].value = vals[i];
        }
    }

    bool finite() const {
        for (const Entry& e : entries_)
            if (!e.value.allFinite()) return false;
        return true;
    }

private:
    std::vector<Entry> entries_;
    int step_ = 0;
};

// --- checkpoint payload: magic, entry count, then per entry
//     name length, name, rows, cols, row-major doubles. Binary, bit-exact.

inline void write_store(std::ostream& out, const ParamStore& store) {
    const char magic[8] = {'P', 'C', 'F', 'C', 'K', 'P', 'T', '1'};
    out.write(magic, 8);
    auto write_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    write_u32(static_cast<std::uint32_t>(store.size()));
    for (int i = 0; i < store.size(); ++i) {
        const auto& e = store.entry(i);
        write_u32(static_cast<std::uint32_t>(e.name.size()));
        out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
        write_u32(static_cast<std::uint32_t>(e.value.rows()));
        write_u32(static_cast<std::uint32_t>(e.value.cols()));
        for (int r = 0; r < e.value.rows(); ++r)
            for (int c = 0; c < e.value.cols(); ++c) {
                double d = e.value(r, c);
                out.write(reinterpret_cast<const char*>(&d), 8);
            }
    }
}

inline void read_store(std::istream& in, ParamStore& store, const std::string& what) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "PCFCKPT1", 8) != 0)
        throw InvalidInput("bad checkpoint header in " + what);
    auto read_u32 = [&]() {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    const std::uint32_t count = read_u32();
    if (static_cast<int>(count) != store.size()) throw ShapeError("checkpoint entry count mismatch");
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = read_u32();
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const std::uint32_t rows = read_u32();
        const std::uint32_t cols = read_u32();
        auto& e = store.entry(store.index_of(name));
        if (e.value.rows() != static_cast<int>(rows) || e.value.cols() != static_cast<int>(cols))
            throw ShapeError("checkpoint shape mismatch for '" + name + "'");
        for (std::uint32_t r = 0; r < rows; ++r)
            for (std::uint32_t c = 0; c < cols; ++c) {
                double d;
                in.read(reinterpret_cast<char*>(&d), 8);
                e.value(static_cast<int>(r), static_cast<int>(c)) = d;
            }
    }
    if (!in) throw InvalidInput("truncated checkpoint in " + what);
}

inline void save_checkpoint(const std::string& path, const ParamStore& store) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write checkpoint '" + path + "'");
    write_store(out, store);
    if (!out) throw InvalidInput("checkpoint write failed");
}

inline void load_checkpoint(const std::string& path, ParamStore& store) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open checkpoint '" + path + "'");
    read_store(in, store, "'" + path + "'");
}

// Reverse-mode tape over a small op set. Ops append nodes with recorded
// backward closures; backward() runs the reverse sweep and flushes parameter
// gradients into the owning ParamStore. The networks here are small and
// fixed, so this beats dragging in a tensor framework and keeps training
// bit-deterministic.
class Tape {
public:
    explicit Tape(ParamStore* store = nullptr) : store_(store) {}

    int input(Mat v) { return push(std::move(v), nullptr); }

    int param(int store_idx) {
        if (!store_) throw StateError("tape has no parameter store");
        int id = push(store_->value(store_idx), [this, store_idx](int self) {
            store_->grad(store_idx) += nodes_[self].grad;
        });
        return id;
    }

    const Mat& value(int id) const { return nodes_[id].value; }
    const Mat& grad(int id) const { return nodes_[id].grad; }

    int matmul(int a, int b) {
        if (val(a).cols() != val(b).rows()) throw ShapeError("matmul inner dimensions");
        return push(val(a) * val(b), [this, a, b](int self) {
            const Mat& g = nodes_[self].grad;
            acc(a, g * val(b).transpose());
            acc(b, val(a).transpose() * g);
        });
    }

    // A * B^T; the usual layout for right-multiplying a weight stored as
    // (out x in).
    int matmul_nt(int a, int b) {
        if (val(a).cols() != val(b).cols()) throw ShapeError("matmul_nt inner dimensions");
        return push(val(a) * val(b).transpose(), [this, a, b](int self) {
            const Mat& g = nodes_[self].grad;
            acc(a, g * val(b));
            acc(b, g.transpose() * val(a));
        });
    }

    int add(int a, int b) {
        if (val(a).rows() != val(b).rows() || val(a).cols() != val(b).cols())
            throw ShapeError("add shapes");
        return push(val(a) + val(b), [this, a, b](int self) {
            acc(a, nodes_[self].grad);
            acc(b, nodes_[self].grad);
        });
    }

    int sub(int a, int b) {
        if (val(a).rows() != val(b).rows() || val(a).cols() != val(b).cols())
            throw ShapeError("sub shapes");
        return push(val(a) - val(b), [this, a, b](int self) {
            acc(a, nodes_[self].grad);
            acc(b, -nodes_[self].grad);
        });
    }

    // X (n x d) plus a bias row (1 x d) added to every row.
    int add_bias(int x, int bias) {
        if (val(bias).rows() != 1 || val(bias).cols() != val(x).cols()) throw ShapeError("add_bias");
        Mat v = val(x);
        v.rowwise() += val(bias).row(0);
        return push(std::move(v), [this, x, bias](int self) {
            acc(x, nodes_[self].grad);
            acc(bias, nodes_[self].grad.colwise().sum());
        });
    }

    int relu(int a) {
        return push(val(a).cwiseMax(0.0), [this, a](int self) {
            Mat g = nodes_[self].grad;
            const Mat& v = val(a);
            for (int r = 0; r < g.rows(); ++r)
                for (int c = 0; c < g.cols(); ++c)
                    if (v(r, c) <= 0.0) g(r, c) = 0.0;
            acc(a, g);
        });
    }

    // Rows scaled to unit L2 norm; exact-zero rows pass through unchanged
    // (their subgradient is defined as zero).
    int l2_normalize_rows(int a) {
        const Mat& x = val(a);
        Mat y = x;
        Eigen::VectorXd norms(x.rows());
        for (int r = 0; r < x.rows(); ++r) {
            const double nrm = x.row(r).norm();
            norms[r] = nrm;
            if (nrm > 0.0) y.row(r) /= nrm;
        }
        return push(std::move(y), [this, a, norms](int self) {
            const Mat& g = nodes_[self].grad;
            const Mat& y = nodes_[self].value;
            Mat dx = Mat::Zero(g.rows(), g.cols());
            for (int r = 0; r < g.rows(); ++r) {
                if (norms[r] <= 0.0) continue;
                const double dot = g.row(r).dot(y.row(r));
                dx.row(r) = (g.row(r) - dot * y.row(r)) / norms[r];
            }
            acc(a, dx);
        });
    }

    // out[v] = sum of rows a[u] over active neighbors u of active v.
    int neighbor_sum(int a, const Graph& g, const std::vector<std::uint8_t>& active) {
        const Mat& x = val(a);
        if (x.rows() != g.node_count()) throw ShapeError("neighbor_sum rows != node count");
        Mat y = Mat::Zero(x.rows(), x.cols());
        for (const Edge& e : g.edges()) {
            if (!active[e.u] || !active[e.v]) continue;
            y.row(e.u) += x.row(e.v);
            y.row(e.v) += x.row(e.u);
        }
        const Graph* gp = &g;
        return push(std::move(y), [this, a, gp, active](int self) {
            const Mat& gr = nodes_[self].grad;
            Mat dx = Mat::Zero(gr.rows(), gr.cols());
            for (const Edge& e : gp->edges()) {
                if (!active[e.u] || !active[e.v]) continue;
                dx.row(e.v) += gr.row(e.u);
                dx.row(e.u) += gr.row(e.v);
            }
            acc(a, dx);
        });
    }

    // Zeroes the rows of inactive nodes.
    int mask_rows(int a, const std::vector<std::uint8_t>& active) {
        const Mat& x = val(a);
        if (x.rows() != static_cast<int>(active.size())) throw ShapeError("mask_rows length");
        Mat y = x;
        for (int r = 0; r < y.rows(); ++r)
            if (!active[r]) y.row(r).setZero();
        return push(std::move(y), [this, a, active](int self) {
            Mat g = nodes_[self].grad;
            for (int r = 0; r < g.rows(); ++r)
                if (!active[r]) g.row(r).setZero();
            acc(a, g);
        });
    }

    int concat_cols(int a, int b) {
        if (val(a).rows() != val(b).rows()) throw ShapeError("concat_cols rows");
        Mat y(val(a).rows(), val(a).cols() + val(b).cols());
        y << val(a), val(b);
        const int ca = static_cast<int>(val(a).cols());
        return push(std::move(y), [this, a, b, ca](int self) {
            const Mat& g = nodes_[self].grad;
            acc(a, g.leftCols(ca));
            acc(b, g.rightCols(g.cols() - ca));
        });
    }

    // Column-wise sum: (n x d) -> (1 x d).
    int sum_rows(int a) {
        return push(val(a).colwise().sum(), [this, a](int self) {
            const Mat& g = nodes_[self].grad;
            Mat dx(val(a).rows(), g.cols());
            dx.rowwise() = g.row(0);
            acc(a, dx);
        });
    }

    // (1 x d) -> (n x d) replication.
    int broadcast_row(int a, int n) {
        if (val(a).rows() != 1) throw ShapeError("broadcast_row needs a row vector");
        Mat y(n, val(a).cols());
        y.rowwise() = val(a).row(0);
        return push(std::move(y), [this, a](int self) {
            acc(a, nodes_[self].grad.colwise().sum());
        });
    }

    // Rows of a (n x d) scaled elementwise by a (1 x d) row.
    int mul_rows(int a, int b) {
        if (val(b).rows() != 1 || val(b).cols() != val(a).cols()) throw ShapeError("mul_rows shapes");
        Mat y = val(a);
        for (int r = 0; r < y.rows(); ++r) y.row(r) = y.row(r).cwiseProduct(val(b).row(0));
        return push(std::move(y), [this, a, b](int self) {
            const Mat& g = nodes_[self].grad;
            Mat da(g.rows(), g.cols());
            for (int r = 0; r < g.rows(); ++r) da.row(r) = g.row(r).cwiseProduct(val(b).row(0));
            acc(a, da);
            acc(b, g.cwiseProduct(val(a)).colwise().sum());
        });
    }

    // X scaled by a 1x1 tape scalar.
    int scale_by_scalar(int x, int s) {
        if (val(s).rows() != 1 || val(s).cols() != 1) throw ShapeError("scale needs 1x1 scalar");
        return push(val(s)(0, 0) * val(x), [this, x, s](int self) {
            const Mat& g = nodes_[self].grad;
            acc(x, val(s)(0, 0) * g);
            Mat ds(1, 1);
            ds(0, 0) = g.cwiseProduct(val(x)).sum();
            acc(s, ds);
        });
    }

    int pick(int a, int r, int c) {
        Mat y(1, 1);
        y(0, 0) = val(a)(r, c);
        return push(std::move(y), [this, a, r, c](int self) {
            Mat dx = Mat::Zero(val(a).rows(), val(a).cols());
            dx(r, c) = nodes_[self].grad(0, 0);
            acc(a, dx);
        });
    }

    int mul_const(int a, double c) {
        return push(c * val(a), [this, a, c](int self) { acc(a, c * nodes_[self].grad); });
    }

    int add_const(int a, double c) {
        return push((val(a).array() + c).matrix(), [this, a](int self) { acc(a, nodes_[self].grad); });
    }

    int square(int a) {
        return push(val(a).array().square().matrix(), [this, a](int self) {
            acc(a, 2.0 * val(a).cwiseProduct(nodes_[self].grad));
        });
    }

    int sum_all(int a) {
        Mat y(1, 1);
        y(0, 0) = val(a).sum();
        return push(std::move(y), [this, a](int self) {
            acc(a, Mat::Constant(val(a).rows(), val(a).cols(), nodes_[self].grad(0, 0)));
        });
    }

    // Reverse sweep from a scalar node; accumulates parameter gradients into
    // the store. The tape can be reused afterwards only via clear().
    void backward(int loss) {
        if (nodes_.empty()) throw StateError("backward on empty tape");
        if (val(loss).rows() != 1 || val(loss).cols() != 1)
            throw StateError("backward needs a scalar loss node");
        for (Node& n : nodes_) n.grad.setZero(n.value.rows(), n.value.cols());
        nodes_[loss].grad(0, 0) = 1.0;
        for (int i = loss; i >= 0; --i)
            if (nodes_[i].backward) nodes_[i].backward(i);
    }

    void clear() { nodes_.clear(); }
    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Mat value;
        Mat grad;
        std::function<void(int)> backward;
    };

    const Mat& val(int id) const { return nodes_[id].value; }
    void acc(int id, const Mat& g) { nodes_[id].grad += g; }

    int push(Mat v, std::function<void(int)> bw) {
        Node n;
        n.value = std::move(v);
        n.grad.resize(0, 0);
        n.backward = std::move(bw);
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    ParamStore* store_;
    std::vector<Node> nodes_;
};

}  // namespace pacifier::nn
