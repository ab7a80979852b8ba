// Copyright 2026 The gortho Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gortho/matrix.hpp"

// Minimal reverse-mode autodiff over dense-matrix expressions. The op
// vocabulary is fixed and every adjoint is hand-written; a Tape is an
// append-only graph whose insertion order is the topological order. Graphs
// are built once and re-run by rebinding named inputs, so node values and
// adjoints are allocated at build time and overwritten in place.

namespace gortho {

enum class OpKind {
    Parameter,
    Constant,  // named constants are rebindable inputs
    MatMul,
    Add,
    Sub,
    Mul,        // elementwise
    ScalarMul,  // 1x1 node times matrix node
    Transpose,
    SumAll,
    SumRows,  // reduce over rows: (r x c) -> (1 x c)
    MeanAll,
    Tanh,
    Relu,
    Sigmoid,
    Square,
    SqrtAbsSigned,      // sign(u) sqrt(|u|), zero subgradient inside the guard
    ReciprocalGuarded,  // 1/u with |u| clamped to the guard, zero subgradient inside
    Softplus,           // log(1 + e^u), the stable BCE building block
    Slice,
    Concat,
};

struct Node {
    OpKind op;
    int a = -1, b = -1;
    std::vector<int> srcs;  // Concat only
    std::size_t rows = 0, cols = 0;
    DenseMatrix value;
    DenseMatrix adjoint;
    std::string name;           // Parameter / named Constant
    std::size_t r0 = 0, c0 = 0;  // Slice offset
    int axis = 0;               // Concat: 0 stacks rows, 1 joins columns
    double guard = 1e-10;
    bool bound = true;
    long guard_hits = 0;
};

namespace detail {

inline void mm_nn(DenseMatrix& out, const DenseMatrix& a, const DenseMatrix& b, bool acc) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (!acc) out.fill(0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double* oi = out.data() + i * n;
        const double* ai = a.data() + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            if (aip == 0.0) continue;
            const double* bp = b.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) oi[j] += aip * bp[j];
        }
    }
}

// out += a * b^T
inline void mm_nt_acc(DenseMatrix& out, const DenseMatrix& a, const DenseMatrix& b) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a.data() + i * k;
        double* oi = out.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b.data() + j * k;
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
            oi[j] += s;
        }
    }
}

// out += a^T * b
inline void mm_tn_acc(DenseMatrix& out, const DenseMatrix& a, const DenseMatrix& b) {
    const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
    for (std::size_t p = 0; p < k; ++p) {
        const double* ap = a.data() + p * m;
        const double* bp = b.data() + p * n;
        for (std::size_t i = 0; i < m; ++i) {
            const double api = ap[i];
            if (api == 0.0) continue;
            double* oi = out.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) oi[j] += api * bp[j];
        }
    }
}

}  // namespace detail

class Tape {
public:
    int parameter(std::string name, DenseMatrix init) {
        init.require_finite();
        Node n;
        n.op = OpKind::Parameter;
        n.rows = init.rows();
        n.cols = init.cols();
        n.value = std::move(init);
        n.name = std::move(name);
        return push(std::move(n));
    }

    int constant(DenseMatrix v) {
        v.require_finite();
        Node n;
        n.op = OpKind::Constant;
        n.rows = v.rows();
        n.cols = v.cols();
        n.value = std::move(v);
        return push(std::move(n));
    }

    int scalar_constant(double v) {
        return constant(DenseMatrix::from_entries(1, 1, {v}));
    }

    /// Named constant whose value must be bound before forward().
    int input(std::string name, std::size_t rows, std::size_t cols) {
        Node n;
        n.op = OpKind::Constant;
        n.rows = rows;
        n.cols = cols;
        n.value = DenseMatrix(rows, cols);
        n.name = std::move(name);
        n.bound = false;
        inputs_[n.name] = int(nodes_.size());
        return push(std::move(n));
    }

    int matmul(int a, int b) {
        if (at(a).cols != at(b).rows) throw std::invalid_argument("matmul: shape mismatch");
        return binary(OpKind::MatMul, a, b, at(a).rows, at(b).cols);
    }
    int add(int a, int b) {
        require_same_shape(a, b, "add");
        return binary(OpKind::Add, a, b, at(a).rows, at(a).cols);
    }
    int sub(int a, int b) {
        require_same_shape(a, b, "sub");
        return binary(OpKind::Sub, a, b, at(a).rows, at(a).cols);
    }
    int mul(int a, int b) {
        require_same_shape(a, b, "mul");
        return binary(OpKind::Mul, a, b, at(a).rows, at(a).cols);
    }
    int scalar_mul(int s, int m) {
        if (at(s).rows != 1 || at(s).cols != 1)
            throw std::invalid_argument("scalar_mul: scalar operand must be 1x1");
        return binary(OpKind::ScalarMul, s, m, at(m).rows, at(m).cols);
    }
    int transpose_node(int a) { return unary(OpKind::Transpose, a, at(a).cols, at(a).rows); }
    int sum_all(int a) { return unary(OpKind::SumAll, a, 1, 1); }
    int sum_rows(int a) { return unary(OpKind::SumRows, a, 1, at(a).cols); }
    int mean_all(int a) { return unary(OpKind::MeanAll, a, 1, 1); }
    int tanh_node(int a) { return unary(OpKind::Tanh, a, at(a).rows, at(a).cols); }
    int relu(int a) { return unary(OpKind::Relu, a, at(a).rows, at(a).cols); }
    int sigmoid(int a) { return unary(OpKind::Sigmoid, a, at(a).rows, at(a).cols); }
    int square(int a) { return unary(OpKind::Square, a, at(a).rows, at(a).cols); }
    int softplus(int a) { return unary(OpKind::Softplus, a, at(a).rows, at(a).cols); }

    int sqrt_abs_signed(int a, double guard = 1e-10) {
        const int id = unary(OpKind::SqrtAbsSigned, a, at(a).rows, at(a).cols);
        nodes_[id].guard = guard;
        return id;
    }
    int reciprocal_guarded(int a, double guard = 1e-10) {
        const int id = unary(OpKind::ReciprocalGuarded, a, at(a).rows, at(a).cols);
        nodes_[id].guard = guard;
        return id;
    }

    int slice(int a, std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) {
        if (r0 + rows > at(a).rows || c0 + cols > at(a).cols)
            throw std::invalid_argument("slice: out of range");
        Node n;
        n.op = OpKind::Slice;
        n.a = a;
        n.rows = rows;
        n.cols = cols;
        n.r0 = r0;
        n.c0 = c0;
        return push(std::move(n));
    }

    /// axis 0 stacks rows (inputs share cols); axis 1 joins columns.
    int concat(std::vector<int> srcs, int axis) {
        if (srcs.empty()) throw std::invalid_argument("concat: no inputs");
        std::size_t rows = at(srcs[0]).rows, cols = at(srcs[0]).cols;
        for (std::size_t i = 1; i < srcs.size(); ++i) {
            const Node& s = at(srcs[i]);
            if (axis == 0) {
                if (s.cols != cols) throw std::invalid_argument("concat: cols mismatch");
                rows += s.rows;
            } else {
                if (s.rows != rows) throw std::invalid_argument("concat: rows mismatch");
                cols += s.cols;
            }
        }
        Node n;
        n.op = OpKind::Concat;
        n.srcs = std::move(srcs);
        n.axis = axis;
        n.rows = rows;
        n.cols = cols;
        return push(std::move(n));
    }

    void bind(const std::string& name, const DenseMatrix& v) {
        auto it = inputs_.find(name);
        if (it == inputs_.end())
            throw std::invalid_argument("bind: no input named '" + name + "'");
        Node& n = nodes_[it->second];
        if (v.rows() != n.rows || v.cols() != n.cols)
            throw std::invalid_argument("bind: shape mismatch for '" + name + "'");
        n.value = v;
        n.bound = true;
    }

    void forward(const std::map<std::string, DenseMatrix>& inputs) {
        for (const auto& [k, v] : inputs) bind(k, v);
        forward();
    }

    void forward() {
        guard_hits_ = 0;
        for (Node& n : nodes_) eval(n);
        forward_done_ = true;
    }

    void backward(int output, const DenseMatrix& seed) {
        if (!forward_done_) throw std::logic_error("backward before forward");
        const Node& out = at(output);
        if (seed.rows() != out.rows || seed.cols() != out.cols)
            throw std::invalid_argument("backward: seed shape mismatch");
        for (Node& n : nodes_) n.adjoint.fill(0.0);
        nodes_[output].adjoint = seed;
        for (int i = int(nodes_.size()) - 1; i >= 0; --i) propagate(nodes_[i]);
    }

    const DenseMatrix& value(int id) const { return at(id).value; }
    const DenseMatrix& adjoint(int id) const { return at(id).adjoint; }
    DenseMatrix& mutable_value(int id) { return nodes_[id].value; }

    std::vector<int> parameters() const {
        std::vector<int> p;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].op == OpKind::Parameter) p.push_back(int(i));
        return p;
    }

    std::size_t size() const { return nodes_.size(); }
    long guard_hits() const { return guard_hits_; }

private:
    const Node& at(int id) const { return nodes_.at(std::size_t(id)); }

    void require_same_shape(int a, int b, const char* who) {
        if (at(a).rows != at(b).rows || at(a).cols != at(b).cols)
            throw std::invalid_argument(std::string(who) + ": shape mismatch");
    }

    int push(Node n) {
        n.value = n.value.size() ? std::move(n.value) : DenseMatrix(n.rows, n.cols);
        n.adjoint = DenseMatrix(n.rows, n.cols);
        nodes_.push_back(std::move(n));
        forward_done_ = false;
        return int(nodes_.size()) - 1;
    }

    int unary(OpKind op, int a, std::size_t rows, std::size_t cols) {
        Node n;
        n.op = op;
        n.a = a;
        n.rows = rows;
        n.cols = cols;
        return push(std::move(n));
    }

    int binary(OpKind op, int a, int b, std::size_t rows, std::size_t cols) {
        Node n;
        n.op = op;
        n.a = a;
        n.b = b;
        n.rows = rows;
        n.cols = cols;
        return push(std::move(n));
    }

    void eval(Node& n) {
        switch (n.op) {
            case OpKind::Parameter:
                break;
            case OpKind::Constant:
                if (!n.bound)
                    throw std::logic_error("forward: unbound input '" + n.name + "'");
                break;
            case OpKind::MatMul:
                detail::mm_nn(n.value, nodes_[n.a].value, nodes_[n.b].value, false);
                break;
            case OpKind::Add: {
                const auto& a = nodes_[n.a].value;
                const auto& b = nodes_[n.b].value;
                for (std::size_t i = 0; i < n.value.size(); ++i)
                    n.value.data()[i] = a.data()[i] + b.data()[i];
                break;
            }
            case OpKind::Sub: {
                const auto& a = nodes_[n.a].value;
                const auto& b = nodes_[n.b].value;
                for (std::size_t i = 0; i < n.value.size(); ++i)
                    n.value.data()[i] = a.data()[i] - b.data()[i];
                break;
            }
            case OpKind::Mul: {
                const auto& a = nodes_[n.a].value;
                const auto& b = nodes_[n.b].value;
                for (std::size_t i = 0; i < n.value.size(); ++i)
                    n.value.data()[i] = a.data()[i] * b.data()[i];
                break;
            }
            case OpKind::ScalarMul: {
                const double s = nodes_[n.a].value(0, 0);
                const auto& m = nodes_[n.b].value;
                for (std::size_t i = 0; i < n.value.size(); ++i)
                    n.value.data()[i] = s * m.data()[i];
                break;
            }
            case OpKind::Transpose: {
                const auto& a = nodes_[n.a].value;
                for (std::size_t i = 0; i < a.rows(); ++i)
                    for (std::size_t j = 0; j < a.cols(); ++j) n.value(j, i) = a(i, j);
                break;
            }
            case OpKind::SumAll: {
                double s = 0.0;
                for (double v : nodes_[n.a].value.entries()) s += v;
                n.value(0, 0) = s;
                break;
            }
            case OpKind::SumRows: {
                const auto& a = nodes_[n.a].value;
                n.value.fill(0.0);
                for (std::size_t i = 0; i < a.rows(); ++i)
                    for (std::size_t j = 0; j < a.cols(); ++j) n.value(0, j) += a(i, j);
                break;
            }
            case OpKind::MeanAll: {
                double s = 0.0;
                for (double v : nodes_[n.a].value.entries()) s += v;
                n.value(0, 0) = s / double(nodes_[n.a].value.size());
                break;
            }
            case OpKind::Tanh: {
                const auto& a = nodes_[n.a].value;
                for (std::size_t i = 0; i < n.value.size(); ++i)
                    n.value.data()[i] = std::tanh(a.data()[i]);
                break;
            }
            case OpKind::Relu: {
                const auto& a = nodes_[n.a].value;
                for (std::size_t i = 0; i < n.value.size(); ++i)
                    n.value.data()[i] = a.data()[i] > 0.0 ? a.data()[i] : 0.0;
                break;
            }
            case OpKind::Sigmoid: {
                const auto& a = nodes_[n.a].value;
                for (std::size_t i = 0; i < n.value.size(); ++i) {
                    const double x = a.data()[i];
                    n.value.data()[i] =
                        x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                 : std::exp(x) / (1.0 + std::exp(x));
                }
                break;
            }
            case OpKind::Square: {
                const auto& a = nodes_[n.a].value;
                for (std::size_t i = 0; i < n.value.size(); ++i)
                    n.value.data()[i] = a.data()[i] * a.data()[i];
                break;
            }
            case OpKind::SqrtAbsSigned: {
                const auto& a = nodes_[n.a].value;
                n.guard_hits = 0;
                for (std::size_t i = 0; i < n.value.size(); ++i) {
                    const double x = a.data()[i];
                    if (std::abs(x) < n.guard) ++n.guard_hits;
                    n.value.data()[i] = x >= 0.0 ? std::sqrt(x) : -std::sqrt(-x);
                }
                guard_hits_ += n.guard_hits;
                break;
            }
            case OpKind::ReciprocalGuarded: {
                const auto& a = nodes_[n.a].value;
                n.guard_hits = 0;
                for (std::size_t i = 0; i < n.value.size(); ++i) {
                    const double x = a.data()[i];
                    double xc = x;
                    if (std::abs(x) < n.guard) {
                        ++n.guard_hits;
                        xc = x >= 0.0 ? n.guard : -n.guard;
                    }
                    n.value.data()[i] = 1.0 / xc;
                }
                guard_hits_ += n.guard_hits;
                break;
            }
            case OpKind::Softplus: {
                const auto& a = nodes_[n.a].value;
                for (std::size_t i = 0; i < n.value.size(); ++i) {
                    const double x = a.data()[i];
                    n.value.data()[i] = std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
                }
                break;
            }
            case OpKind::Slice: {
                const auto& a = nodes_[n.a].value;
                for (std::size_t i = 0; i < n.rows; ++i)
                    for (std::size_t j = 0; j < n.cols; ++j)
                        n.value(i, j) = a(n.r0 + i, n.c0 + j);
                break;
            }
            case OpKind::Concat: {
                std::size_t off = 0;
                for (int s : n.srcs) {
                    const auto& v = nodes_[s].value;
                    if (n.axis == 0) {
                        for (std::size_t i = 0; i < v.rows(); ++i)
                            for (std::size_t j = 0; j < v.cols(); ++j)
                                n.value(off + i, j) = v(i, j);
                        off += v.rows();
                    } else {
                        for (std::size_t i = 0; i < v.rows(); ++i)
                            for (std::size_t j = 0; j < v.cols(); ++j)
                                n.value(i, off + j) = v(i, j);
                        off += v.cols();
                    }
                }
                break;
            }
        }
    }

    void propagate(Node& n) {
        const DenseMatrix& s = n.adjoint;
        switch (n.op) {
            case OpKind::Parameter:
            case OpKind::Constant:
                break;
            case OpKind::MatMul:
                detail::mm_nt_acc(nodes_[n.a].adjoint, s, nodes_[n.b].value);
                detail::mm_tn_acc(nodes_[n.b].adjoint, nodes_[n.a].value, s);
                break;
            case OpKind::Add: {
                auto& da = nodes_[n.a].adjoint;
                auto& db = nodes_[n.b].adjoint;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    da.data()[i] += s.data()[i];
                    db.data()[i] += s.data()[i];
                }
                break;
            }
            case OpKind::Sub: {
                auto& da = nodes_[n.a].adjoint;
                auto& db = nodes_[n.b].adjoint;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    da.data()[i] += s.data()[i];
                    db.data()[i] -= s.data()[i];
                }
                break;
            }
            case OpKind::Mul: {
                auto& da = nodes_[n.a].adjoint;
                auto& db = nodes_[n.b].adjoint;
                const auto& va = nodes_[n.a].value;
                const auto& vb = nodes_[n.b].value;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    da.data()[i] += s.data()[i] * vb.data()[i];
                    db.data()[i] += s.data()[i] * va.data()[i];
                }
                break;
            }
            case OpKind::ScalarMul: {
                const double sv = nodes_[n.a].value(0, 0);
                auto& dm = nodes_[n.b].adjoint;
                const auto& m = nodes_[n.b].value;
                double ds = 0.0;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    dm.data()[i] += sv * s.data()[i];
                    ds += s.data()[i] * m.data()[i];
                }
                nodes_[n.a].adjoint(0, 0) += ds;
                break;
            }
            case OpKind::Transpose: {
                auto& da = nodes_[n.a].adjoint;
                for (std::size_t i = 0; i < n.rows; ++i)
                    for (std::size_t j = 0; j < n.cols; ++j) da(j, i) += s(i, j);
                break;
            }
            case OpKind::SumAll: {
                auto& da = nodes_[n.a].adjoint;
                const double sv = s(0, 0);
                for (std::size_t i = 0; i < da.size(); ++i) da.data()[i] += sv;
                break;
            }
            case OpKind::SumRows: {
                auto& da = nodes_[n.a].adjoint;
                for (std::size_t i = 0; i < da.rows(); ++i)
                    for (std::size_t j = 0; j < da.cols(); ++j) da(i, j) += s(0, j);
                break;
            }
            case OpKind::MeanAll: {
                auto& da = nodes_[n.a].adjoint;
                const double sv = s(0, 0) / double(da.size());
                for (std::size_t i = 0; i < da.size(); ++i) da.data()[i] += sv;
                break;
            }
            case OpKind::Tanh: {
                auto& da = nodes_[n.a].adjoint;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    const double y = n.value.data()[i];
                    da.data()[i] += s.data()[i] * (1.0 - y * y);
                }
                break;
            }
            case OpKind::Relu: {
                auto& da = nodes_[n.a].adjoint;
                const auto& x = nodes_[n.a].value;
                for (std::size_t i = 0; i < s.size(); ++i)
                    if (x.data()[i] > 0.0) da.data()[i] += s.data()[i];
                break;
            }
            case OpKind::Sigmoid: {
                auto& da = nodes_[n.a].adjoint;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    const double y = n.value.data()[i];
                    da.data()[i] += s.data()[i] * y * (1.0 - y);
                }
                break;
            }
            case OpKind::Square: {
                auto& da = nodes_[n.a].adjoint;
                const auto& x = nodes_[n.a].value;
                for (std::size_t i = 0; i < s.size(); ++i)
                    da.data()[i] += s.data()[i] * 2.0 * x.data()[i];
                break;
            }
            case OpKind::SqrtAbsSigned: {
                auto& da = nodes_[n.a].adjoint;
                const auto& x = nodes_[n.a].value;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    const double xv = x.data()[i];
                    if (std::abs(xv) < n.guard) continue;  // declared zero subgradient
                    da.data()[i] += s.data()[i] * 0.5 / std::sqrt(std::abs(xv));
                }
                break;
            }
            case OpKind::ReciprocalGuarded: {
                auto& da = nodes_[n.a].adjoint;
                const auto& x = nodes_[n.a].value;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    const double xv = x.data()[i];
                    if (std::abs(xv) < n.guard) continue;
                    da.data()[i] -= s.data()[i] / (xv * xv);
                }
                break;
            }
            case OpKind::Softplus: {
                auto& da = nodes_[n.a].adjoint;
                const auto& x = nodes_[n.a].value;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    const double xv = x.data()[i];
                    const double sig = xv >= 0.0 ? 1.0 / (1.0 + std::exp(-xv))
                                                 : std::exp(xv) / (1.0 + std::exp(xv));
                    da.data()[i] += s.data()[i] * sig;
                }
                break;
            }
            case OpKind::Slice: {
                auto& da = nodes_[n.a].adjoint;
                for (std::size_t i = 0; i < n.rows; ++i)
                    for (std::size_t j = 0; j < n.cols; ++j)
                        da(n.r0 + i, n.c0 + j) += s(i, j);
                break;
            }
            case OpKind::Concat: {
                std::size_t off = 0;
                for (int src : n.srcs) {
                    auto& d = nodes_[src].adjoint;
                    if (n.axis == 0) {
                        for (std::size_t i = 0; i < d.rows(); ++i)
                            for (std::size_t j = 0; j < d.cols(); ++j)
                                d(i, j) += s(off + i, j);
                        off += d.rows();
                    } else {
                        for (std::size_t i = 0; i < d.rows(); ++i)
                            for (std::size_t j = 0; j < d.cols(); ++j)
                                d(i, j) += s(i, off + j);
                        off += d.cols();
                    }
                }
                break;
            }
        }
    }

    std::vector<Node> nodes_;
    std::map<std::string, int> inputs_;
    bool forward_done_ = false;
    long guard_hits_ = 0;
};

struct GradCheckResult {
    double max_rel_error = 0.0;
    long guard_hits = 0;  // entries inside a guard band at the nominal point
};

/// Compare reverse-mode gradients of a scalar output against central finite
/// differences over every parameter entry. Relative error denominator is
/// max(|g|, 1e-8) over both gradient estimates. Points where a guard fired
/// are reported so callers can resample instead of comparing garbage.
inline GradCheckResult grad_check(Tape& tape, int output, double eps = 1e-5) {
    const auto& out = tape.value(output);
    if (out.rows() != 1 || out.cols() != 1)
        throw std::invalid_argument("grad_check: output must be scalar");

    tape.forward();
    GradCheckResult result;
    result.guard_hits = tape.guard_hits();
    tape.backward(output, DenseMatrix::from_entries(1, 1, {1.0}));

    std::vector<DenseMatrix> grads;
    const auto params = tape.parameters();
    grads.reserve(params.size());
    for (int p : params) grads.push_back(tape.adjoint(p));

    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        DenseMatrix& theta = tape.mutable_value(params[pi]);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double saved = theta.data()[i];
            theta.data()[i] = saved + eps;
            tape.forward();
            const double fp = tape.value(output)(0, 0);
            theta.data()[i] = saved - eps;
            tape.forward();
            const double fm = tape.value(output)(0, 0);
            theta.data()[i] = saved;
            const double fd = (fp - fm) / (2.0 * eps);
            const double g = grads[pi].data()[i];
            const double denom = std::max({std::abs(g), std::abs(fd), 1e-8});
            result.max_rel_error = std::max(result.max_rel_error, std::abs(fd - g) / denom);
        }
    }
    tape.forward();  // restore nominal values
    return result;
}

}  // namespace gortho
