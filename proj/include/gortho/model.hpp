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

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gortho/autodiff.hpp"
#include "gortho/group.hpp"
#include "gortho/matrix.hpp"
#include "gortho/quadform.hpp"
#include "gortho/rng.hpp"

// The decomposed network: phi_s emits an A-orthogonal Householder direction,
// phi_n consumes the pseudonorm (or the Gram features in tuple mode), and the
// form is either frozen or realized from Householder-product / diagonal
// parameters. The same builder produces training graphs (batched, loss on
// tape) and single-sample evaluation graphs.

namespace gortho {

enum class ActionType { Invariant, Left, Conjugation };
enum class FormMode { Frozen, Learnable };

inline const char* to_string(ActionType a) {
    switch (a) {
        case ActionType::Invariant: return "invariant";
        case ActionType::Left: return "left";
        case ActionType::Conjugation: return "conjugation";
    }
    return "?";
}

inline const char* to_string(FormMode m) {
    return m == FormMode::Frozen ? "frozen" : "learnable";
}

struct MlpParams {
    std::vector<DenseMatrix> weights;  // layer l: (out x in)
    std::vector<DenseMatrix> biases;   // (out x 1)

    std::size_t layers() const { return weights.size(); }

    static MlpParams init(std::size_t in_dim, const std::vector<std::size_t>& hidden,
                          std::size_t out_dim, Rng& rng) {
        MlpParams p;
        std::size_t prev = in_dim;
        std::vector<std::size_t> dims = hidden;
        dims.push_back(out_dim);
        for (std::size_t d : dims) {
            const double sd = 1.0 / std::sqrt(double(prev));
            p.weights.push_back(rng.normal_matrix(d, prev, sd));
            p.biases.push_back(DenseMatrix(d, 1));
            prev = d;
        }
        return p;
    }

    /// Plain forward: tanh hidden layers, linear output.
    std::vector<double> forward(const std::vector<double>& x) const {
        DenseMatrix h = DenseMatrix::column(x);
        for (std::size_t l = 0; l < weights.size(); ++l) {
            h = weights[l] * h + biases[l];
            if (l + 1 < weights.size())
                for (auto& v : h.entries()) v = std::tanh(v);
        }
        return h.col(0);
    }
};

/// U parameterized as a product of n Euclidean Householder reflections plus
/// an unconstrained diagonal: A = U^T diag(d) U. Orthogonality of U is exact
/// by construction for any parameter values.
struct LearnableFormParams {
    std::vector<DenseMatrix> householder_vs;  // n vectors, each n x 1
    DenseMatrix d_params;                     // n x 1

    static LearnableFormParams init(std::size_t n, Rng& rng) {
        LearnableFormParams p;
        for (std::size_t i = 0; i < n; ++i) {
            DenseMatrix v(n, 1);
            for (std::size_t r = 0; r < n; ++r) v(r, 0) = rng.normal(0.0, 0.01);
            v(i, 0) += 1.0;
            p.householder_vs.push_back(std::move(v));
        }
        p.d_params = DenseMatrix(n, 1);
        p.d_params.fill(1.0);
        return p;
    }

    DenseMatrix realize_u() const {
        const std::size_t n = householder_vs.size();
        DenseMatrix u = DenseMatrix::identity(n);
        for (const auto& v : householder_vs) {
            double vv = 0.0;
            for (double e : v.entries()) vv += e * e;
            if (vv < 1e-12) continue;  // degenerate factor contributes I
            DenseMatrix h = DenseMatrix::identity(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    h(i, j) -= 2.0 * v(i, 0) * v(j, 0) / vv;
            u = u * h;
        }
        return u;
    }

    /// A = U^T diag(d) U, exactly symmetric by construction.
    QuadraticForm realize() const {
        const DenseMatrix u = realize_u();
        std::vector<double> d(d_params.rows());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = d_params(i, 0);
        return QuadraticForm::symmetrize(transpose(u) * DenseMatrix::diag(d) * u);
    }
};

struct GOrthoNet {
    std::size_t n = 0;  // ambient dimension
    std::size_t p = 1;  // tuple size (1 = single-vector mode)
    ActionType action = ActionType::Invariant;
    FormMode form_mode = FormMode::Frozen;
    bool has_masses = false;         // tuple mode: per-point invariant channels
    bool symmetrize_output = false;  // conjugation mode with symmetric targets
    std::size_t out_dim = 1;         // phi_n output entries
    double eps_skip = 0.1;           // w = Mlp(x_hat) + eps_skip * x_hat

    MlpParams phi_s;  // empty in invariant mode
    MlpParams phi_n;
    LearnableFormParams form_params;  // learnable mode
    QuadraticForm frozen_form = QuadraticForm::euclidean(1);

    bool tuple_mode() const { return p > 1; }
    std::size_t phi_n_inputs() const {
        return tuple_mode() ? p * (p + 1) / 2 + (has_masses ? p : 0) : 1;
    }

    /// The form the model currently believes in.
    QuadraticForm current_form() const {
        return form_mode == FormMode::Frozen ? frozen_form : form_params.realize();
    }
};

inline GOrthoNet make_gortho_net(std::size_t n, std::size_t p, ActionType action,
                                 FormMode form_mode, const QuadraticForm& reference_form,
                                 Rng& rng, std::size_t out_dim, bool has_masses = false,
                                 bool symmetrize_output = false,
                                 const std::vector<std::size_t>& hidden = {64, 64}) {
    GOrthoNet net;
    net.n = n;
    net.p = p;
    net.action = action;
    net.form_mode = form_mode;
    net.frozen_form = reference_form;
    net.has_masses = has_masses;
    net.symmetrize_output = symmetrize_output;
    net.out_dim = out_dim;
    if (action != ActionType::Invariant)
        net.phi_s = MlpParams::init(n, hidden, n, rng);
    net.phi_n = MlpParams::init(net.phi_n_inputs(), hidden, out_dim, rng);
    if (form_mode == FormMode::Learnable) net.form_params = LearnableFormParams::init(n, rng);
    return net;
}

/// One tape parameter backed by a slot in the model. After training, copy
/// tape values back through these.
struct ParamBinding {
    int node = -1;
    DenseMatrix* slot = nullptr;
};

struct ModelGraph {
    Tape tape;
    std::size_t batch = 0;
    int x_in = -1;     // (p*n) x B
    int mass_in = -1;  // p x B when masses are present
    int y_in = -1;     // target entries x B (matrix targets column-flattened)
    int loss = -1;     // scalar (only in training graphs)
    int pred = -1;     // output entries x B, column-flattened predictions
    int a_node = -1;   // realized or frozen A
    int r_node = -1;   // 1 x B pseudonorms of the (first) input vector
    int g_reg = -1;    // sampled group element for the equivariance regularizer
    std::vector<ParamBinding> bindings;
};

namespace model_detail {

/// Parameter nodes of one MLP; created once, applicable to several inputs.
struct MlpNodes {
    std::vector<int> w, b;
};

inline MlpNodes tape_mlp_params(Tape& t, MlpParams& mlp, const std::string& prefix,
                                std::vector<ParamBinding>& bindings) {
    MlpNodes nodes;
    for (std::size_t l = 0; l < mlp.layers(); ++l) {
        const int w = t.parameter(prefix + "_w" + std::to_string(l), mlp.weights[l]);
        const int b = t.parameter(prefix + "_b" + std::to_string(l), mlp.biases[l]);
        bindings.push_back({w, &mlp.weights[l]});
        bindings.push_back({b, &mlp.biases[l]});
        nodes.w.push_back(w);
        nodes.b.push_back(b);
    }
    return nodes;
}

inline int tape_mlp_apply(Tape& t, const MlpNodes& mlp, int input, int ones_row) {
    int h = input;
    for (std::size_t l = 0; l < mlp.w.size(); ++l) {
        h = t.add(t.matmul(mlp.w[l], h), t.matmul(mlp.b[l], ones_row));
        if (l + 1 < mlp.w.size()) h = t.tanh_node(h);
    }
    return h;
}

/// realize_form on the tape: U = H(v_1)...H(v_n), A = U^T diag(d) U.
inline int tape_realize_form(Tape& t, GOrthoNet& net, std::vector<ParamBinding>& bindings) {
    const std::size_t n = net.n;
    const int eye = t.constant(DenseMatrix::identity(n));
    const int two = t.scalar_constant(2.0);
    int u = eye;
    auto& fp = net.form_params;
    for (std::size_t i = 0; i < fp.householder_vs.size(); ++i) {
        const int v = t.parameter("hv" + std::to_string(i), fp.householder_vs[i]);
        bindings.push_back({v, &fp.householder_vs[i]});
        const int vt = t.transpose_node(v);
        const int vvt = t.matmul(v, vt);
        const int vtv = t.matmul(vt, v);
        const int rec = t.reciprocal_guarded(vtv, 1e-12);
        const int h = t.sub(eye, t.scalar_mul(rec, t.scalar_mul(two, vvt)));
        u = t.matmul(u, h);
    }
    const int d = t.parameter("d_params", fp.d_params);
    bindings.push_back({d, &fp.d_params});
    // diag(d) U realized as (d 1^T) elementwise-times U, then A = U^T (dU).
    const int ones_row = t.constant(DenseMatrix::from_entries(1, n, std::vector<double>(n, 1.0)));
    const int dbrd = t.matmul(d, ones_row);
    const int du = t.mul(dbrd, u);
    return t.matmul(t.transpose_node(u), du);
}

/// Pseudonorm row of a batch: 1 x B with sign(q) sqrt(|q|) per column.
inline int tape_pseudonorm_row(Tape& t, int a_node, int xblock) {
    const int ax = t.matmul(a_node, xblock);
    const int q = t.sum_rows(t.mul(xblock, ax));
    return t.sqrt_abs_signed(q, 1e-8);
}

/// Scale columns of m (r x B) by the entries of row (1 x B).
inline int tape_col_scale(Tape& t, int m, int row, std::size_t rows) {
    const int ones = t.constant(DenseMatrix::from_entries(rows, 1, std::vector<double>(rows, 1.0)));
    return t.mul(m, t.matmul(ones, row));
}

struct ReflectionNodes {
    int r = -1;  // n x n reflection for one sample
};

/// Householder reflection R = I - 2 w w^T A / (w^T A w) for one column of a
/// batched direction matrix.
inline ReflectionNodes tape_reflection(Tape& t, int a_node, int wcol, std::size_t n, int eye,
                                       int two) {
    const int aw = t.matmul(a_node, wcol);                       // n x 1
    const int s = t.matmul(t.transpose_node(wcol), aw);          // 1 x 1
    const int rec = t.reciprocal_guarded(s, 1e-9);
    const int wwta = t.matmul(wcol, t.transpose_node(aw));       // w (Aw)^T = w w^T A
    const int r = t.sub(eye, t.scalar_mul(rec, t.scalar_mul(two, wwta)));
    return {r};
}

/// Reshape an (n*n) x 1 column into n x n (column-major pairing with how
/// predictions are flattened back).
inline int tape_col_to_matrix(Tape& t, int col, std::size_t n) {
    std::vector<int> cols;
    cols.reserve(n);
    for (std::size_t j = 0; j < n; ++j) cols.push_back(t.slice(col, j * n, 0, n, 1));
    return t.concat(cols, 1);
}

inline int tape_matrix_to_col(Tape& t, int m, std::size_t n) {
    std::vector<int> cols;
    cols.reserve(n);
    for (std::size_t j = 0; j < n; ++j) cols.push_back(t.slice(m, 0, j, n, 1));
    return t.concat(cols, 0);
}

}  // namespace model_detail

struct GraphOptions {
    std::size_t batch = 1;
    bool with_loss = true;
    bool classification = false;   // BCE on a single logit row
    double regularizer_weight = 0.0;
};

/// Build the forward (and optionally loss) graph for a batch of inputs.
/// Inputs: "x" (p*n x B), "y" (targets x B, training graphs), "m" (p x B,
/// mass channels), "g_reg" (n x n, only when the regularizer is enabled).
inline ModelGraph build_graph(GOrthoNet& net, const GraphOptions& opt) {
    ModelGraph g;
    Tape& t = g.tape;
    const std::size_t n = net.n;
    const std::size_t b = opt.batch;
    g.batch = b;

    g.x_in = t.input("x", net.p * n, b);
    if (net.has_masses) g.mass_in = t.input("m", net.p, b);

    const int eye = t.constant(DenseMatrix::identity(n));
    const int two = t.scalar_constant(2.0);
    const int ones_b = t.constant(DenseMatrix::from_entries(1, b, std::vector<double>(b, 1.0)));

    // The form.
    g.a_node = net.form_mode == FormMode::Frozen
                   ? t.constant(net.frozen_form.matrix())
                   : model_detail::tape_realize_form(t, net, g.bindings);

    // First-vector block and its pseudonorms.
    const int x0 = net.tuple_mode() ? t.slice(g.x_in, 0, 0, n, b) : g.x_in;
    g.r_node = model_detail::tape_pseudonorm_row(t, g.a_node, x0);
    const int rinv = t.reciprocal_guarded(g.r_node, 1e-6);
    const int xhat = model_detail::tape_col_scale(t, x0, rinv, n);

    // phi_n features.
    int features;
    if (!net.tuple_mode()) {
        features = g.r_node;  // 1 x B
    } else {
        std::vector<int> rows;
        std::vector<int> blocks(net.p);
        for (std::size_t k = 0; k < net.p; ++k) blocks[k] = t.slice(g.x_in, k * n, 0, n, b);
        for (std::size_t i = 0; i < net.p; ++i) {
            const int axi = t.matmul(g.a_node, blocks[i]);
            for (std::size_t j = i; j < net.p; ++j)
                rows.push_back(t.sum_rows(t.mul(blocks[j], axi)));
        }
        if (net.has_masses) rows.push_back(g.mass_in);
        features = t.concat(rows, 0);
    }

    const int phi_n_out =
        model_detail::tape_mlp(t, net, net.phi_n, "phi_n", features, ones_b, g.bindings);

    if (net.action == ActionType::Invariant) {
        g.pred = phi_n_out;
        if (opt.with_loss) {
            g.y_in = t.input("y", net.out_dim, b);
            if (opt.classification) {
                // Stable BCE on logits: softplus(z) - y z, averaged.
                g.loss = t.mean_all(t.sub(t.softplus(phi_n_out), t.mul(t.constantish(), phi_n_out)));
            } else {
                g.loss = t.mean_all(t.square(t.sub(phi_n_out, g.y_in)));
            }
        }
        return g;
    }

    // Scale-invariant branch: w = Mlp(x_hat) + eps_skip * x_hat.
    const int mlp_out =
        model_detail::tape_mlp(t, net, net.phi_s, "phi_s", xhat, ones_b, g.bindings);
    const int eps = t.scalar_constant(net.eps_skip);
    const int wdirs = t.add(mlp_out, t.scalar_mul(eps, xhat));  // n x B

    const bool matrix_out = net.action == ActionType::Conjugation;
    const std::size_t out_entries = matrix_out ? n * n : n;
    if (net.out_dim != out_entries)
        throw std::invalid_argument("build_graph: phi_n out_dim inconsistent with action");

    if (opt.with_loss) g.y_in = t.input("y", out_entries, b);

    const int half = t.scalar_constant(0.5);
    std::vector<int> pred_cols, sq_losses;
    pred_cols.reserve(b);
    for (std::size_t i = 0; i < b; ++i) {
        const int wcol = t.slice(wdirs, 0, i, n, 1);
        const auto refl = model_detail::tape_reflection(t, g.a_node, wcol, n, eye, two);
        int pred_col;
        if (matrix_out) {
            int m = model_detail::tape_col_to_matrix(t, t.slice(phi_n_out, 0, i, n * n, 1), n);
            if (net.symmetrize_output)
                m = t.scalar_mul(half, t.add(m, t.transpose_node(m)));
            const int conj = t.matmul(refl.r, t.matmul(m, refl.r));
            pred_col = model_detail::tape_matrix_to_col(t, conj, n);
        } else {
            pred_col = t.matmul(refl.r, t.slice(phi_n_out, 0, i, n, 1));
        }
        pred_cols.push_back(pred_col);
        if (opt.with_loss) {
            const int ycol = t.slice(g.y_in, 0, i, out_entries, 1);
            sq_losses.push_back(t.sum_all(t.square(t.sub(pred_col, ycol))));
        }
    }
    g.pred = t.concat(pred_cols, 1);
    if (opt.with_loss) {
        const int total = t.sum_all(t.concat(sq_losses, 1));
        g.loss = t.scalar_mul(t.scalar_constant(1.0 / double(b * out_entries)), total);
    }
    return g;
}

}  // namespace gortho
