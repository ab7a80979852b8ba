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
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "gortho/matrix.hpp"
#include "gortho/numerics.hpp"
#include "gortho/quadform.hpp"
#include "gortho/rng.hpp"

// Exact machinery for G = { g : g^T A g = A }: membership certification,
// sampling through the Lie algebra, A-orthogonal Householder reflections,
// and the constructive canonical alignment (definite, semidefinite and
// indefinite block steps composed into the full pipeline).

namespace gortho {

/// Raised when a Householder direction (or an alignment anchor) is too close
/// to the null cone for the construction to be well conditioned.
class NearNullDirection : public NearNullCone {
public:
    explicit NearNullDirection(const std::string& what) : NearNullCone(what) {}
};

/// A dense matrix certified to satisfy g^T A g = A within tolerance.
struct GroupElement {
    DenseMatrix g;
    double residual = 0.0;  // ||g^T A g - A||_F at certification time
};

inline double membership_residual(const QuadraticForm& form, const DenseMatrix& g) {
    const DenseMatrix& a = form.matrix();
    return frobenius_norm(transpose(g) * a * g - a);
}

/// true iff ||g^T A g - A||_F <= tol * ||A||_F. Also reports the residual.
inline std::pair<bool, double> is_member(const QuadraticForm& form, const DenseMatrix& g,
                                         double tol) {
    if (g.rows() != g.cols() || g.rows() != form.dim())
        throw std::invalid_argument("is_member: dimension mismatch");
    const double r = membership_residual(form, g);
    return {r <= tol * form.frobenius(), r};
}

/// Certify and wrap a candidate element. For invertible forms the element
/// must be unimodular to 1e-8 (every construction here lands on |det| = 1);
/// for singular forms the group contains non-unimodular elements (the
/// semidefinite alignment of the appendix has det = -d1 a^2), so only
/// invertibility is required.
inline GroupElement certify_member(const QuadraticForm& form, DenseMatrix g,
                                   double tol = 1e-8) {
    const auto [ok, residual] = is_member(form, g, tol);
    if (!ok)
        throw std::runtime_error("certify_member: residual " + std::to_string(residual) +
                                 " exceeds tolerance");
    const double det = determinant(g);
    if (det == 0.0 || std::abs(det) < 1e-300)
        throw std::runtime_error("certify_member: singular candidate");
    if (form.invertible() && std::abs(std::abs(det) - 1.0) > 1e-8)
        throw std::runtime_error("certify_member: |det| != 1 for invertible form");
    return GroupElement{std::move(g), residual};
}

inline GroupElement compose(const QuadraticForm& form, const GroupElement& a,
                            const GroupElement& b, double tol = 1e-7) {
    return certify_member(form, a.g * b.g, tol);
}

inline GroupElement inverse_element(const QuadraticForm& form, const GroupElement& a,
                                    double tol = 1e-7) {
    return certify_member(form, inverse(a.g), tol);
}

/// Draw a group element as exp(X) with X = A^{-1} K, K skew-symmetric with
/// N(0, scale^2) entries. A X = K is skew, so X^T A + A X = 0 and exp(X)
/// preserves the form.
inline GroupElement sample_element(const QuadraticForm& form, Rng& rng, double scale) {
    if (!form.invertible())
        throw std::invalid_argument("sample_element: form must be invertible");
    if (scale > 3.0) throw std::invalid_argument("sample_element: scale > 3");
    const std::size_t n = form.dim();
    DenseMatrix k(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = rng.normal(0.0, scale);
            k(i, j) = v;
            k(j, i) = -v;
        }
    const DenseMatrix x = inverse(form.matrix()) * k;
    return certify_member(form, mat_exp(x));
}

/// A-orthogonal Householder reflection R = I - 2 w w^T A / (w^T A w).
/// Self-inverse and form-preserving for any non-null direction w.
inline GroupElement a_householder(const QuadraticForm& form, const std::vector<double>& w) {
    if (w.size() != form.dim())
        throw std::invalid_argument("a_householder: dimension mismatch");
    const double waw = form.quad_eval(w);
    const double eps_h = 1e-8 * form.frobenius() * dot(w, w);
    if (std::abs(waw) < eps_h)
        throw NearNullDirection("a_householder: direction within null band");
    const std::size_t n = form.dim();
    const auto aw = matvec(form.matrix(), w);
    DenseMatrix r = DenseMatrix::identity(n);
    const double c = 2.0 / waw;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(i, j) -= c * w[i] * aw[j];
    // Directions just above eps_h can be too ill conditioned to certify at
    // 1e-10; surface those as the same typed error so callers resample.
    const auto [ok, residual] = is_member(form, r, 1e-10);
    if (!ok)
        throw NearNullDirection("a_householder: certification failed near the null cone");
    return GroupElement{std::move(r), residual};
}

/// Result of aligning x onto a coordinate axis: w x = gamma e_{target_axis}.
struct AlignmentResult {
    GroupElement w;
    double gamma = 0.0;
    std::size_t target_axis = 0;
};

namespace detail {

/// Euclidean Householder sending z to ||z|| e_axis (identity if already there).
inline DenseMatrix euclid_align(const std::vector<double>& z, std::size_t axis) {
    const std::size_t n = z.size();
    const double nz = norm2(z);
    DenseMatrix r = DenseMatrix::identity(n);
    if (nz == 0.0) return r;
    std::vector<double> u = z;
    u[axis] -= nz;
    const double uu = dot(u, u);
    if (uu <= 1e-30 * nz * nz) return r;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(i, j) -= 2.0 * u[i] * u[j] / uu;
    return r;
}

/// Embed a block matrix at the given index set of an n x n identity.
inline DenseMatrix embed_block(std::size_t n, const std::vector<std::size_t>& idx,
                               const DenseMatrix& block) {
    DenseMatrix w = DenseMatrix::identity(n);
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) w(idx[i], idx[j]) = block(i, j);
    return w;
}

inline void check_alignment(const DenseMatrix& w, const std::vector<double>& x,
                            double gamma, std::size_t axis) {
    auto wx = matvec(w, x);
    wx[axis] -= gamma;
    if (norm2(wx) > 1e-8 * std::max(1e-300, norm2(x)))
        throw std::runtime_error("alignment: residual exceeds 1e-8 * ||x||");
}

}  // namespace detail

/// Definite-block alignment: for diag(d) with all entries of one sign and
/// x != 0, returns W with W^T D W = D and W x = alpha e_1,
/// alpha = sqrt(|x^T D x| / |d_1|) > 0. Construction: S = sqrt(|D|),
/// W = S^{-1} R S with R the Euclidean reflection aligning S x.
inline AlignmentResult align_definite(const std::vector<double>& d,
                                      const std::vector<double>& x) {
    const std::size_t n = d.size();
    if (x.size() != n) throw std::invalid_argument("align_definite: dim mismatch");
    if (n == 0) throw std::invalid_argument("align_definite: empty block");
    const bool negative = d[0] < 0.0;
    for (double di : d) {
        if (di == 0.0 || (di < 0.0) != negative)
            throw std::invalid_argument("align_definite: entries must share one sign");
    }
    if (norm2(x) == 0.0) throw std::invalid_argument("align_definite: zero vector");

    std::vector<double> s(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = std::sqrt(std::abs(d[i]));
        z[i] = s[i] * x[i];
    }
    const DenseMatrix r = detail::euclid_align(z, 0);
    DenseMatrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w(i, j) = r(i, j) * s[j] / s[i];
    const double alpha = norm2(z) / s[0];
    detail::check_alignment(w, x, alpha, 0);
    const auto form = QuadraticForm::from_diagonal(d);
    return AlignmentResult{certify_member(form, std::move(w)), alpha, 0};
}

/// Semidefinite merge: D = diag(d_0..d_{k-1}, 0, ..., 0) with the leading
/// block one-signed (negatives handled by negation) and a zero tail,
/// y = a e_0 + b e_k (k is 0-based here). Returns W with W^T D W = D and
/// W y = a e_0, built as W = S^{-1} R S with
/// R = sqrt(d1) a b E_{k,0} - d1 a^2 E_{k,k} + sum_{i != k} E_{i,i} and
/// S = sqrt(d1) E_{0,0} + sum_{i != 0} E_{i,i}. Note det(W) = -d1 a^2: for
/// singular forms the group is not unimodular.
inline AlignmentResult align_semidefinite(const std::vector<double>& d, double a, double b,
                                          std::size_t k) {
    const std::size_t n = d.size();
    if (k == 0 || k >= n)
        throw std::invalid_argument("align_semidefinite: k out of range (0-based, nonzero)");
    if (d[0] == 0.0) throw std::invalid_argument("align_semidefinite: d_1 must be nonzero");
    for (std::size_t i = 0; i < n; ++i) {
        if (i < k) {
            if (d[i] == 0.0 || (d[i] < 0.0) != (d[0] < 0.0))
                throw std::invalid_argument(
                    "align_semidefinite: leading block must be one-signed");
        } else if (d[i] != 0.0) {
            throw std::invalid_argument("align_semidefinite: tail must be zero");
        }
    }
    const double anchor_scale = std::hypot(a, b);
    if (a == 0.0 || std::abs(a) < 1e-12 * anchor_scale)
        throw NearNullDirection("align_semidefinite: anchor a ~ 0 degenerates the lemma");

    // Negative-definite leading block: the group of D and of -D coincide, so
    // run the construction against |d|.
    const double d1 = std::abs(d[0]);
    const double sq = std::sqrt(d1);

    DenseMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        if (i != k) r(i, i) = 1.0;
    r(k, 0) += sq * a * b;
    r(k, k) = -d1 * a * a;

    // S and S^{-1} are diagonal; apply them entrywise.
    DenseMatrix w = r;
    for (std::size_t j = 0; j < n; ++j) w(0, j) /= sq;  // S^{-1} row scale
    for (std::size_t i = 0; i < n; ++i) w(i, 0) *= sq;  // S column scale

    std::vector<double> y(n, 0.0);
    y[0] = a;
    y[k] = b;
    detail::check_alignment(w, y, a, 0);
    const auto form = QuadraticForm::from_diagonal(d);
    return AlignmentResult{certify_member(form, std::move(w)), a, 0};
}

/// Indefinite two-axis alignment (hyperbolic boost): D with d_0 > 0 and
/// d_k < 0 (k 0-based), x = a e_0 + b e_k. With q = d_0 a^2 - |d_k| b^2 and
/// beta = 1 / sqrt(|q|): if q > 0, W x = alpha e_0 with
/// alpha = sqrt(q / d_0); if q < 0, W x = alpha e_k with
/// alpha = sqrt(-q / |d_k|).
inline AlignmentResult align_indefinite(const std::vector<double>& d, std::size_t k,
                                        double a, double b) {
    const std::size_t n = d.size();
    if (k == 0 || k >= n) throw std::invalid_argument("align_indefinite: k out of range");
    if (!(d[0] > 0.0) || !(d[k] < 0.0))
        throw std::invalid_argument("align_indefinite: need d_1 > 0 and d_k < 0");
    const double d1 = d[0];
    const double dk = -d[k];
    const double q = d1 * a * a - dk * b * b;
    const double scale = d1 * a * a + dk * b * b;
    if (std::abs(q) < 1e-12 * std::max(scale, 1e-300))
        throw NearNullCone("align_indefinite: input on the null cone");

    const double beta = 1.0 / std::sqrt(std::abs(q));
    const double z1 = std::sqrt(d1) * a;
    const double zk = std::sqrt(dk) * b;
    // Boost in the sqrt(|D|)-scaled coordinates, then undo the scaling.
    double c, s;
    std::size_t target;
    double alpha;
    if (q > 0.0) {
        c = beta * z1;
        s = -beta * zk;
        target = 0;
        alpha = std::sqrt(q / d1);
    } else {
        c = beta * zk;
        s = -beta * z1;
        target = k;
        alpha = std::sqrt(-q / dk);
    }
    DenseMatrix w = DenseMatrix::identity(n);
    w(0, 0) = c;
    w(0, k) = s * std::sqrt(dk) / std::sqrt(d1);
    w(k, 0) = s * std::sqrt(d1) / std::sqrt(dk);
    w(k, k) = c;

    std::vector<double> x(n, 0.0);
    x[0] = a;
    x[k] = b;
    detail::check_alignment(w, x, alpha, target);
    const auto form = QuadraticForm::from_diagonal(d);
    return AlignmentResult{certify_member(form, std::move(w)), alpha, target};
}

/// Full alignment pipeline for a diagonal-gauge form: composes the definite
/// block alignments, the Euclidean alignment of the zero block, the
/// semidefinite merge, and the final boost, yielding W x = gamma e_target
/// with W^T D W = D. target is the leading positive axis when x^T D x > 0
/// and the leading negative axis when x^T D x < 0.
inline AlignmentResult canonical_align(const QuadraticForm& form,
                                       const std::vector<double>& x) {
    if (!form.is_diagonal())
        throw std::invalid_argument("canonical_align: form must be in diagonal gauge");
    const std::size_t n = form.dim();
    if (x.size() != n) throw std::invalid_argument("canonical_align: dim mismatch");
    const double q = form.quad_eval(x);
    if (std::abs(q) < form.null_eps(x))
        throw NearNullCone("canonical_align: input within null-cone band");

    std::vector<double> dg(n);
    for (std::size_t i = 0; i < n; ++i) dg[i] = form.matrix()(i, i);
    double dmax = 0.0;
    for (double v : dg) dmax = std::max(dmax, std::abs(v));
    const double zero_tol = 1e-10 * dmax;

    std::vector<std::size_t> pos, neg, zer;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(dg[i]) <= zero_tol) zer.push_back(i);
        else if (dg[i] > 0.0) pos.push_back(i);
        else neg.push_back(i);
    }

    DenseMatrix w = DenseMatrix::identity(n);
    std::vector<double> cur = x;
    auto apply = [&](const DenseMatrix& step) {
        w = step * w;
        cur = matvec(step, cur);
    };

    // Step 1: align within the positive and negative definite blocks.
    double alpha = 0.0, beta1 = 0.0, beta2 = 0.0;
    if (!pos.empty()) {
        std::vector<double> db(pos.size()), xb(pos.size());
        for (std::size_t i = 0; i < pos.size(); ++i) {
            db[i] = dg[pos[i]];
            xb[i] = x[pos[i]];
        }
        if (norm2(xb) > 0.0) {
            const auto r = align_definite(db, xb);
            apply(detail::embed_block(n, pos, r.w.g));
            alpha = r.gamma;
        }
    }
    if (!neg.empty()) {
        std::vector<double> db(neg.size()), xb(neg.size());
        for (std::size_t i = 0; i < neg.size(); ++i) {
            db[i] = dg[neg[i]];
            xb[i] = x[neg[i]];
        }
        if (norm2(xb) > 0.0) {
            const auto r = align_definite(db, xb);
            apply(detail::embed_block(n, neg, r.w.g));
            beta1 = r.gamma;
        }
    }
    // Step 2: Euclidean alignment of the zero block.
    if (!zer.empty()) {
        std::vector<double> xb(zer.size());
        for (std::size_t i = 0; i < zer.size(); ++i) xb[i] = x[zer[i]];
        beta2 = norm2(xb);
        if (beta2 > 0.0) apply(detail::embed_block(n, zer, detail::euclid_align(xb, 0)));
    }

    // Step 3: merge the zero-block coefficient into a signed block. The paper
    // merges negative+zero; when the negative anchor vanishes the mirrored
    // lemma applies against the positive block.
    const double e_pos = pos.empty() ? 0.0 : dg[pos[0]] * alpha * alpha;
    const double e_neg = neg.empty() ? 0.0 : -dg[neg[0]] * beta1 * beta1;
    const double anchor_floor = 1e-12 * (e_pos + e_neg);
    if (beta2 > 1e-14 * norm2(x)) {
        if (!neg.empty() && e_neg > anchor_floor) {
            std::vector<std::size_t> idx = neg;
            idx.insert(idx.end(), zer.begin(), zer.end());
            std::vector<double> db(idx.size(), 0.0);
            for (std::size_t i = 0; i < neg.size(); ++i) db[i] = dg[neg[i]];
            const auto r = align_semidefinite(db, beta1, beta2, neg.size());
            apply(detail::embed_block(n, idx, r.w.g));
        } else if (!pos.empty() && e_pos > anchor_floor) {
            std::vector<std::size_t> idx = pos;
            idx.insert(idx.end(), zer.begin(), zer.end());
            std::vector<double> db(idx.size(), 0.0);
            for (std::size_t i = 0; i < pos.size(); ++i) db[i] = dg[pos[i]];
            const auto r = align_semidefinite(db, alpha, beta2, pos.size());
            apply(detail::embed_block(n, idx, r.w.g));
        } else {
            throw NearNullCone("canonical_align: zero-block component with no signed anchor");
        }
    }

    // Step 4: boost between the leading positive and negative axes.
    std::size_t target;
    double gamma;
    if (!pos.empty() && !neg.empty()) {
        const std::vector<std::size_t> idx = {pos[0], neg[0]};
        const std::vector<double> db = {dg[pos[0]], dg[neg[0]]};
        const auto r = align_indefinite(db, 1, alpha, beta1);
        apply(detail::embed_block(n, idx, r.w.g));
        target = r.target_axis == 0 ? pos[0] : neg[0];
        gamma = r.gamma;
    } else if (!pos.empty()) {
        target = pos[0];
        gamma = alpha;
    } else if (!neg.empty()) {
        target = neg[0];
        gamma = beta1;
    } else {
        throw NearNullCone("canonical_align: form has no signed directions");
    }

    detail::check_alignment(w, x, gamma, target);
    return AlignmentResult{certify_member(form, std::move(w)), gamma, target};
}

/// Transport x to y inside one orbit: W = W_y^{-1} W_x conjugated back into
/// the original (possibly non-diagonal) gauge through the eigendiagonalizer.
/// Requires matched pseudonorms within 1e-6 relative.
inline GroupElement transport(const QuadraticForm& form, const std::vector<double>& x,
                              const std::vector<double>& y) {
    const double nx = form.pseudonorm(x);
    const double ny = form.pseudonorm(y);
    if (nx == 0.0 || ny == 0.0)
        throw NearNullCone("transport: null input");
    if (std::abs(nx - ny) > 1e-6 * std::max(std::abs(nx), std::abs(ny)))
        throw std::invalid_argument("transport: pseudonorm mismatch");

    const DenseMatrix& u = form.eig_u();  // A = U diag(d) U^T
    const auto diag_form = QuadraticForm::from_diagonal(form.eig_d());
    const auto ut = transpose(u);
    const auto ax = canonical_align(diag_form, matvec(ut, x));
    const auto ay = canonical_align(diag_form, matvec(ut, y));
    if (ax.target_axis != ay.target_axis)
        throw std::invalid_argument("transport: inputs on different orbit sheets");

    const DenseMatrix wtilde = inverse(ay.w.g) * ax.w.g;
    DenseMatrix w = u * wtilde * ut;
    auto wx = matvec(w, x);
    for (std::size_t i = 0; i < wx.size(); ++i) wx[i] -= y[i];
    if (norm2(wx) > 1e-6 * std::max(1e-300, norm2(y)))
        throw std::runtime_error("transport: residual exceeds 1e-6 * ||y||");
    return certify_member(form, std::move(w), 1e-7);
}

/// Orbit test: both non-null and pseudonorms agree within tol.
inline bool orbit_equivalent(const QuadraticForm& form, const std::vector<double>& x,
                             const std::vector<double>& y, double tol) {
    const double nx = form.pseudonorm(x);
    const double ny = form.pseudonorm(y);
    if (nx == 0.0 || ny == 0.0) return false;
    if ((nx > 0.0) != (ny > 0.0)) return false;
    return std::abs(nx - ny) <= tol * std::max(std::abs(nx), std::abs(ny));
}

}  // namespace gortho
