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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "gortho/matrix.hpp"

// Dense kernels with no external numerical dependency. Everything here is
// sized for n <= 64; Jacobi methods were chosen for unconditional stability
// on symmetric input, not for speed.

namespace gortho {

struct EigResult {
    DenseMatrix u;           // columns are eigenvectors, M = u diag(d) u^T
    std::vector<double> d;   // eigenvalues, descending
};

struct SvdResult {
    DenseMatrix u;           // m x k, orthonormal columns (k = min(m, n))
    std::vector<double> sigma;  // length k, nonnegative, descending
    DenseMatrix v;           // n x n, orthogonal; columns beyond k pair with sigma = 0
};

namespace detail {

inline double offdiag_frobenius(const DenseMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

/// Complete the first `have` orthonormal columns of `q` (r x c) to a full
/// orthonormal set, writing into columns have..c-1. Deterministic.
inline void orthonormal_complete(DenseMatrix& q, std::size_t have) {
    const std::size_t r = q.rows(), c = q.cols();
    std::size_t next_seed = 0;
    for (std::size_t j = have; j < c; ++j) {
        std::vector<double> cand;
        double nrm = 0.0;
        // Try coordinate axes until one survives projection.
        while (next_seed < r) {
            cand.assign(r, 0.0);
            cand[next_seed++] = 1.0;
            for (std::size_t k = 0; k < j; ++k) {
                double p = 0.0;
                for (std::size_t i = 0; i < r; ++i) p += q(i, k) * cand[i];
                for (std::size_t i = 0; i < r; ++i) cand[i] -= p * q(i, k);
            }
            // Second projection pass for orthogonality at working precision.
            for (std::size_t k = 0; k < j; ++k) {
                double p = 0.0;
                for (std::size_t i = 0; i < r; ++i) p += q(i, k) * cand[i];
                for (std::size_t i = 0; i < r; ++i) cand[i] -= p * q(i, k);
            }
            nrm = norm2(cand);
            if (nrm > 0.1) break;
        }
        if (nrm <= 0.1)
            throw std::runtime_error("orthonormal_complete: no independent direction");
        for (std::size_t i = 0; i < r; ++i) q(i, j) = cand[i] / nrm;
    }
}

}  // namespace detail

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
/// Returns (U, d) with M = U diag(d) U^T, d sorted descending.
/// Convergence: off-diagonal Frobenius norm < 1e-12 * ||M||_F, at most 100
/// sweeps. `tol` is the caller's certification tolerance and only gates the
/// symmetry precheck scale.
inline EigResult sym_eig(const DenseMatrix& m, double tol = 1e-10) {
    (void)tol;
    if (m.rows() != m.cols()) throw std::invalid_argument("sym_eig: non-square");
    const std::size_t n = m.rows();
    // Symmetry precheck.
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
    if (asym > 1e-12 * std::max(1e-300, max_abs(m)))
        throw std::invalid_argument("sym_eig: input not symmetric");

    DenseMatrix a = m;
    DenseMatrix u = DenseMatrix::identity(n);
    const double norm_m = frobenius_norm(m);
    const double thresh = 1e-12 * norm_m;

    bool converged = (n <= 1) || detail::offdiag_frobenius(a) <= thresh;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double ukp = u(k, p), ukq = u(k, q);
                    u(k, p) = c * ukp - s * ukq;
                    u(k, q) = s * ukp + c * ukq;
                }
            }
        }
        converged = detail::offdiag_frobenius(a) <= thresh;
    }
    if (!converged) throw std::runtime_error("sym_eig: no convergence in 100 sweeps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    EigResult r;
    r.d.resize(n);
    r.u = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        r.d[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) r.u(i, j) = u(i, order[j]);
    }
    return r;
}

/// Singular value decomposition by one-sided Jacobi on columns.
/// M = u diag(sigma) v_k^T where v_k is the first k columns of v.
/// v is always full n x n so that callers can read exact null directions.
inline SvdResult svd(const DenseMatrix& m) {
    m.require_finite();
    const std::size_t rows = m.rows(), cols = m.cols();
    if (rows < cols) {
        // Work on the tall transpose and swap factors.
        SvdResult t = svd(transpose(m));
        SvdResult r;
        r.sigma = t.sigma;       // length rows
        r.u = DenseMatrix(rows, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < rows; ++j) r.u(i, j) = t.v(i, j);
        // Full right factor: complete t.u's columns to an n x n basis.
        r.v = DenseMatrix(cols, cols);
        for (std::size_t i = 0; i < cols; ++i)
            for (std::size_t j = 0; j < rows; ++j) r.v(i, j) = t.u(i, j);
        detail::orthonormal_complete(r.v, rows);
        return r;
    }

    const std::size_t n = cols;
    DenseMatrix w = m;
    DenseMatrix v = DenseMatrix::identity(n);
    const double eps = 1e-14;
    bool converged = (n <= 1);
    for (int sweep = 0; sweep < 60 && !converged; ++sweep) {
        converged = true;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double aii = 0.0, ajj = 0.0, aij = 0.0;
                for (std::size_t k = 0; k < rows; ++k) {
                    aii += w(k, i) * w(k, i);
                    ajj += w(k, j) * w(k, j);
                    aij += w(k, i) * w(k, j);
                }
                if (std::abs(aij) <= eps * std::sqrt(aii * ajj) || aii == 0.0 || ajj == 0.0)
                    continue;
                converged = false;
                const double zeta = (ajj - aii) / (2.0 * aij);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < rows; ++k) {
                    const double wi = w(k, i), wj = w(k, j);
                    w(k, i) = c * wi - s * wj;
                    w(k, j) = s * wi + c * wj;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vi = v(k, i), vj = v(k, j);
                    v(k, i) = c * vi - s * vj;
                    v(k, j) = s * vi + c * vj;
                }
            }
        }
    }
    if (!converged) throw std::runtime_error("svd: no convergence in 60 sweeps");

    std::vector<double> nrm(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < rows; ++k) s += w(k, j) * w(k, j);
        nrm[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return nrm[a] > nrm[b]; });

    SvdResult r;
    r.sigma.resize(n);
    r.u = DenseMatrix(rows, n);
    r.v = DenseMatrix(n, n);
    const double zero_tol = nrm.empty() ? 0.0 : 1e-15 * nrm[order.empty() ? 0 : order[0]];
    std::size_t nonzero = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        r.sigma[j] = nrm[src];
        for (std::size_t i = 0; i < n; ++i) r.v(i, j) = v(i, src);
        if (nrm[src] > zero_tol && nrm[src] > 0.0) {
            for (std::size_t i = 0; i < rows; ++i) r.u(i, j) = w(i, src) / nrm[src];
            nonzero = j + 1;
        }
    }
    detail::orthonormal_complete(r.u, nonzero);
    for (std::size_t j = nonzero; j < n; ++j) r.sigma[j] = 0.0;
    return r;
}

/// Orthonormal basis for {x : Mx ~ 0}. A column is null when its singular
/// value is <= rel_tol * sigma_max. Returns an n x 0 matrix when empty.
inline DenseMatrix nullspace(const DenseMatrix& m, double rel_tol = 1e-8) {
    const SvdResult s = svd(m);
    const std::size_t n = m.cols();
    const double smax = s.sigma.empty() ? 0.0 : s.sigma[0];
    const double thresh = rel_tol * smax;
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < n; ++j) {
        const double sj = j < s.sigma.size() ? s.sigma[j] : 0.0;
        if (sj <= thresh) keep.push_back(j);
    }
    DenseMatrix basis(n, keep.size());
    for (std::size_t c = 0; c < keep.size(); ++c)
        for (std::size_t i = 0; i < n; ++i) basis(i, c) = s.v(i, keep[c]);
    return basis;
}

/// Matrix exponential: scale by 2^-s so ||M/2^s||_F <= 0.5, Taylor to order
/// 16, square s times. Rejects ||M||_F > 50.
inline DenseMatrix mat_exp(const DenseMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("mat_exp: non-square");
    m.require_finite();
    const double nrm = frobenius_norm(m);
    if (nrm > 50.0) throw std::domain_error("mat_exp: norm too large (> 50)");
    const std::size_t n = m.rows();

    int s = 0;
    double scaled = nrm;
    while (scaled > 0.5) {
        scaled *= 0.5;
        ++s;
    }
    DenseMatrix b = std::ldexp(1.0, -s) * m;

    DenseMatrix result = DenseMatrix::identity(n);
    DenseMatrix term = DenseMatrix::identity(n);
    for (int k = 1; k <= 16; ++k) {
        term = (1.0 / k) * (term * b);
        result = result + term;
    }
    for (int i = 0; i < s; ++i) result = result * result;
    return result;
}

/// Principal angles between the column spans of two orthonormal bases,
/// ascending in [0, pi/2]: theta_i = arccos(sigma_i(B0^T B1)).
inline std::vector<double> principal_angles(const DenseMatrix& b0, const DenseMatrix& b1) {
    if (b0.cols() != b1.cols())
        throw std::invalid_argument("principal_angles: dimension mismatch");
    if (b0.rows() != b1.rows())
        throw std::invalid_argument("principal_angles: ambient dimension mismatch");
    auto check_orthonormal = [](const DenseMatrix& b, const char* who) {
        const DenseMatrix g = transpose(b) * b;
        const DenseMatrix id = DenseMatrix::identity(b.cols());
        if (max_abs(g - id) > 1e-8)
            throw std::invalid_argument(std::string("principal_angles: ") + who +
                                        " not orthonormal");
    };
    check_orthonormal(b0, "b0");
    check_orthonormal(b1, "b1");
    const SvdResult s = svd(transpose(b0) * b1);
    std::vector<double> angles(s.sigma.size());
    for (std::size_t i = 0; i < s.sigma.size(); ++i) {
        const double c = std::clamp(s.sigma[i], 0.0, 1.0);
        angles[i] = std::acos(c);
    }
    std::sort(angles.begin(), angles.end());
    return angles;
}

}  // namespace gortho
