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
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gortho/matrix.hpp"
#include "gortho/numerics.hpp"

namespace gortho {

/// Raised when an operation needs |x^T A x| bounded away from zero but the
/// input sits on (or numerically at) the null cone. Callers are expected to
/// resample rather than recover.
class NearNullCone : public std::runtime_error {
public:
    explicit NearNullCone(const std::string& what) : std::runtime_error(what) {}
};

struct Signature {
    std::size_t positive = 0;
    std::size_t negative = 0;
    std::size_t zero = 0;
};

/// A quadratic form q(x) = x^T A x with cached eigendecomposition and
/// signature. A is stored exactly symmetrized; immutable after construction.
class QuadraticForm {
public:
    /// Accepts any square matrix; stores (M + M^T)/2.
    static QuadraticForm symmetrize(const DenseMatrix& m) {
        if (m.rows() != m.cols())
            throw std::invalid_argument("QuadraticForm: non-square input");
        const std::size_t n = m.rows();
        DenseMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
        return QuadraticForm(std::move(a));
    }

    static QuadraticForm from_diagonal(const std::vector<double>& d) {
        return QuadraticForm(DenseMatrix::diag(d));
    }

    static QuadraticForm euclidean(std::size_t n) {
        return QuadraticForm(DenseMatrix::identity(n));
    }

    /// diag(1, -1, ..., -1) in dimension n.
    static QuadraticForm minkowski(std::size_t n) {
        std::vector<double> d(n, -1.0);
        if (n > 0) d[0] = 1.0;
        return QuadraticForm(DenseMatrix::diag(d));
    }

    std::size_t dim() const { return a_.rows(); }
    const DenseMatrix& matrix() const { return a_; }
    const DenseMatrix& eig_u() const { return eig_u_; }
    const std::vector<double>& eig_d() const { return eig_d_; }
    const Signature& signature() const { return sig_; }
    double frobenius() const { return norm_; }
    bool invertible() const { return sig_.zero == 0; }
    bool is_diagonal(double tol = 1e-12) const {
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < dim(); ++j)
                if (i != j && std::abs(a_(i, j)) > tol * std::max(1.0, norm_)) return false;
        return true;
    }

    /// Near-null predicate scale for a vector x: 1e-8 * ||A||_F * ||x||_2^2.
    double null_eps(const std::vector<double>& x) const {
        return 1e-8 * norm_ * dot(x, x);
    }

    double quad_eval(const std::vector<double>& x) const {
        if (x.size() != dim()) throw std::invalid_argument("quad_eval: dimension mismatch");
        return dot(x, matvec(a_, x));
    }

    /// sign(x^T A x) * sqrt(|x^T A x|); exact 0 inside the null-cone band.
    double pseudonorm(const std::vector<double>& x) const {
        const double q = quad_eval(x);
        if (std::abs(q) < null_eps(x)) return 0.0;
        return q >= 0.0 ? std::sqrt(q) : -std::sqrt(-q);
    }

    /// x / ||x||_A. Throws NearNullCone on (numerically) lightlike input.
    std::vector<double> normalize(const std::vector<double>& x) const {
        const double q = quad_eval(x);
        if (std::abs(q) < null_eps(x))
            throw NearNullCone("normalize: input within null-cone band");
        const double r = q >= 0.0 ? std::sqrt(q) : -std::sqrt(-q);
        std::vector<double> v(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i] / r;
        return v;
    }

    bool near_null(const std::vector<double>& x) const {
        return std::abs(quad_eval(x)) < null_eps(x);
    }

    /// Pairwise form values: entry (i, j) = x_i^T A x_j.
    DenseMatrix gram(const std::vector<std::vector<double>>& xs) const {
        const std::size_t p = xs.size();
        for (const auto& x : xs)
            if (x.size() != dim()) throw std::invalid_argument("gram: dimension mismatch");
        DenseMatrix g(p, p);
        std::vector<std::vector<double>> ax(p);
        for (std::size_t j = 0; j < p; ++j) ax[j] = matvec(a_, xs[j]);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i; j < p; ++j) {
                const double v = dot(xs[i], ax[j]);
                g(i, j) = v;
                g(j, i) = v;
            }
        return g;
    }

    /// Scale/sign gauge: unit Frobenius norm, sign fixed so the dominant
    /// eigenvalue is positive. When +max and -max tie in magnitude the form
    /// keeps its sign unless the trace is exactly zero, in which case the
    /// first nonzero entry in row-major order is made positive. The residual
    /// A vs -A ambiguity in tied spectra is why metrics also report |cos|.
    QuadraticForm canonical_gauge() const {
        if (norm_ <= 0.0) throw std::invalid_argument("canonical_gauge: zero form");
        double pos_max = 0.0, neg_max = 0.0;
        for (double l : eig_d_) {
            if (l > 0.0) pos_max = std::max(pos_max, l);
            else neg_max = std::max(neg_max, -l);
        }
        double flip = 1.0;
        const double tie_tol = 1e-10 * std::max(pos_max, neg_max);
        if (neg_max > pos_max + tie_tol) {
            flip = -1.0;
        } else if (std::abs(neg_max - pos_max) <= tie_tol) {
            const double tr = trace(a_);
            if (std::abs(tr) <= 1e-10 * norm_) {
                for (double v : a_.entries()) {
                    if (std::abs(v) > 1e-9 * norm_) {
                        if (v < 0.0) flip = -1.0;
                        break;
                    }
                }
            }
        }
        return QuadraticForm((flip / norm_) * a_);
    }

    /// Row-major CSV block with an `n=<dim>` header line.
    std::string to_csv() const {
        std::ostringstream os;
        os.precision(17);
        os << "n=" << dim() << "\n";
        for (std::size_t i = 0; i < dim(); ++i) {
            for (std::size_t j = 0; j < dim(); ++j) {
                if (j) os << ",";
                os << a_(i, j);
            }
            os << "\n";
        }
        return os.str();
    }

    static QuadraticForm from_csv(std::istream& in) {
        std::string line;
        if (!std::getline(in, line)) throw std::invalid_argument("form csv: empty input");
        if (line.rfind("n=", 0) != 0)
            throw std::invalid_argument("form csv: missing n=<dim> header");
        const std::size_t n = std::stoul(line.substr(2));
        DenseMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::getline(in, line))
                throw std::invalid_argument("form csv: truncated matrix block");
            std::istringstream ls(line);
            std::string cell;
            for (std::size_t j = 0; j < n; ++j) {
                if (!std::getline(ls, cell, ','))
                    throw std::invalid_argument("form csv: short row");
                a(i, j) = std::stod(cell);
            }
        }
        a.require_finite();
        return symmetrize(a);
    }

    static QuadraticForm from_csv_string(const std::string& s) {
        std::istringstream in(s);
        return from_csv(in);
    }

private:
    explicit QuadraticForm(DenseMatrix a) : a_(std::move(a)) {
        a_.require_finite();
        norm_ = frobenius_norm(a_);
        const EigResult e = sym_eig(a_);
        eig_u_ = e.u;
        eig_d_ = e.d;
        double lmax = 0.0;
        for (double l : eig_d_) lmax = std::max(lmax, std::abs(l));
        const double zero_tol = 1e-10 * lmax;
        for (double l : eig_d_) {
            if (std::abs(l) <= zero_tol) ++sig_.zero;
            else if (l > 0.0) ++sig_.positive;
            else ++sig_.negative;
        }
    }

    DenseMatrix a_;
    DenseMatrix eig_u_;
    std::vector<double> eig_d_;
    Signature sig_;
    double norm_ = 0.0;
};

}  // namespace gortho
