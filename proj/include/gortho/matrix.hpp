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
#include <initializer_list>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gortho {

/// Dense row-major matrix of doubles. The only matrix type in the library;
/// column vectors are n-by-1 matrices where a matrix is expected.
class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), e_(rows * cols, 0.0) {}

    /// Construct from explicit entries (row-major). Rejects non-finite values.
    static DenseMatrix from_entries(std::size_t rows, std::size_t cols,
                                    std::vector<double> entries) {
        if (entries.size() != rows * cols)
            throw std::invalid_argument("DenseMatrix: entries length != rows*cols");
        DenseMatrix m;
        m.rows_ = rows;
        m.cols_ = cols;
        m.e_ = std::move(entries);
        m.require_finite();
        return m;
    }

    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows.begin()->size();
        std::vector<double> e;
        e.reserve(r * c);
        for (const auto& row : rows) {
            if (row.size() != c)
                throw std::invalid_argument("DenseMatrix: ragged initializer");
            for (double v : row) e.push_back(v);
        }
        return from_entries(r, c, std::move(e));
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static DenseMatrix diag(const std::vector<double>& d) {
        DenseMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    static DenseMatrix column(const std::vector<double>& v) {
        return from_entries(v.size(), 1, v);
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return e_.size(); }
    bool empty() const { return e_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    double* data() { return e_.data(); }
    const double* data() const { return e_.data(); }
    std::span<const double> entries() const { return e_; }
    std::span<double> entries() { return e_; }

    bool same_shape(const DenseMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }

    void fill(double v) { e_.assign(e_.size(), v); }

    /// Column j as a plain vector.
    std::vector<double> col(std::size_t j) const {
        std::vector<double> v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }

    void set_col(std::size_t j, const std::vector<double>& v) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
    }

    bool is_finite() const {
        for (double v : e_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    void require_finite() const {
        if (!is_finite())
            throw std::invalid_argument("DenseMatrix: non-finite entry");
    }

    std::string to_string() const {
        std::ostringstream os;
        os.precision(12);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                if (j) os << ' ';
                os << (*this)(i, j);
            }
            os << '\n';
        }
        return os.str();
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> e_;
};

inline DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("matrix add: shape mismatch");
    DenseMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) r.data()[i] = a.data()[i] + b.data()[i];
    return r;
}

inline DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("matrix sub: shape mismatch");
    DenseMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) r.data()[i] = a.data()[i] - b.data()[i];
    return r;
}

inline DenseMatrix operator*(double s, const DenseMatrix& a) {
    DenseMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) r.data()[i] = s * a.data()[i];
    return r;
}

inline DenseMatrix operator*(const DenseMatrix& a, double s) { return s * a; }

inline DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dims mismatch");
    DenseMatrix r(a.rows(), b.cols());
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    for (std::size_t i = 0; i < m; ++i) {
        double* ri = r.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a(i, p);
            if (aip == 0.0) continue;
            const double* bp = b.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) ri[j] += aip * bp[j];
        }
    }
    return r;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix r(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
    return r;
}

inline DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("hadamard: shape mismatch");
    DenseMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) r.data()[i] = a.data()[i] * b.data()[i];
    return r;
}

inline double frobenius_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.entries()) s += v * v;
    return std::sqrt(s);
}

inline double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double v : a.entries()) m = std::max(m, std::abs(v));
    return m;
}

inline double trace(const DenseMatrix& a) {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
    return t;
}

/// Frobenius inner product <a, b> = sum_ij a_ij b_ij.
inline double frobenius_dot(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("frobenius_dot: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

inline std::vector<double> matvec(const DenseMatrix& a, const std::vector<double>& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: dim mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dim mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

/// In-place Gauss-Jordan inverse with partial pivoting. Sizes here are tiny
/// (n <= 64), so no blocking.
inline DenseMatrix inverse(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("inverse: non-square");
    const std::size_t n = a.rows();
    DenseMatrix w = a;
    DenseMatrix inv = DenseMatrix::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(w(r, c)) > std::abs(w(piv, c))) piv = r;
        if (std::abs(w(piv, c)) < 1e-300)
            throw std::runtime_error("inverse: singular matrix");
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(w(piv, j), w(c, j));
                std::swap(inv(piv, j), inv(c, j));
            }
        }
        const double d = w(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            w(c, j) /= d;
            inv(c, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = w(r, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                w(r, j) -= f * w(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

/// Determinant via LU with partial pivoting.
inline double determinant(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("determinant: non-square");
    const std::size_t n = a.rows();
    DenseMatrix w = a;
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(w(r, c)) > std::abs(w(piv, c))) piv = r;
        if (w(piv, c) == 0.0) return 0.0;
        if (piv != c) {
            det = -det;
            for (std::size_t j = 0; j < n; ++j) std::swap(w(piv, j), w(c, j));
        }
        det *= w(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = w(r, c) / w(c, c);
            if (f == 0.0) continue;
            for (std::size_t j = c; j < n; ++j) w(r, j) -= f * w(c, j);
        }
    }
    return det;
}

inline bool approx_equal(const DenseMatrix& a, const DenseMatrix& b, double tol) {
    return a.same_shape(b) && max_abs(a - b) <= tol;
}

}  // namespace gortho
