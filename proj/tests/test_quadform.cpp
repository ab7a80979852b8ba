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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "gortho/quadform.hpp"
#include "gortho/rng.hpp"

using namespace gortho;

TEST_CASE("symmetrize stores (M + M^T)/2") {
    const auto f = QuadraticForm::symmetrize(DenseMatrix::from_rows({{1, 2}, {0, 1}}));
    CHECK(f.matrix()(0, 1) == Catch::Approx(1.0));
    CHECK(f.matrix()(1, 0) == Catch::Approx(1.0));
    CHECK(f.matrix()(0, 0) == Catch::Approx(1.0));

    const auto sym = DenseMatrix::from_rows({{2, 1}, {1, 2}});
    CHECK(max_abs(QuadraticForm::symmetrize(sym).matrix() - sym) == 0.0);

    CHECK_THROWS_AS(QuadraticForm::symmetrize(DenseMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("Minkowski signature is (1,3,0)") {
    const auto eta = QuadraticForm::minkowski(4);
    CHECK(eta.signature().positive == 1);
    CHECK(eta.signature().negative == 3);
    CHECK(eta.signature().zero == 0);
    CHECK(eta.invertible());
}

TEST_CASE("quad_eval examples") {
    const auto id = QuadraticForm::euclidean(2);
    CHECK(id.quad_eval({1, 2}) == Catch::Approx(5.0));

    const auto eta = QuadraticForm::minkowski(4);
    CHECK(eta.quad_eval({5, 3, 0, 0}) == Catch::Approx(16.0));  // 25 - 9
    CHECK(eta.quad_eval({1, 1, 0, 0}) == Catch::Approx(0.0).margin(1e-14));

    CHECK_THROWS_AS(id.quad_eval({1, 2, 3}), std::invalid_argument);
}

TEST_CASE("pseudonorm carries the sign of the form value") {
    const auto eta = QuadraticForm::minkowski(4);
    CHECK(eta.pseudonorm({5, 3, 0, 0}) == Catch::Approx(4.0));
    CHECK(eta.pseudonorm({3, 5, 0, 0}) == Catch::Approx(-4.0));

    const auto id = QuadraticForm::euclidean(2);
    CHECK(id.pseudonorm({3, 4}) == Catch::Approx(5.0));

    // Inside the null band the pseudonorm is exactly zero.
    CHECK(eta.pseudonorm({1, 1, 0, 0}) == 0.0);
}

TEST_CASE("normalize divides by the pseudonorm") {
    const auto id = QuadraticForm::euclidean(2);
    const auto v = id.normalize({3, 4});
    CHECK(v[0] == Catch::Approx(0.6));
    CHECK(v[1] == Catch::Approx(0.8));

    const auto eta = QuadraticForm::minkowski(4);
    const auto w = eta.normalize({5, 3, 0, 0});
    CHECK(w[0] == Catch::Approx(1.25));
    CHECK(w[1] == Catch::Approx(0.75));

    CHECK_THROWS_AS(eta.normalize({1, 1, 0, 0}), NearNullCone);
}

TEST_CASE("normalized vectors have unit |form value|") {
    Rng rng(5150);
    const auto eta = QuadraticForm::minkowski(4);
    int done = 0;
    while (done < 500) {
        const auto x = rng.normal_vector(4);
        if (eta.near_null(x)) continue;
        const auto v = eta.normalize(x);
        CHECK(std::abs(std::abs(eta.quad_eval(v)) - 1.0) < 1e-10);
        ++done;
    }
}

TEST_CASE("gram examples") {
    const auto eta = QuadraticForm::minkowski(4);
    const std::vector<std::vector<double>> es = {{1, 0, 0, 0}, {0, 1, 0, 0}};
    const auto g = eta.gram(es);
    CHECK(g(0, 0) == Catch::Approx(1.0));
    CHECK(g(1, 1) == Catch::Approx(-1.0));
    CHECK(g(0, 1) == Catch::Approx(0.0).margin(1e-15));

    const auto id = QuadraticForm::euclidean(2);
    const auto g2 = id.gram({{1, 0}, {1, 0}});
    CHECK(g2(0, 0) == Catch::Approx(1.0));
    CHECK(g2(0, 1) == Catch::Approx(1.0));
    CHECK(g2(1, 0) == Catch::Approx(1.0));

    // Cross term 15 - 15 = 0.
    const auto g3 = eta.gram({{5, 3, 0, 0}, {3, 5, 0, 0}});
    CHECK(g3(0, 0) == Catch::Approx(16.0));
    CHECK(g3(1, 1) == Catch::Approx(-16.0));
    CHECK(g3(0, 1) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("canonical gauge examples") {
    const auto eta = QuadraticForm::minkowski(4);
    const auto g1 = QuadraticForm::symmetrize(2.0 * eta.matrix()).canonical_gauge();
    // ||eta||_F = 2, so 2*eta gauges to eta/2.
    CHECK(max_abs(g1.matrix() - 0.5 * eta.matrix()) < 1e-12);

    const auto g2 = QuadraticForm::symmetrize(-1.0 * DenseMatrix::identity(2)).canonical_gauge();
    CHECK(max_abs(g2.matrix() - (1.0 / std::sqrt(2.0)) * DenseMatrix::identity(2)) < 1e-12);

    // Idempotence.
    Rng rng(88);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.index(4);
        auto m = rng.normal_matrix(n, n);
        const auto f = QuadraticForm::symmetrize(m);
        if (f.frobenius() <= 0.0) continue;
        const auto once = f.canonical_gauge();
        const auto twice = once.canonical_gauge();
        CHECK(max_abs(once.matrix() - twice.matrix()) < 1e-12);
        CHECK(once.frobenius() == Catch::Approx(1.0));
    }

    CHECK_THROWS_AS(QuadraticForm::symmetrize(DenseMatrix(2, 2)).canonical_gauge(),
                    std::invalid_argument);
}

TEST_CASE("gauge keeps a tied indefinite spectrum's sign unless trace is zero") {
    // eta has eigenvalues {1,-1,-1,-1}: tie in magnitude, nonzero trace -> keep.
    const auto eta = QuadraticForm::minkowski(4);
    CHECK(max_abs(eta.canonical_gauge().matrix() - 0.5 * eta.matrix()) < 1e-12);

    // Trace-zero tie: first row-major nonzero entry decides.
    const auto off = QuadraticForm::symmetrize(DenseMatrix::from_rows({{0, -1}, {-1, 0}}));
    const auto gauged = off.canonical_gauge();
    CHECK(gauged.matrix()(0, 1) > 0.0);
}

TEST_CASE("form CSV round trip") {
    Rng rng(7);
    const auto f = QuadraticForm::symmetrize(rng.normal_matrix(4, 4));
    const auto back = QuadraticForm::from_csv_string(f.to_csv());
    CHECK(max_abs(back.matrix() - f.matrix()) == 0.0);

    std::istringstream bad("3,2\n1,1");
    CHECK_THROWS_AS(QuadraticForm::from_csv(bad), std::invalid_argument);
}

TEST_CASE("eigendecomposition cache reconstructs A") {
    Rng rng(21);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng.index(5);
        const auto f = QuadraticForm::symmetrize(rng.normal_matrix(n, n));
        const auto rec = f.eig_u() * DenseMatrix::diag(f.eig_d()) * transpose(f.eig_u());
        CHECK(frobenius_norm(rec - f.matrix()) <= 1e-9 * std::max(1e-30, f.frobenius()));
        const auto& s = f.signature();
        CHECK(s.positive + s.negative + s.zero == n);
    }
}
