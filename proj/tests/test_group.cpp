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

#include "gortho/group.hpp"

using namespace gortho;

namespace {

/// Random invertible symmetric form with eigenvalues bounded away from zero,
/// so sampled elements stay well conditioned.
QuadraticForm random_invertible_form(Rng& rng, std::size_t n) {
    while (true) {
        auto m = rng.normal_matrix(n, n);
        auto f = QuadraticForm::symmetrize(m);
        bool ok = true;
        double lmax = 0.0;
        for (double l : f.eig_d()) lmax = std::max(lmax, std::abs(l));
        for (double l : f.eig_d())
            if (std::abs(l) < 0.15 * lmax) ok = false;
        if (ok && f.invertible()) return f;
    }
}

std::vector<double> random_nonnull(Rng& rng, const QuadraticForm& form) {
    while (true) {
        auto x = rng.normal_vector(form.dim());
        if (std::abs(form.quad_eval(x)) >= 0.1) return x;
    }
}

}  // namespace

TEST_CASE("is_member basics") {
    const auto eta = QuadraticForm::minkowski(4);
    auto [ok, res] = is_member(eta, DenseMatrix::identity(4), 1e-8);
    CHECK(ok);
    CHECK(res == 0.0);

    const double t = 0.7;
    const auto rot = DenseMatrix::from_rows(
        {{std::cos(t), -std::sin(t)}, {std::sin(t), std::cos(t)}});
    CHECK(is_member(QuadraticForm::euclidean(2), rot, 1e-8).first);

    // g^T eta g = diag(4,-1,-1,-1) != eta.
    CHECK_FALSE(is_member(eta, DenseMatrix::diag({2, 1, 1, 1}), 1e-8).first);

    CHECK_THROWS_AS(is_member(eta, DenseMatrix::identity(3), 1e-8), std::invalid_argument);
}

TEST_CASE("sample_element produces certified members") {
    Rng rng(1001);
    const auto eta = QuadraticForm::minkowski(4);
    for (int t = 0; t < 50; ++t) {
        const auto g = sample_element(eta, rng, 0.5);
        CHECK(g.residual <= 1e-8 * eta.frobenius());
        CHECK(std::abs(std::abs(determinant(g.g)) - 1.0) < 1e-8);
    }
    CHECK_THROWS_AS(sample_element(QuadraticForm::from_diagonal({1, 0}), rng, 0.5),
                    std::invalid_argument);
}

TEST_CASE("sample_element closed forms in 2d") {
    // For form I the generator is the drawn skew matrix itself: rotation.
    // For eta2 = diag(1,-1), X = eta K is symmetric and exp(X) is the boost
    // [[cosh s, -sinh s], [-sinh s, cosh s]] when K = [[0,-s],[s,0]].
    const double s = 0.8;
    const auto eta2 = QuadraticForm::from_diagonal({1, -1});
    const auto k = DenseMatrix::from_rows({{0, -s}, {s, 0}});
    const auto x = inverse(eta2.matrix()) * k;
    CHECK(max_abs(x - DenseMatrix::from_rows({{0, -s}, {-s, 0}})) < 1e-15);
    const auto boost = mat_exp(x);
    const auto expected = DenseMatrix::from_rows(
        {{std::cosh(s), -std::sinh(s)}, {-std::sinh(s), std::cosh(s)}});
    CHECK(max_abs(boost - expected) < 1e-12);
    CHECK(is_member(eta2, boost, 1e-10).first);
}

TEST_CASE("a_householder examples") {
    const auto id3 = QuadraticForm::euclidean(3);
    const auto r1 = a_householder(id3, {1, 0, 0});
    CHECK(max_abs(r1.g - DenseMatrix::diag({-1, 1, 1})) < 1e-12);

    const auto eta = QuadraticForm::minkowski(4);
    const auto r2 = a_householder(eta, {0, 1, 0, 0});
    CHECK(max_abs(r2.g - DenseMatrix::diag({1, -1, 1, 1})) < 1e-12);

    CHECK_THROWS_AS(a_householder(eta, {1, 1, 0, 0}), NearNullDirection);
}

TEST_CASE("a_householder is self-inverse, form-preserving, and reflects w") {
    Rng rng(2002);
    int done = 0;
    while (done < 1000) {
        const std::size_t n = 2 + rng.index(5);
        const auto form = random_invertible_form(rng, n);
        const auto w = rng.normal_vector(n);
        const double waw = form.quad_eval(w);
        // A healthy margin from the cone: near-boundary directions throw
        // NearNullDirection by contract instead of certifying (the residual
        // grows as the squared inverse margin, so 1e-10 needs ~1e-2).
        if (std::abs(waw) < 1e-2 * form.frobenius() * dot(w, w)) continue;
        const auto r = a_householder(form, w);
        CHECK(max_abs(r.g * r.g - DenseMatrix::identity(n)) < 1e-10);
        CHECK(membership_residual(form, r.g) <= 1e-10 * form.frobenius());
        auto rw = matvec(r.g, w);
        for (std::size_t i = 0; i < n; ++i) rw[i] += w[i];
        CHECK(norm2(rw) < 1e-10 * norm2(w));
        ++done;
    }
}

TEST_CASE("align_definite examples") {
    // Already aligned.
    const auto r1 = align_definite({1, 4}, {3, 0});
    CHECK(r1.gamma == Catch::Approx(3.0));
    CHECK(r1.target_axis == 0);

    // x^T D x = 36, alpha = sqrt(36/1) = 6.
    const auto r2 = align_definite({1, 4}, {0, 3});
    CHECK(r2.gamma == Catch::Approx(6.0));
    auto wx = matvec(r2.w.g, {0, 3});
    CHECK(wx[0] == Catch::Approx(6.0));
    CHECK(std::abs(wx[1]) < 1e-12);

    // Euclidean O(3) alignment.
    const auto r3 = align_definite({1, 1, 1}, {1, 1, 1});
    CHECK(r3.gamma == Catch::Approx(std::sqrt(3.0)));

    CHECK_THROWS_AS(align_definite({1, -1}, {1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(align_definite({1, 1}, {0, 0}), std::invalid_argument);
}

TEST_CASE("align_definite handles all-negative blocks") {
    Rng rng(303);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng.index(4);
        std::vector<double> d(n);
        for (auto& v : d) v = -rng.uniform(0.2, 3.0);
        auto x = rng.normal_vector(n);
        if (norm2(x) < 1e-6) continue;
        const auto r = align_definite(d, x);
        const auto form = QuadraticForm::from_diagonal(d);
        CHECK(membership_residual(form, r.w.g) <= 1e-8 * form.frobenius());
        CHECK(r.gamma > 0.0);
    }
}

TEST_CASE("align_semidefinite spec example") {
    // d = (2,0,0), y = e1 + 5 e2 (0-based axis 1), expect W y = e1.
    const auto r = align_semidefinite({2, 0, 0}, 1.0, 5.0, 1);
    const auto wy = matvec(r.w.g, {1, 5, 0});
    CHECK(wy[0] == Catch::Approx(1.0));
    CHECK(std::abs(wy[1]) < 1e-12);
    CHECK(std::abs(wy[2]) < 1e-12);
    const auto form = QuadraticForm::from_diagonal({2, 0, 0});
    CHECK(membership_residual(form, r.w.g) <= 1e-10);

    // b = 0: same construction, y already on the axis.
    const auto r0 = align_semidefinite({2, 0, 0}, 1.0, 0.0, 1);
    const auto wy0 = matvec(r0.w.g, {1, 0, 0});
    CHECK(wy0[0] == Catch::Approx(1.0));

    // a = 0 degenerates (W would be singular).
    CHECK_THROWS_AS(align_semidefinite({2, 0, 0}, 0.0, 5.0, 1), NearNullDirection);
}

TEST_CASE("align_semidefinite fuzz including negative leading blocks") {
    Rng rng(404);
    for (int t = 0; t < 300; ++t) {
        const std::size_t lead = 1 + rng.index(3);
        const std::size_t zeros = 1 + rng.index(3);
        const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
        std::vector<double> d(lead + zeros, 0.0);
        for (std::size_t i = 0; i < lead; ++i) d[i] = sign * rng.uniform(0.2, 3.0);
        double a = rng.normal();
        if (std::abs(a) < 1e-3) a = 1e-3;
        const double b = rng.normal();
        const auto r = align_semidefinite(d, a, b, lead);
        std::vector<double> y(d.size(), 0.0);
        y[0] = a;
        y[lead] = b;
        auto wy = matvec(r.w.g, y);
        CHECK(std::abs(wy[0] - a) < 1e-10 * std::max(1.0, std::abs(a)));
        const auto form = QuadraticForm::from_diagonal(d);
        CHECK(membership_residual(form, r.w.g) <= 1e-8 * form.frobenius());
    }
}

TEST_CASE("align_indefinite spec examples") {
    // d = (1,-1), x = (5,3): q = 16, alpha = 4, target axis 0.
    const auto r1 = align_indefinite({1, -1}, 1, 5.0, 3.0);
    CHECK(r1.gamma == Catch::Approx(4.0));
    CHECK(r1.target_axis == 0);
    auto wx = matvec(r1.w.g, {5, 3});
    CHECK(wx[0] == Catch::Approx(4.0));
    CHECK(std::abs(wx[1]) < 1e-12);

    // Mirror case: q = -16, target the negative axis.
    const auto r2 = align_indefinite({1, -1}, 1, 3.0, 5.0);
    CHECK(r2.gamma == Catch::Approx(4.0));
    CHECK(r2.target_axis == 1);
    auto wx2 = matvec(r2.w.g, {3, 5});
    CHECK(std::abs(wx2[0]) < 1e-12);
    CHECK(wx2[1] == Catch::Approx(4.0));

    CHECK_THROWS_AS(align_indefinite({1, -1}, 1, 1.0, 1.0), NearNullCone);
}

TEST_CASE("canonical_align pipeline examples") {
    // D = diag(1,-1,0), x = (5,3,7): q = 16, gamma = 4 on axis 0.
    const auto f1 = QuadraticForm::from_diagonal({1, -1, 0});
    const auto r1 = canonical_align(f1, {5, 3, 7});
    CHECK(r1.gamma == Catch::Approx(4.0));
    CHECK(r1.target_axis == 0);
    auto wx = matvec(r1.w.g, {5, 3, 7});
    CHECK(wx[0] == Catch::Approx(4.0));
    CHECK(std::abs(wx[1]) + std::abs(wx[2]) < 1e-10);
    CHECK(membership_residual(f1, r1.w.g) <= 1e-8 * f1.frobenius());

    // Pure Euclidean: reduces to the definite lemma.
    const auto f2 = QuadraticForm::euclidean(3);
    const auto r2 = canonical_align(f2, {0, 0, 2});
    CHECK(r2.gamma == Catch::Approx(2.0));
    CHECK(r2.target_axis == 0);

    // Negative branch lands on the leading negative axis.
    const auto f3 = QuadraticForm::from_diagonal({1, -1});
    const auto r3 = canonical_align(f3, {3, 5});
    CHECK(r3.gamma == Catch::Approx(4.0));
    CHECK(r3.target_axis == 1);

    CHECK_THROWS_AS(canonical_align(f3, {1, 1}), NearNullCone);
}

TEST_CASE("canonical_align fuzz across signatures") {
    Rng rng(505);
    const std::vector<std::vector<double>> diags = {
        {1, 1, 1}, {1.5, 1, -2}, {2, -1, 0}, {1, 2, -1, -3}, {1, -1, -1, -1},
        {1, 0, -1, 0}, {-1, -2, 0}};
    for (const auto& dg : diags) {
        const auto form = QuadraticForm::from_diagonal(dg);
        int done = 0;
        while (done < 150) {
            auto x = rng.normal_vector(dg.size());
            if (std::abs(form.quad_eval(x)) < 0.1) continue;
            const auto r = canonical_align(form, x);
            auto wx = matvec(r.w.g, x);
            wx[r.target_axis] -= r.gamma;
            CHECK(norm2(wx) <= 1e-8 * norm2(x));
            CHECK(membership_residual(form, r.w.g) <= 1e-8 * form.frobenius());
            // gamma reproduces the pseudonorm on the target axis.
            std::vector<double> e(dg.size(), 0.0);
            e[r.target_axis] = r.gamma;
            CHECK(form.pseudonorm(e) ==
                  Catch::Approx(form.pseudonorm(x)).margin(1e-7 * norm2(x)));
            ++done;
        }
    }
}

TEST_CASE("canonical_align is idempotent on canonical points") {
    const auto form = QuadraticForm::from_diagonal({2, -1});
    const auto first = canonical_align(form, {3, 1});
    std::vector<double> canonical(2, 0.0);
    canonical[first.target_axis] = first.gamma;
    const auto again = canonical_align(form, canonical);
    auto wx = matvec(again.w.g, canonical);
    CHECK(wx[first.target_axis] == Catch::Approx(first.gamma));
}

TEST_CASE("transport maps x to y and round-trips") {
    const auto eta2 = QuadraticForm::from_diagonal({1, -1});
    const auto g = transport(eta2, {5, 3}, {5, -3});
    auto gx = matvec(g.g, {5, 3});
    CHECK(gx[0] == Catch::Approx(5.0).margin(1e-8));
    CHECK(gx[1] == Catch::Approx(-3.0).margin(1e-8));
    CHECK(membership_residual(eta2, g.g) <= 1e-7 * eta2.frobenius());

    // Rotation case.
    const auto id2 = QuadraticForm::euclidean(2);
    const auto rot = transport(id2, {1, 0}, {0, 1});
    auto rx = matvec(rot.g, {1, 0});
    CHECK(rx[0] == Catch::Approx(0.0).margin(1e-10));
    CHECK(rx[1] == Catch::Approx(1.0).margin(1e-10));

    // Identity is acceptable for x == y.
    const auto still = transport(id2, {1, 2}, {1, 2});
    auto sx = matvec(still.g, {1, 2});
    CHECK(sx[0] == Catch::Approx(1.0).margin(1e-10));

    CHECK_THROWS_AS(transport(eta2, {5, 3}, {3, 5}), std::invalid_argument);
}

TEST_CASE("transport fuzz on non-diagonal forms") {
    Rng rng(707);
    int done = 0;
    while (done < 200) {
        const std::size_t n = 2 + rng.index(4);
        const auto form = random_invertible_form(rng, n);
        const auto x = random_nonnull(rng, form);
        const auto g = sample_element(form, rng, 0.4);
        const auto y = matvec(g.g, x);
        const auto w = transport(form, x, y);
        auto wx = matvec(w.g, x);
        for (std::size_t i = 0; i < n; ++i) wx[i] -= y[i];
        CHECK(norm2(wx) <= 1e-6 * norm2(y));

        // Round trip.
        const auto back = transport(form, y, x);
        auto round = matvec(back.g * w.g, x);
        for (std::size_t i = 0; i < n; ++i) round[i] -= x[i];
        CHECK(norm2(round) <= 1e-6 * norm2(x));
        ++done;
    }
}

TEST_CASE("certified closure under products and inverses") {
    Rng rng(808);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng.index(5);
        const auto form = random_invertible_form(rng, n);
        GroupElement acc = certify_member(form, DenseMatrix::identity(n));
        const std::size_t chain = 1 + rng.index(8);
        for (std::size_t i = 0; i < chain; ++i) {
            const auto g = sample_element(form, rng, 0.3);
            acc = compose(form, acc, rng.uniform() < 0.3 ? inverse_element(form, g) : g);
        }
        CHECK(acc.residual <= 1e-7 * form.frobenius());
    }
}

TEST_CASE("orbit_equivalent level sets") {
    const auto eta = QuadraticForm::minkowski(4);
    CHECK(orbit_equivalent(eta, {5, 3, 0, 0}, {4, 0, 0, 0}, 1e-9));
    CHECK_FALSE(orbit_equivalent(eta, {5, 3, 0, 0}, {3, 5, 0, 0}, 1e-9));
    CHECK_FALSE(orbit_equivalent(eta, {1, 1, 0, 0}, {4, 0, 0, 0}, 1e-9));

    Rng rng(909);
    int done = 0;
    while (done < 1000) {
        const auto x = random_nonnull(rng, eta);
        const auto g = sample_element(eta, rng, 0.5);
        CHECK(orbit_equivalent(eta, x, matvec(g.g, x), 1e-6));
        ++done;
    }
}
