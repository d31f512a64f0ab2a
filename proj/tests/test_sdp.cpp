// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "doctest.h"
#include "qz/form_text.hpp"
#include "qz/sdp.hpp"
#include "support.hpp"

using qz::Interval;
using qz::QuadraticForm;
using qz::sdp::Sense;
using qz::sdp::SymMatrix;
using namespace qz::testing;

namespace {

SymMatrix random_sym(std::mt19937_64& rng, std::size_t n, double mag = 1.0) {
    SymMatrix s(n);
    for (double& v : s.packed()) {
        v = uniform(rng, -mag, mag);
    }
    return s;
}

double reconstruction_error(const SymMatrix& s, const qz::sdp::Eigen& e) {
    return (qz::sdp::recompose(e) - s).frobenius();
}

double sup_value(const QuadraticForm& q) { return qz::sdp::admm_solve(qz::sdp::lift(q, Sense::Sup)).primal_value; }
double inf_value(const QuadraticForm& q) { return -qz::sdp::admm_solve(qz::sdp::lift(q, Sense::Inf)).primal_value; }

} // namespace

TEST_CASE("packed symmetric storage") {
    SymMatrix m(3);
    m.set(2, 0, 5.0);
    CHECK(m(0, 2) == 5.0);
    CHECK(m.packed().size() == 6);
    const SymMatrix id = SymMatrix::identity(3);
    CHECK(qz::sdp::inner(id, id) == 3.0);
    CHECK(qz::sdp::inner(m, m) == 50.0);
    CHECK(SymMatrix::from_dense(3, m.dense()) == m);
}

TEST_CASE("lifting places the coefficients") {
    const auto sq = qz::sdp::lift(qz::parse_form("e1*e1"));
    REQUIRE(sq.objective.order() == 5);
    CHECK(sq.objective(0, 0) == 1.0);
    CHECK(sq.objective.max_abs() == 1.0);

    const auto c = qz::sdp::lift(QuadraticForm::constant(3.5));
    REQUIRE(c.objective.order() == 4);
    CHECK(c.objective(3, 3) == 3.5);
    CHECK(c.lower(3, 3) == 1.0);
    CHECK(c.upper(3, 3) == 1.0);

    const auto p = qz::sdp::lift(qz::parse_form("e1 - e1*e1"));
    CHECK(p.objective(0, 0) == -1.0);
    CHECK(p.objective(0, 4) == 0.5);
    CHECK(p.objective(4, 0) == 0.5);

    const auto n = qz::sdp::lift(qz::parse_form("e1 - e1*e1"), Sense::Inf);
    CHECK(n.objective(0, 0) == 1.0);
    CHECK(n.objective(0, 4) == -0.5);

    // off-diagonal coefficients are split over both triangles
    const auto o = qz::sdp::lift(qz::parse_form("3*e2*e7 + 2*epm + ep + 4*em"));
    CHECK(o.symbols == std::vector<qz::SymbolId>{2, 7});
    CHECK(o.objective(0, 1) == 1.5);
    CHECK(o.objective(2, 5) == 1.0);
    CHECK(o.objective(3, 5) == 0.5);
    CHECK(o.objective(4, 5) == 2.0);
}

TEST_CASE("rank-one lifts of noise points are feasible and evaluate the form") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 100; ++k) {
        const int m = 1 + static_cast<int>(rng() % 5);
        const QuadraticForm q = random_form(rng, {.symbols = m});
        const auto p = qz::sdp::lift(q);
        const std::size_t dim = p.plain();
        const qz::NoiseAssignment t = random_assignment(rng, m);
        std::vector<long double> u;
        for (qz::SymbolId id : p.symbols) {
            u.push_back(t.plain.at(id));
        }
        u.insert(u.end(), {t.pm, t.plus, t.minus, 1.0L});
        SymMatrix x(dim + 4);
        for (std::size_t i = 0; i < dim + 4; ++i) {
            for (std::size_t j = i; j < dim + 4; ++j) {
                x.set(i, j, static_cast<double>(u[i] * u[j]));
            }
        }
        for (std::size_t e = 0; e < x.packed().size(); ++e) {
            REQUIRE(p.lower.packed()[e] <= x.packed()[e]);
            REQUIRE(x.packed()[e] <= p.upper.packed()[e]);
        }
        const long double direct = qz::eval(q, t);
        CHECK(std::fabs(static_cast<double>(qz::sdp::inner(p.objective, x) - direct)) <= 1e-12 * 64);
    }
}

TEST_CASE("Jacobi eigen decomposition") {
    SymMatrix d(3);
    d.set(0, 0, 3.0);
    d.set(1, 1, -1.0);
    d.set(2, 2, 2.0);
    const auto e = qz::sdp::jacobi_eigen(d);
    CHECK(e.values == std::vector<double>{-1.0, 2.0, 3.0});

    SymMatrix swap(2);
    swap.set(0, 1, 1.0);
    const auto s = qz::sdp::jacobi_eigen(swap);
    CHECK(s.values[0] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(s.values[1] == doctest::Approx(1.0).epsilon(1e-15));

    std::mt19937_64 rng(9);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 2 + rng() % 8;
        const SymMatrix r = random_sym(rng, n, 10.0);
        const auto re = qz::sdp::jacobi_eigen(r);
        REQUIRE(reconstruction_error(r, re) <= 1e-9 * r.frobenius());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double dot = 0.0;
                for (std::size_t row = 0; row < n; ++row) {
                    dot += re.vectors[row * n + i] * re.vectors[row * n + j];
                }
                REQUIRE(std::fabs(dot - (i == j ? 1.0 : 0.0)) <= 1e-12);
            }
        }
        // a warm start from a nearby basis gives the same spectrum
        const SymMatrix near = r + random_sym(rng, n, 1e-3);
        const auto warm = qz::sdp::jacobi_eigen(near, &re.vectors);
        const auto cold = qz::sdp::jacobi_eigen(near);
        REQUIRE(reconstruction_error(near, warm) <= 1e-9 * near.frobenius());
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(warm.values[i] == doctest::Approx(cold.values[i]).epsilon(1e-10).scale(r.frobenius()));
        }
    }
    CHECK(qz::sdp::jacobi_eigen(SymMatrix(4)).values == std::vector<double>(4, 0.0));
    SymMatrix bad(2);
    bad.set(0, 1, NAN);
    CHECK_THROWS_AS(qz::sdp::jacobi_eigen(bad), qz::sdp::EigenError);
}

TEST_CASE("PSD projection") {
    std::mt19937_64 rng(13);
    SymMatrix a(3);
    a.set(0, 0, 2.0);
    a.set(0, 1, 1.0);
    a.set(1, 1, 2.0);
    a.set(2, 2, 0.5);
    CHECK((qz::sdp::project_psd(a) - a).frobenius() <= 1e-14);
    CHECK(qz::sdp::project_psd(-1.0 * SymMatrix::identity(4)).max_abs() == 0.0);

    // x x^T minus a small perturbation
    SymMatrix r(5);
    const double x[] = {0.3, -1.2, 0.7, 0.1, 2.0};
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = i; j < 5; ++j) {
            r.set(i, j, x[i] * x[j] - (i == j ? 1e-3 : 0.0));
        }
    }
    CHECK(qz::sdp::min_eigenvalue(r) < 0.0);
    CHECK(qz::sdp::min_eigenvalue(qz::sdp::project_psd(r)) >= -1e-9);

    for (int k = 0; k < 200; ++k) {
        const SymMatrix s = random_sym(rng, 2 + rng() % 8, 5.0);
        const SymMatrix p = qz::sdp::project_psd(s);
        REQUIRE(qz::sdp::min_eigenvalue(p) >= -1e-9 * s.frobenius());
        // nearest: the residual is the negative part, orthogonal to p
        REQUIRE(std::fabs(qz::sdp::inner(p, s - p)) <= 1e-9 * s.frobenius() * s.frobenius());
        REQUIRE(qz::sdp::min_eigenvalue(-1.0 * (s - p)) >= -1e-9 * s.frobenius());
    }
}

TEST_CASE("ADMM reaches the analytic optima") {
    const QuadraticForm sq = qz::parse_form("e1*e1");
    CHECK(std::fabs(sup_value(sq) - 1.0) <= 1e-6);
    CHECK(std::fabs(inf_value(sq)) <= 1e-6);

    const QuadraticForm w = qz::parse_form("e1 - e1*e1");
    CHECK(std::fabs(sup_value(w) - 0.25) <= 1e-5);

    const QuadraticForm g = qz::parse_form("e1 - e2 - e1*e1");
    const auto r = qz::sdp::admm_solve(qz::sdp::lift(g));
    CHECK(r.converged);
    CHECK(std::fabs(r.primal_value - 1.25) <= 1e-4);
    CHECK(std::fabs(inf_value(g) + 3.0) <= 1e-4);
}

TEST_CASE("weak-duality certificates") {
    const auto sq = qz::sdp::lift(qz::parse_form("e1*e1"));
    SymMatrix p(5);
    p.set(0, 0, 1.0);
    const auto exact = qz::sdp::certify_upper(sq, p, SymMatrix(5));
    CHECK(exact.bound >= 1.0);
    CHECK(exact.bound <= 1.0 + 1e-9);

    const auto neg = qz::sdp::lift(qz::parse_form("-1*e1*e1"));
    const auto zero = qz::sdp::certify_upper(neg, SymMatrix(5), SymMatrix(5));
    CHECK(zero.bound >= 0.0);
    CHECK(zero.bound <= 1e-9);

    CHECK_THROWS_AS(qz::sdp::certify_upper(sq, -1.0 * p, SymMatrix(5)), std::invalid_argument);

    const auto w = qz::sdp::lift(qz::parse_form("e1 - e1*e1"));
    const auto r = qz::sdp::admm_solve(w);
    std::mt19937_64 rng(17);
    for (int k = 0; k < 50; ++k) {
        SymMatrix pp = r.p;
        SymMatrix nn = r.n;
        for (double& v : pp.packed()) {
            v = std::max(0.0, v + uniform(rng, -1e-3, 1e-3));
        }
        for (double& v : nn.packed()) {
            v = std::max(0.0, v + uniform(rng, -1e-3, 1e-3));
        }
        const auto c = qz::sdp::certify_upper(w, pp, nn);
        REQUIRE(c.bound >= 0.25);
        REQUIRE(c.bound <= 1.0);
        REQUIRE(qz::sdp::min_eigenvalue(c.slack) >= -1e-12);
        for (double v : c.p.packed()) {
            REQUIRE(v >= 0.0);
        }
    }
}

TEST_CASE("SDP concretization") {
    const QuadraticForm g = qz::parse_form("e1 - e2 - e1*e1");
    const Interval mt = qz::concretize_mt(g);
    CHECK(mt == Interval(-3.0, 2.0));
    const Interval s = qz::sdp::gamma_sdp(g);
    CHECK(std::fabs(s.lo() + 3.0) <= 1e-4);
    CHECK(std::fabs(s.hi() - 1.25) <= 1e-4);
    CHECK(s.hi() < mt.hi());

    CHECK(qz::sdp::gamma_sdp(QuadraticForm::constant(2.5)) == Interval::point(2.5));

    const QuadraticForm w = qz::parse_form("e1 - e1*e1");
    CHECK(qz::concretize_mt(w).hi() == 1.0);
    CHECK(qz::sdp::gamma_sdp(w).hi() <= 0.26);
    CHECK(qz::sdp::gamma_sdp(w).hi() >= 0.25);

    // linear forms skip the solver
    const auto lin = qz::sdp::gamma_sdp_report(qz::parse_form("1 + e1 - 2*e2 + 0.5*ep"));
    CHECK_FALSE(lin.solved);
    CHECK(lin.range == Interval(-2.0, 4.5));
}

TEST_CASE("grid oracle") {
    const Interval sq = qz::sdp::grid_oracle(qz::parse_form("e1*e1"), 1000);
    CHECK(std::fabs(sq.lo()) <= 1e-3);
    CHECK(std::fabs(sq.hi() - 1.0) <= 1e-3);

    const Interval g = qz::sdp::grid_oracle(qz::parse_form("e1 - e2 - e1*e1"));
    CHECK(std::fabs(g.lo() + 3.0) <= 1e-3);
    CHECK(std::fabs(g.hi() - 1.25) <= 1e-3);

    const Interval lin = qz::sdp::grid_oracle(qz::parse_form("1 + e1 - 2*e2 + 0.5*ep + epm"));
    CHECK(lin.lo() == -3.0);
    CHECK(lin.hi() == 5.5);

    // larger supports fall back to vertices and samples
    const Interval big = qz::sdp::grid_oracle(qz::parse_form("e1 + e2 + e3 + e4 + e5"));
    CHECK(big == Interval(-5.0, 5.0));
}

TEST_CASE("SDP bounds sit between the sampled range and the closed-form bounds") {
    std::mt19937_64 rng(23);
    int violations = 0;
    for (int k = 0; k < 60; ++k) {
        const int m = 1 + static_cast<int>(rng() % 5);
        const QuadraticForm q = random_form(rng, {.symbols = m});
        const Interval mt = qz::concretize_mt(q);
        const Interval s = qz::sdp::gamma_sdp(q);
        const Interval o = qz::sdp::grid_oracle(q, 201);
        // the clamp makes the outer inclusion structural
        REQUIRE(mt.contains(s));
        violations += (s.lo() <= o.lo() && o.hi() <= s.hi()) ? 0 : 1;
    }
    CHECK(violations == 0);
}
