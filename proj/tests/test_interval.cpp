// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include <random>

#include "doctest.h"
#include "qz/interval.hpp"
#include "qz/rounding.hpp"

using qz::ExtInterval;
using qz::Interval;

TEST_CASE("interval construction validates bounds") {
    CHECK_THROWS_AS(Interval(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Interval(0.0, ExtInterval::kInf), std::invalid_argument);
    const Interval i(-1.0, 3.0);
    CHECK(i.mid() == 1.0);
    CHECK(i.lg() == 2.0);
    CHECK(i.width() == 4.0);
}

TEST_CASE("mid and lg cover the interval") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1e6, 1e6);
    for (int n = 0; n < 2000; ++n) {
        double a = d(rng);
        double b = d(rng);
        if (a > b) {
            std::swap(a, b);
        }
        const Interval i(a, b);
        REQUIRE(qz::sub_down(i.mid(), i.lg()) <= a);
        REQUIRE(qz::add_up(i.mid(), i.lg()) >= b);
    }
}

TEST_CASE("interval arithmetic") {
    const Interval a(1.0, 2.0);
    const Interval b(-1.0, 3.0);
    CHECK(a + b == Interval(0.0, 5.0));
    CHECK(a - b == Interval(-2.0, 3.0));
    CHECK(a * b == Interval(-2.0, 6.0));
    CHECK(qz::sqr(b) == Interval(0.0, 9.0));
    CHECK(qz::recip(Interval(2.0, 4.0)) == Interval(0.25, 0.5));
    CHECK_THROWS_AS(qz::recip(b), std::domain_error);
    CHECK(qz::sqrt(Interval(4.0, 9.0)) == Interval(2.0, 3.0));
    CHECK_FALSE(qz::meet(Interval(0.0, 1.0), Interval(2.0, 3.0)).has_value());
    CHECK(*qz::meet(Interval(0.0, 2.0), Interval(1.0, 3.0)) == Interval(1.0, 2.0));
    CHECK(qz::hull(Interval(0.0, 1.0), Interval(2.0, 3.0)) == Interval(0.0, 3.0));
}

TEST_CASE("outward rounding of sums") {
    const Interval a = Interval::point(0.1) + Interval::point(0.2);
    CHECK(a.lo() < a.hi());
    CHECK(a.lo() <= 0.1 + 0.2);
    CHECK(a.hi() >= 0.1 + 0.2);
}

TEST_CASE("extended intervals") {
    const ExtInterval half = ExtInterval::at_least(0.0);
    CHECK_FALSE(half.is_bounded());
    CHECK_THROWS_AS((void)half.bounded(), std::overflow_error);
    const auto m = qz::meet(half, ExtInterval(Interval(-3.0, 1.25)));
    REQUIRE(m.has_value());
    CHECK(*m == ExtInterval(0.0, 1.25));
    CHECK_FALSE(qz::meet(ExtInterval::at_most(-1.0), half).has_value());

    // 0 * inf is taken as 0
    const ExtInterval p = half * ExtInterval(0.0, 1.0);
    CHECK(p == half);
    CHECK(ExtInterval(1.0, 2.0) / ExtInterval(-1.0, 1.0) == ExtInterval::whole());
    CHECK(half / ExtInterval(2.0, 4.0) == half);
    CHECK((half - ExtInterval(1.0, 1.0)) == ExtInterval::at_least(-1.0));

    const auto sq = qz::sqrt_preimage(ExtInterval(-1.0, 2.0));
    REQUIRE(sq.has_value());
    CHECK(*sq == ExtInterval(0.0, 4.0));
    CHECK_FALSE(qz::sqrt_preimage(ExtInterval::at_most(-0.5)).has_value());
}
