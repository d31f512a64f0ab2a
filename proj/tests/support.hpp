// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <random>
#include <vector>

#include "qz/quadratic_form.hpp"

namespace qz::testing {

using Rational = boost::multiprecision::cpp_rational;

inline Rational exact(double v) { return Rational(v); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct FormShape {
    int symbols = 4;      // plain symbols 1..symbols
    double magnitude = 2; // coefficients drawn from [-magnitude, magnitude]
    bool slots = true;
    double density = 0.7; // probability that a coefficient is present
};

inline QuadraticForm random_form(std::mt19937_64& rng, const FormShape& s = {}) {
    std::bernoulli_distribution present(s.density);
    std::vector<LinearTerm> b;
    std::vector<QuadTerm> a;
    for (int i = 1; i <= s.symbols; ++i) {
        if (present(rng)) {
            b.push_back({static_cast<SymbolId>(i), uniform(rng, -s.magnitude, s.magnitude)});
        }
        for (int j = i; j <= s.symbols; ++j) {
            if (present(rng)) {
                a.push_back({static_cast<SymbolId>(i), static_cast<SymbolId>(j), uniform(rng, -s.magnitude, s.magnitude)});
            }
        }
    }
    double pm = 0.0;
    double plus = 0.0;
    double minus = 0.0;
    if (s.slots) {
        std::bernoulli_distribution slot(0.3);
        pm = slot(rng) ? uniform(rng, 0.0, s.magnitude / 4) : 0.0;
        plus = slot(rng) ? uniform(rng, 0.0, s.magnitude / 4) : 0.0;
        minus = slot(rng) ? uniform(rng, 0.0, s.magnitude / 4) : 0.0;
    }
    return QuadraticForm(uniform(rng, -s.magnitude, s.magnitude), std::move(b), std::move(a), pm, plus, minus);
}

inline NoiseAssignment random_assignment(std::mt19937_64& rng, int symbols) {
    NoiseAssignment t;
    for (int i = 1; i <= symbols; ++i) {
        t.plain[static_cast<SymbolId>(i)] = std::uniform_real_distribution<long double>(-1.0L, 1.0L)(rng);
    }
    t.pm = std::uniform_real_distribution<long double>(-1.0L, 1.0L)(rng);
    t.plus = std::uniform_real_distribution<long double>(0.0L, 1.0L)(rng);
    t.minus = std::uniform_real_distribution<long double>(-1.0L, 0.0L)(rng);
    return t;
}

inline bool encloses(const Interval& i, long double v) {
    return static_cast<long double>(i.lo()) <= v && v <= static_cast<long double>(i.hi());
}

} // namespace qz::testing
