// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "qz/sdp.hpp"

namespace qz::sdp {

void lifted_box(std::size_t m, SymMatrix& lower, SymMatrix& upper) {
    const std::size_t n = m + 4;
    const std::size_t plus = m + 1;
    const std::size_t minus = m + 2;
    const std::size_t one = m + 3;
    lower = SymMatrix(n, -1.0);
    upper = SymMatrix(n, 1.0);
    for (std::size_t i = 0; i < one; ++i) {
        lower.set(i, i, 0.0);
    }
    // products involving the signed error symbols
    upper.set(plus, minus, 0.0);
    lower.set(plus, one, 0.0);
    upper.set(minus, one, 0.0);
    lower.set(one, one, 1.0);
}

SdpProblem lift(const QuadraticForm& q, Sense sense) {
    SdpProblem p;
    p.sense = sense;
    p.symbols = q.symbols();
    const std::size_t m = p.symbols.size();
    const std::size_t one = m + 3;
    lifted_box(m, p.lower, p.upper);
    p.objective = SymMatrix(m + 4);

    const auto slot = [&p](SymbolId id) {
        return static_cast<std::size_t>(std::lower_bound(p.symbols.begin(), p.symbols.end(), id) - p.symbols.begin());
    };
    const double k = sense == Sense::Sup ? 1.0 : -1.0;
    SymMatrix& obj = p.objective;
    // Halving and negation are exact.
    for (const QuadTerm& t : q.quadratic()) {
        const std::size_t i = slot(t.i);
        const std::size_t j = slot(t.j);
        obj.set(i, j, k * (i == j ? t.coef : 0.5 * t.coef));
    }
    for (const LinearTerm& t : q.linear()) {
        obj.set(slot(t.id), one, k * 0.5 * t.coef);
    }
    obj.set(m, one, k * 0.5 * q.pm());
    obj.set(m + 1, one, k * 0.5 * q.plus());
    obj.set(m + 2, one, k * 0.5 * q.minus());
    obj.set(one, one, k * q.center());
    return p;
}

} // namespace qz::sdp
