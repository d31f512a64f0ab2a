// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qz/rounding.hpp"
#include "qz/sdp.hpp"

namespace qz::sdp {

namespace {

struct SideBound {
    double value = 0.0; // upper bound on sup of the non-constant part
    bool converged = false;
    int iterations = 0;
};

// Bound on sup over the noise domain of the objective with the corner
// removed; the objective is scaled by a power of two for the solve.
SideBound solve_side(SdpProblem p, const AdmmParams& params) {
    const std::size_t one = p.objective.order() - 1;
    p.objective.set(one, one, 0.0);
    int e = 0;
    (void)std::frexp(p.objective.max_abs(), &e);
    p.objective = std::ldexp(1.0, -e) * p.objective;

    const AdmmResult r = admm_solve(p, params);
    const Certificate c = certify_upper(p, r.p, r.n);
    double v = std::ldexp(c.bound, e);
    if (std::ldexp(v, -e) < c.bound) {
        v = next_up(v);
    }
    return {v, r.converged, r.iterations};
}

} // namespace

GammaReport gamma_sdp_report(const QuadraticForm& q, const SdpOptions& options) {
    GammaReport rep{concretize_mt(q), concretize_mt(q)};
    if (q.is_linear() || q.symbols().size() > options.max_symbols) {
        return rep;
    }
    SideBound sup;
    SideBound inf;
    try {
        sup = solve_side(lift(q, Sense::Sup), options.admm);
        inf = solve_side(lift(q, Sense::Inf), options.admm);
    } catch (const EigenError&) {
        return rep;
    }
    const double hi = add_up(add_up(q.center(), q.center_tail()), sup.value);
    const double lo = sub_down(add_down(q.center(), q.center_tail()), inf.value);
    const double clo = std::max(lo, rep.mt.lo());
    const double chi = std::min(hi, rep.mt.hi());
    if (!(clo <= chi)) {
        return rep;
    }
    rep.range = Interval(clo, chi);
    rep.solved = true;
    rep.converged = sup.converged && inf.converged;
    rep.iterations = sup.iterations + inf.iterations;
    return rep;
}

Interval gamma_sdp(const QuadraticForm& q, const SdpOptions& options) { return gamma_sdp_report(q, options).range; }

namespace {

class RangeTracker {
  public:
    explicit RangeTracker(const QuadraticForm& q) : q_(q), ids_(q.symbols()) {}

    [[nodiscard]] std::size_t symbols() const noexcept { return ids_.size(); }

    void visit(const std::vector<long double>& x) {
        long double v = static_cast<long double>(q_.center()) + static_cast<long double>(q_.center_tail());
        for (const LinearTerm& t : q_.linear()) {
            v += static_cast<long double>(t.coef) * x[pos(t.id)];
        }
        for (const QuadTerm& t : q_.quadratic()) {
            v += static_cast<long double>(t.coef) * x[pos(t.i)] * x[pos(t.j)];
        }
        // error symbols enter linearly: each side takes its own endpoint
        const long double up = v + static_cast<long double>(q_.pm()) + static_cast<long double>(q_.plus());
        const long double down = v - static_cast<long double>(q_.pm()) - static_cast<long double>(q_.minus());
        lo_ = std::min(lo_, down);
        hi_ = std::max(hi_, up);
    }

    [[nodiscard]] Interval inner() const {
        double lo = static_cast<double>(lo_);
        double hi = static_cast<double>(hi_);
        if (static_cast<long double>(lo) < lo_) {
            lo = next_up(lo);
        }
        if (static_cast<long double>(hi) > hi_) {
            hi = next_down(hi);
        }
        if (lo > hi) {
            const double mid = static_cast<double>((lo_ + hi_) / 2);
            return Interval::point(mid);
        }
        return {lo, hi};
    }

  private:
    [[nodiscard]] std::size_t pos(SymbolId id) const {
        return static_cast<std::size_t>(std::lower_bound(ids_.begin(), ids_.end(), id) - ids_.begin());
    }

    const QuadraticForm& q_;
    std::vector<SymbolId> ids_;
    long double lo_ = std::numeric_limits<long double>::infinity();
    long double hi_ = -std::numeric_limits<long double>::infinity();
};

constexpr double kMaxGridPoints = 2e6;
constexpr int kSamples = 100000;
constexpr std::size_t kMaxVertexSymbols = 16;

} // namespace

Interval grid_oracle(const QuadraticForm& q, int resolution, std::uint64_t seed) {
    RangeTracker t(q);
    const std::size_t m = t.symbols();
    std::vector<long double> x(m, 0.0L);
    if (m == 0) {
        t.visit(x);
        return t.inner();
    }
    if (m <= 3) {
        const int cap = static_cast<int>(std::floor(std::pow(kMaxGridPoints, 1.0 / static_cast<double>(m))));
        const int k = std::max(2, std::min(resolution, cap));
        std::vector<int> idx(m, 0);
        for (;;) {
            for (std::size_t d = 0; d < m; ++d) {
                x[d] = -1.0L + 2.0L * idx[d] / (k - 1);
            }
            t.visit(x);
            std::size_t d = 0;
            while (d < m && ++idx[d] == k) {
                idx[d++] = 0;
            }
            if (d == m) {
                break;
            }
        }
        return t.inner();
    }
    if (m <= kMaxVertexSymbols) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
            for (std::size_t d = 0; d < m; ++d) {
                x[d] = ((mask >> d) & 1U) != 0 ? 1.0L : -1.0L;
            }
            t.visit(x);
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<long double> u(-1.0L, 1.0L);
    for (int s = 0; s < kSamples; ++s) {
        for (long double& v : x) {
            v = u(rng);
        }
        t.visit(x);
    }
    return t.inner();
}

} // namespace qz::sdp
