// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qz/rounding.hpp"
#include "qz/sdp.hpp"

namespace qz::sdp {

// Splitting: X carries the box and the linear objective, Z the PSD cone,
// with the consensus X = Z. U is the scaled multiplier of that constraint.
AdmmResult admm_solve(const SdpProblem& problem, const AdmmParams& params) {
    if (!(params.rho > 0.0) || !(params.relaxation > 0.0 && params.relaxation < 2.0)) {
        throw std::invalid_argument("ADMM penalty must be positive and relaxation in (0,2)");
    }
    const std::size_t n = problem.objective.order();
    const std::vector<double>& m = problem.objective.packed();
    const std::vector<double>& lo = problem.lower.packed();
    const std::vector<double>& hi = problem.upper.packed();
    const std::size_t size = m.size();
    const double rho = params.rho;
    const double alpha = params.relaxation;

    SymMatrix x(n);
    SymMatrix z(n);
    SymMatrix u(n);
    SymMatrix xhat_u(n);
    std::vector<double> basis;

    AdmmResult out;
    for (int it = 1; it <= params.max_iters; ++it) {
        std::vector<double>& xv = x.packed();
        const std::vector<double>& zv = z.packed();
        const std::vector<double>& uv = u.packed();
        for (std::size_t k = 0; k < size; ++k) {
            xv[k] = std::clamp(zv[k] - uv[k] + m[k] / rho, lo[k], hi[k]);
        }
        SymMatrix xhat(n);
        std::vector<double>& hv = xhat.packed();
        for (std::size_t k = 0; k < size; ++k) {
            hv[k] = alpha * xv[k] + (1.0 - alpha) * zv[k];
            xhat_u.packed()[k] = hv[k] + uv[k];
        }
        const SymMatrix z_old = z;
        z = project_psd(xhat_u, basis);
        std::vector<double>& un = u.packed();
        for (std::size_t k = 0; k < size; ++k) {
            un[k] += hv[k] - z.packed()[k];
        }
        const double primal = (x - z).frobenius();
        const double dual = rho * (z - z_old).frobenius();
        out.iterations = it;
        if (primal <= params.tolerance && dual <= params.tolerance) {
            out.converged = true;
            break;
        }
    }

    out.primal_value = inner(problem.objective, x);
    // The multiplier rho*U lies in the normal cone of the PSD cone, which is
    // negative semidefinite; project to make that exact before splitting.
    const SymMatrix y = -1.0 * project_psd(-rho * u);
    const SymMatrix r = problem.objective - y;
    out.p = SymMatrix(n);
    out.n = SymMatrix(n);
    for (std::size_t k = 0; k < size; ++k) {
        const double v = r.packed()[k];
        out.p.packed()[k] = std::max(v, 0.0);
        out.n.packed()[k] = std::max(-v, 0.0);
    }
    out.x = std::move(x);
    return out;
}

Certificate certify_upper(const SdpProblem& problem, SymMatrix p, SymMatrix n) {
    const std::size_t order = problem.objective.order();
    if (p.order() != order || n.order() != order) {
        throw std::invalid_argument("multiplier order mismatch");
    }
    for (std::size_t k = 0; k < p.packed().size(); ++k) {
        if (!(p.packed()[k] >= 0.0) || !(n.packed()[k] >= 0.0)) {
            throw std::invalid_argument("multipliers must be nonnegative");
        }
    }
    Certificate c;
    c.slack = p - n - problem.objective;
    const double lambda = min_eigenvalue(c.slack);
    // Room for the rounding in forming the slack and in the eigensolver.
    const double eps = std::numeric_limits<double>::epsilon();
    const double margin =
        (1e-11 + 64.0 * static_cast<double>(order) * eps) * (c.slack.frobenius() + problem.objective.frobenius());
    if (lambda < margin) {
        c.shift = add_up(margin, -lambda);
        for (std::size_t i = 0; i < order; ++i) {
            p.set(i, i, add_up(p(i, i), c.shift));
            c.slack.set(i, i, c.slack(i, i) + c.shift);
        }
    }
    // sum_ij P_ij U_ij - N_ij L_ij, off-diagonal entries twice.
    const std::vector<double>& up = problem.upper.packed();
    const std::vector<double>& lw = problem.lower.packed();
    double bound = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < order; ++i) {
        for (std::size_t j = i; j < order; ++j, ++k) {
            const double w = i == j ? 1.0 : 2.0;
            bound = add_up(bound, mul_up(w, mul_up(p.packed()[k], up[k])));
            bound = add_up(bound, mul_up(w, mul_up(-n.packed()[k], lw[k])));
        }
    }
    c.p = std::move(p);
    c.n = std::move(n);
    c.bound = bound;
    return c;
}

} // namespace qz::sdp
