// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qz/domain.hpp"
#include "qz/form_text.hpp"

namespace qz {

std::string to_string(DomainKind k) {
    switch (k) {
    case DomainKind::Interval:
        return "interval";
    case DomainKind::Affine:
        return "affine";
    case DomainKind::Quad:
        return "quad";
    }
    return "?";
}

std::string to_string(Conc c) { return c == Conc::Mt ? "mt" : "sdp"; }

std::optional<DomainKind> parse_domain_kind(std::string_view text) {
    if (text == "interval") {
        return DomainKind::Interval;
    }
    if (text == "affine") {
        return DomainKind::Affine;
    }
    if (text == "quad") {
        return DomainKind::Quad;
    }
    return std::nullopt;
}

std::optional<Conc> parse_conc(std::string_view text) {
    if (text == "mt") {
        return Conc::Mt;
    }
    if (text == "sdp") {
        return Conc::Sdp;
    }
    return std::nullopt;
}

double argmin(double a, double b) noexcept {
    if (a > 0.0 && b > 0.0) {
        return std::min(a, b);
    }
    if (a < 0.0 && b < 0.0) {
        return std::max(a, b);
    }
    return 0.0;
}

QuadraticForm extend(const QuadraticForm& q, std::size_t, std::size_t) { return q; }

namespace {

// Merge of two sorted term lists keeping argmin of matching coefficients;
// a term present on one side only has argmin 0 and is dropped.
std::vector<LinearTerm> argmin_terms(std::span<const LinearTerm> x, std::span<const LinearTerm> y) {
    std::vector<LinearTerm> out;
    for (const LinearTerm& t : x) {
        const auto it = std::lower_bound(y.begin(), y.end(), t.id,
                                         [](const LinearTerm& l, SymbolId v) { return l.id < v; });
        if (it != y.end() && it->id == t.id) {
            const double m = argmin(t.coef, it->coef);
            if (m != 0.0) {
                out.push_back({t.id, m});
            }
        }
    }
    return out;
}

std::vector<QuadTerm> argmin_terms(std::span<const QuadTerm> x, const QuadraticForm& y) {
    std::vector<QuadTerm> out;
    for (const QuadTerm& t : x) {
        const double m = argmin(t.coef, y.quadratic_coef(t.i, t.j));
        if (m != 0.0) {
            out.push_back({t.i, t.j, m});
        }
    }
    return out;
}

} // namespace

FormJoin join_forms(const QuadraticForm& x, const QuadraticForm& y, const Concretizer& gamma, NoiseRegistry& reg,
                    bool fp) {
    const Interval gx = gamma(x);
    const Interval gy = gamma(y);
    const double center = hull(gx, gy).mid();
    QuadraticForm base(center, argmin_terms(x.linear(), y.linear()), argmin_terms(x.quadratic(), y),
                       std::min(x.pm(), y.pm()), std::min(x.plus(), y.plus()), std::min(x.minus(), y.minus()));
    // Residuals share the error slots of the operand they come from.
    const Interval rx = gamma(coherent_sub(x, base, fp));
    const Interval ry = gamma(coherent_sub(y, base, fp));
    const Interval residual = hull(rx, ry);
    QuadraticForm form = add(base, abstract_interval(residual, reg), fp);
    return {std::move(form), std::move(base), residual};
}

std::optional<QuadraticForm> meet_forms(const QuadraticForm& x, const QuadraticForm& y, const Concretizer& gamma,
                                        NoiseRegistry& reg) {
    const auto m = meet(gamma(x), gamma(y));
    if (!m) {
        return std::nullopt;
    }
    return abstract_interval(*m, reg);
}

Interval literal_interval(const DecimalValue& lo, const DecimalValue& hi) {
    return {lo.exact ? lo.value : next_down(lo.value), hi.exact ? hi.value : next_up(hi.value)};
}

const ExtInterval* Box::find(std::string_view name) const {
    for (const auto& [n, iv] : vars) {
        if (n == name) {
            return &iv;
        }
    }
    return nullptr;
}

bool box_leq(const Box& a, const Box& b) {
    if (a.unreachable) {
        return true;
    }
    if (b.unreachable) {
        return false;
    }
    for (const auto& [name, iv] : a.vars) {
        const ExtInterval* other = b.find(name);
        if (other == nullptr || !other->contains(iv)) {
            return false;
        }
    }
    return true;
}

namespace {

std::string format_interval(const Interval& i) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", i.lo(), i.hi());
    return buf;
}

} // namespace

IntervalAlgebra::Value IntervalAlgebra::constant(const DecimalValue& d) const {
    if (options_.fp && !d.exact) {
        return {next_down(d.value), next_up(d.value)};
    }
    return Interval::point(d.value);
}

std::string IntervalAlgebra::describe(const Value& v) const { return format_interval(v); }

FormAlgebra::FormAlgebra(NoiseRegistry& reg, const DomainOptions& options, bool affine)
    : reg_(&reg), options_(options), affine_(affine) {}

FormAlgebra::Value FormAlgebra::mul(const Value& a, const Value& b) const {
    if (affine_) {
        return mul_affine(a, b, *reg_, options_.fp);
    }
    return qz::mul(a, b, options_.fp);
}

FormAlgebra::Value FormAlgebra::recip(const Value& x, const Interval& range) const {
    return unary_nonlinear(UnaryKind::Inv, x, range, *reg_, options_.fp);
}

FormAlgebra::Value FormAlgebra::sqrt(const Value& x, const Interval& range) const {
    return unary_nonlinear(UnaryKind::Sqrt, x, range, *reg_, options_.fp);
}

Interval FormAlgebra::range(const Value& v) const {
    if (affine_ || options_.conc == Conc::Mt) {
        return concretize_mt(v);
    }
    return sdp::gamma_sdp(v, options_.sdp);
}

Concretizer FormAlgebra::concretizer() const {
    return [this](const QuadraticForm& q) { return range(q); };
}

FormAlgebra::Value FormAlgebra::join(const Value& a, const Value& b) const {
    return join_forms(a, b, concretizer(), *reg_, options_.fp).form;
}

std::string FormAlgebra::describe(const Value& v) const { return to_string(v); }

} // namespace qz
