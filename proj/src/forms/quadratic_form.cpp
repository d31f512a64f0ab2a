// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include "qz/quadratic_form.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace qz {

namespace {

bool quad_key_less(const QuadTerm& l, const QuadTerm& r) noexcept {
    return l.i != r.i ? l.i < r.i : l.j < r.j;
}

bool same_key(const QuadTerm& l, const QuadTerm& r) noexcept { return l.i == r.i && l.j == r.j; }

} // namespace

// Coefficient arithmetic for the operators. In fp mode every rounding
// residual is charged to the symmetric error slot of the result.
class FormBuilder {
  public:
    explicit FormBuilder(bool fp) : fp_(fp) {}

    double add(double a, double b) {
        const Eft r = two_sum(a, b);
        if (fp_) {
            err_.add(r);
        }
        return r.value;
    }

    double mul(double a, double b) {
        const Eft r = two_product(a, b);
        if (fp_) {
            err_.add(r);
        }
        return r.value;
    }

    /// Charge a bound that holds regardless of the mode.
    void charge(double bound) { err_.add(bound); }

    [[nodiscard]] bool fp() const noexcept { return fp_; }

    // Sorts, folds duplicates with accounted additions and drops zeros.
    void reduce(std::vector<LinearTerm>& b) {
        std::stable_sort(b.begin(), b.end(), [](const LinearTerm& l, const LinearTerm& r) { return l.id < r.id; });
        std::vector<LinearTerm> out;
        out.reserve(b.size());
        for (const LinearTerm& t : b) {
            if (!out.empty() && out.back().id == t.id) {
                out.back().coef = add(out.back().coef, t.coef);
            } else {
                out.push_back(t);
            }
        }
        std::erase_if(out, [](const LinearTerm& t) { return t.coef == 0.0; });
        b = std::move(out);
    }

    void reduce(std::vector<QuadTerm>& a) {
        for (QuadTerm& t : a) {
            if (t.i > t.j) {
                std::swap(t.i, t.j);
            }
        }
        std::stable_sort(a.begin(), a.end(), quad_key_less);
        std::vector<QuadTerm> out;
        out.reserve(a.size());
        for (const QuadTerm& t : a) {
            if (!out.empty() && same_key(out.back(), t)) {
                out.back().coef = add(out.back().coef, t.coef);
            } else {
                out.push_back(t);
            }
        }
        std::erase_if(out, [](const QuadTerm& t) { return t.coef == 0.0; });
        a = std::move(out);
    }

    QuadraticForm finish(double c, double tail, std::vector<LinearTerm> b, std::vector<QuadTerm> a, double pm,
                         double plus, double minus) {
        reduce(b);
        reduce(a);
        if (!fp_ && tail != 0.0) {
            // Real-arithmetic mode keeps the center in a single double.
            c += tail;
            tail = 0.0;
        }
        QuadraticForm q;
        q.c_ = c;
        q.tail_ = tail;
        q.b_ = std::move(b);
        q.a_ = std::move(a);
        q.pm_ = add_up(pm, err_.total());
        q.plus_ = plus;
        q.minus_ = minus;
        check(q);
        return q;
    }

    static void check(const QuadraticForm& q) {
        bool ok = std::isfinite(q.c_) && std::isfinite(q.tail_) && std::isfinite(q.pm_) && std::isfinite(q.plus_) &&
                  std::isfinite(q.minus_);
        for (const LinearTerm& t : q.b_) {
            ok = ok && std::isfinite(t.coef);
        }
        for (const QuadTerm& t : q.a_) {
            ok = ok && std::isfinite(t.coef);
        }
        if (!ok) {
            throw NonFiniteError("quadratic form coefficient overflow");
        }
    }

    static QuadraticForm& assign_validated(QuadraticForm& q, double c, std::vector<LinearTerm> b,
                                           std::vector<QuadTerm> a, double pm, double plus, double minus) {
        if (!(pm >= 0.0) || !(plus >= 0.0) || !(minus >= 0.0)) {
            if (std::isnan(pm) || std::isnan(plus) || std::isnan(minus)) {
                throw NonFiniteError("error coefficient is NaN");
            }
            throw std::invalid_argument("error coefficients must be nonnegative");
        }
        FormBuilder fb(false);
        fb.reduce(b);
        fb.reduce(a);
        q.c_ = c;
        q.tail_ = 0.0;
        q.b_ = std::move(b);
        q.a_ = std::move(a);
        q.pm_ = pm;
        q.plus_ = plus;
        q.minus_ = minus;
        check(q);
        return q;
    }

    static const std::vector<LinearTerm>& b(const QuadraticForm& q) { return q.b_; }
    static const std::vector<QuadTerm>& a(const QuadraticForm& q) { return q.a_; }

  private:
    bool fp_;
    ErrorAccumulator err_;
};

QuadraticForm::QuadraticForm(double c, std::vector<LinearTerm> b, std::vector<QuadTerm> a, double pm, double plus,
                             double minus) {
    FormBuilder::assign_validated(*this, c, std::move(b), std::move(a), pm, plus, minus);
}

double QuadraticForm::linear_coef(SymbolId id) const noexcept {
    const auto it =
        std::lower_bound(b_.begin(), b_.end(), id, [](const LinearTerm& t, SymbolId v) { return t.id < v; });
    return (it != b_.end() && it->id == id) ? it->coef : 0.0;
}

double QuadraticForm::quadratic_coef(SymbolId i, SymbolId j) const noexcept {
    const QuadTerm key{std::min(i, j), std::max(i, j), 0.0};
    const auto it = std::lower_bound(a_.begin(), a_.end(), key, quad_key_less);
    return (it != a_.end() && same_key(*it, key)) ? it->coef : 0.0;
}

std::vector<SymbolId> QuadraticForm::symbols() const {
    std::vector<SymbolId> ids;
    ids.reserve(b_.size() + 2 * a_.size());
    for (const LinearTerm& t : b_) {
        ids.push_back(t.id);
    }
    for (const QuadTerm& t : a_) {
        ids.push_back(t.i);
        ids.push_back(t.j);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

long double eval(const QuadraticForm& q, const NoiseAssignment& t) {
    for (const auto& [id, v] : t.plain) {
        if (!(v >= -1.0L && v <= 1.0L)) {
            throw std::out_of_range("noise symbol " + std::to_string(id) + " outside [-1,1]");
        }
    }
    if (!(t.pm >= -1.0L && t.pm <= 1.0L) || !(t.plus >= 0.0L && t.plus <= 1.0L) ||
        !(t.minus >= -1.0L && t.minus <= 0.0L)) {
        throw std::out_of_range("error symbol outside its range");
    }
    const auto value = [&t](SymbolId id) -> long double {
        const auto it = t.plain.find(id);
        return it == t.plain.end() ? 0.0L : it->second;
    };
    long double s = static_cast<long double>(q.center()) + static_cast<long double>(q.center_tail());
    for (const LinearTerm& l : q.linear()) {
        s += static_cast<long double>(l.coef) * value(l.id);
    }
    for (const QuadTerm& a : q.quadratic()) {
        s += static_cast<long double>(a.coef) * value(a.i) * value(a.j);
    }
    s += static_cast<long double>(q.pm()) * t.pm + static_cast<long double>(q.plus()) * t.plus +
         static_cast<long double>(q.minus()) * t.minus;
    return s;
}

namespace {

// Magnitudes used by the closed-form bounds, all rounded up.
struct Magnitudes {
    double linear = 0.0;     // sum |b_i|
    double off = 0.0;        // sum_{i<j} |A_ij|
    double diag_pos = 0.0;   // sum max(A_ii, 0)
    double diag_neg = 0.0;   // sum max(-A_ii, 0)
};

Magnitudes magnitudes(const QuadraticForm& q) noexcept {
    Magnitudes m;
    for (const LinearTerm& t : q.linear()) {
        m.linear = add_up(m.linear, std::fabs(t.coef));
    }
    for (const QuadTerm& t : q.quadratic()) {
        if (t.i != t.j) {
            m.off = add_up(m.off, std::fabs(t.coef));
        } else if (t.coef > 0.0) {
            m.diag_pos = add_up(m.diag_pos, t.coef);
        } else {
            m.diag_neg = add_up(m.diag_neg, -t.coef);
        }
    }
    return m;
}

// Ranges of the linear, quadratic and error parts taken separately.
Interval linear_range(const Magnitudes& m) { return {-m.linear, m.linear}; }

Interval quadratic_range(const Magnitudes& m) {
    return {-add_up(m.diag_neg, m.off), add_up(m.diag_pos, m.off)};
}

Interval error_range(const QuadraticForm& q) { return {-add_up(q.minus(), q.pm()), add_up(q.plus(), q.pm())}; }

// Upper bound on |q - center - tail| over the noise domain.
double deviation(const QuadraticForm& q) noexcept {
    const Magnitudes m = magnitudes(q);
    double d = add_up(m.linear, m.off);
    d = add_up(d, std::max(m.diag_pos, m.diag_neg));
    d = add_up(d, q.pm());
    return add_up(d, std::max(q.plus(), q.minus()));
}

// Slots of k * E, with k a scalar: the orientation of e_plus / e_minus flips
// for negative k.
ErrorRouting scaled_slots(double k, const QuadraticForm& x) noexcept {
    const double a = std::fabs(k);
    ErrorRouting r;
    r.pm = mul_up(a, x.pm());
    if (k >= 0.0) {
        r.plus = mul_up(a, x.plus());
        r.minus = mul_up(a, x.minus());
    } else {
        r.plus = mul_up(a, x.minus());
        r.minus = mul_up(a, x.plus());
    }
    return r;
}

ErrorRouting sum(const ErrorRouting& l, const ErrorRouting& r) noexcept {
    return {add_up(l.pm, r.pm), add_up(l.plus, r.plus), add_up(l.minus, r.minus)};
}

// Tail of the product center; see mul().
double product_tail(FormBuilder& fb, const QuadraticForm& x, const QuadraticForm& y, double residual) {
    const double t = x.center_tail();
    const double u = y.center_tail();
    double tail = residual;
    tail = fb.add(tail, fb.mul(x.center(), u));
    tail = fb.add(tail, fb.mul(y.center(), t));
    tail = fb.add(tail, fb.mul(t, u));
    // The noise-dependent parts were multiplied by the head of the other
    // center only; the tails times those parts are charged as error.
    if (t != 0.0) {
        fb.charge(mul_up(std::fabs(t), deviation(y)));
    }
    if (u != 0.0) {
        fb.charge(mul_up(std::fabs(u), deviation(x)));
    }
    return tail;
}

} // namespace

Interval concretize_mt(const QuadraticForm& q) {
    const Magnitudes m = magnitudes(q);
    double up = add_up(m.linear, m.off);
    double down = up;
    up = add_up(add_up(add_up(up, m.diag_pos), q.plus()), q.pm());
    down = add_up(add_up(add_up(down, m.diag_neg), q.minus()), q.pm());
    const double lo = sub_down(add_down(q.center(), q.center_tail()), down);
    const double hi = add_up(add_up(q.center(), q.center_tail()), up);
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw NonFiniteError("form range overflows");
    }
    return {lo, hi};
}

QuadraticForm abstract_interval(const Interval& i, NoiseRegistry& reg) {
    if (i.is_point()) {
        return QuadraticForm::constant(i.lo());
    }
    return QuadraticForm(i.mid(), {{reg.fresh(), i.lg()}});
}

QuadraticForm literal_form(const DecimalValue& d, bool fp) {
    return QuadraticForm(d.value, {}, {}, fp ? conversion_error(d) : 0.0);
}

QuadraticForm add(const QuadraticForm& x, const QuadraticForm& y, bool fp) {
    FormBuilder fb(fp);
    const Eft c = two_sum(x.center(), y.center());
    double tail = fb.add(x.center_tail(), y.center_tail());
    if (fp) {
        tail = fb.add(tail, c.error);
    }

    std::vector<LinearTerm> b(x.linear().begin(), x.linear().end());
    b.insert(b.end(), y.linear().begin(), y.linear().end());
    std::vector<QuadTerm> a(x.quadratic().begin(), x.quadratic().end());
    a.insert(a.end(), y.quadratic().begin(), y.quadratic().end());

    return fb.finish(c.value, tail, std::move(b), std::move(a), add_up(x.pm(), y.pm()), add_up(x.plus(), y.plus()),
                     add_up(x.minus(), y.minus()));
}

QuadraticForm sub(const QuadraticForm& x, const QuadraticForm& y, bool fp) { return add(x, neg(y), fp); }

QuadraticForm coherent_sub(const QuadraticForm& x, const QuadraticForm& y, bool fp) {
    FormBuilder fb(fp);
    const Eft c = two_sum(x.center(), -y.center());
    double tail = fb.add(x.center_tail(), -y.center_tail());
    if (fp) {
        tail = fb.add(tail, c.error);
    }
    std::vector<LinearTerm> b(x.linear().begin(), x.linear().end());
    for (const LinearTerm& t : y.linear()) {
        b.push_back({t.id, -t.coef});
    }
    std::vector<QuadTerm> a(x.quadratic().begin(), x.quadratic().end());
    for (const QuadTerm& t : y.quadratic()) {
        a.push_back({t.i, t.j, -t.coef});
    }
    const double pm = fb.add(x.pm(), -y.pm());
    const double plus = fb.add(x.plus(), -y.plus());
    const double minus = fb.add(x.minus(), -y.minus());
    // d*e_plus with d < 0 ranges over [d, 0], as |d|*e_minus does.
    const double plus_out = add_up(std::max(plus, 0.0), std::max(-minus, 0.0));
    const double minus_out = add_up(std::max(minus, 0.0), std::max(-plus, 0.0));
    return fb.finish(c.value, tail, std::move(b), std::move(a), std::fabs(pm), plus_out, minus_out);
}

QuadraticForm neg(const QuadraticForm& x) {
    std::vector<LinearTerm> b(x.linear().begin(), x.linear().end());
    for (LinearTerm& t : b) {
        t.coef = -t.coef;
    }
    std::vector<QuadTerm> a(x.quadratic().begin(), x.quadratic().end());
    for (QuadTerm& t : a) {
        t.coef = -t.coef;
    }
    // Exact: nothing is charged, and the tail must survive.
    FormBuilder fb(true);
    return fb.finish(-x.center(), -x.center_tail(), std::move(b), std::move(a), x.pm(), x.minus(), x.plus());
}

QuadraticForm scale(double lambda, const QuadraticForm& x, bool fp) {
    if (!std::isfinite(lambda)) {
        throw NonFiniteError("non-finite scale factor");
    }
    if (lambda == 0.0) {
        return {};
    }
    FormBuilder fb(fp);
    const Eft c = two_product(lambda, x.center());
    double tail = fb.mul(lambda, x.center_tail());
    if (fp) {
        if (!c.exact) {
            fb.charge(c.error);
        } else {
            tail = fb.add(tail, c.error);
        }
    }
    std::vector<LinearTerm> b(x.linear().begin(), x.linear().end());
    for (LinearTerm& t : b) {
        t.coef = fb.mul(lambda, t.coef);
    }
    std::vector<QuadTerm> a(x.quadratic().begin(), x.quadratic().end());
    for (QuadTerm& t : a) {
        t.coef = fb.mul(lambda, t.coef);
    }
    const ErrorRouting e = scaled_slots(lambda, x);
    return fb.finish(c.value, tail, std::move(b), std::move(a), e.pm, e.plus, e.minus);
}

ErrorRouting route_interval_to_errors(const Interval& i) noexcept {
    return {0.0, std::max(i.hi(), 0.0), std::max(-i.lo(), 0.0)};
}

QuadraticForm mul(const QuadraticForm& x, const QuadraticForm& y, bool fp) {
    FormBuilder fb(fp);
    const double cx = x.center();
    const double cy = y.center();

    const Eft c = two_product(cx, cy);
    double residual = 0.0;
    if (fp) {
        if (c.exact) {
            residual = c.error;
        } else {
            fb.charge(c.error);
        }
    }
    const double tail = product_tail(fb, x, y, residual);

    // Exact degree <= 2 part: c'b + cb', c'A + cA' + b b'^T.
    std::vector<LinearTerm> b;
    b.reserve(x.linear().size() + y.linear().size());
    for (const LinearTerm& t : x.linear()) {
        b.push_back({t.id, fb.mul(cy, t.coef)});
    }
    for (const LinearTerm& t : y.linear()) {
        b.push_back({t.id, fb.mul(cx, t.coef)});
    }
    std::vector<QuadTerm> a;
    a.reserve(x.quadratic().size() + y.quadratic().size() + x.linear().size() * y.linear().size());
    for (const QuadTerm& t : x.quadratic()) {
        a.push_back({t.i, t.j, fb.mul(cy, t.coef)});
    }
    for (const QuadTerm& t : y.quadratic()) {
        a.push_back({t.i, t.j, fb.mul(cx, t.coef)});
    }
    for (const LinearTerm& l : x.linear()) {
        for (const LinearTerm& r : y.linear()) {
            a.push_back({std::min(l.id, r.id), std::max(l.id, r.id), fb.mul(l.coef, r.coef)});
        }
    }

    // Constant times error terms stays exact up to upward rounding.
    ErrorRouting slots = sum(scaled_slots(cy, x), scaled_slots(cx, y));

    // Everything of degree > 2 or involving two error terms.
    const Magnitudes mx = magnitudes(x);
    const Magnitudes my = magnitudes(y);
    const ExtInterval lx = linear_range(mx);
    const ExtInterval ly = linear_range(my);
    const ExtInterval qx = quadratic_range(mx);
    const ExtInterval qy = quadratic_range(my);
    const ExtInterval ex = error_range(x);
    const ExtInterval ey = error_range(y);
    const ExtInterval rem = lx * qy + ly * qx + qx * qy + ex * (ly + qy + ey) + ey * (lx + qx);
    if (!rem.is_bounded()) {
        throw NonFiniteError("product remainder overflows");
    }
    const ErrorRouting routed = route_interval_to_errors(rem.bounded());
    slots = sum(slots, routed);

    return fb.finish(c.value, tail, std::move(b), std::move(a), slots.pm, slots.plus, slots.minus);
}

QuadraticForm mul_affine(const QuadraticForm& x, const QuadraticForm& y, NoiseRegistry& reg, bool fp) {
    if (!x.is_linear() || !y.is_linear()) {
        throw std::invalid_argument("affine product of forms with quadratic terms");
    }
    FormBuilder fb(fp);
    const double cx = x.center();
    const double cy = y.center();
    const Eft c = two_product(cx, cy);
    double residual = 0.0;
    if (fp) {
        if (c.exact) {
            residual = c.error;
        } else {
            fb.charge(c.error);
        }
    }
    double tail = product_tail(fb, x, y, residual);

    std::vector<LinearTerm> b;
    b.reserve(x.linear().size() + y.linear().size() + 1);
    for (const LinearTerm& t : x.linear()) {
        b.push_back({t.id, fb.mul(cy, t.coef)});
    }
    for (const LinearTerm& t : y.linear()) {
        b.push_back({t.id, fb.mul(cx, t.coef)});
    }
    const ErrorRouting slots = sum(scaled_slots(cy, x), scaled_slots(cx, y));

    const ExtInterval rem =
        (linear_range(magnitudes(x)) + error_range(x)) * (linear_range(magnitudes(y)) + error_range(y));
    if (!rem.is_bounded()) {
        throw NonFiniteError("product remainder overflows");
    }
    const Interval r = rem.bounded();
    if (r.lo() != r.hi()) {
        // mid(r) is added to the tail; its rounding is a genuine error.
        tail = fb.add(tail, r.mid());
        b.push_back({reg.fresh(), r.lg()});
    } else if (r.lo() != 0.0) {
        tail = fb.add(tail, r.lo());
    }
    return fb.finish(c.value, tail, std::move(b), {}, slots.pm, slots.plus, slots.minus);
}

namespace {

// Enclosure [lo, hi] of f(v) - alpha*v over [a, b], 0 < a.
Interval inv_residual(double a, double b, double alpha) {
    const double mag = -alpha;
    const auto r_up = [mag](double v) { return add_up(div_up(1.0, v), mul_up(mag, v)); };
    const double hi = std::max(r_up(a), r_up(b));
    // 1/v + |alpha| v >= 2 sqrt(|alpha|) for every v > 0.
    double lo = 2.0 * sqrt_down(mag);
    const auto r_down = [mag](double v) { return add_down(div_down(1.0, v), mul_down(mag, v)); };
    lo = std::min(lo, std::min(r_down(a), r_down(b)));
    return {lo, hi};
}

Interval sqrt_residual(double a, double b, double alpha) {
    const auto r_down = [alpha](double v) { return sub_down(sqrt_down(v), mul_up(alpha, v)); };
    const double lo = std::min(r_down(a), r_down(b));
    // alpha*v + 1/(4 alpha) >= sqrt(v) for every v >= 0.
    const double hi = div_up(1.0, 4.0 * alpha);
    return {lo, std::max(lo, hi)};
}

} // namespace

QuadraticForm unary_nonlinear(UnaryKind kind, const QuadraticForm& x, const Interval& range, NoiseRegistry& reg,
                              bool fp) {
    const double a = range.lo();
    const double b = range.hi();
    if (kind == UnaryKind::Inv && range.contains_zero()) {
        throw DomainError("reciprocal of a range containing zero");
    }
    if (kind == UnaryKind::Sqrt && a < 0.0) {
        throw DomainError("square root of a range with a negative part");
    }

    if (range.is_point()) {
        const Interval v = kind == UnaryKind::Inv ? recip(range) : sqrt(range);
        return QuadraticForm(v.mid(), {}, {}, v.is_point() ? 0.0 : v.lg());
    }

    double alpha = 0.0;
    Interval residual;
    if (kind == UnaryKind::Inv) {
        if (a > 0.0) {
            alpha = -1.0 / (b * b);
            residual = inv_residual(a, b, alpha);
        } else {
            // 1/v - alpha v = -(1/w - alpha w) with w = -v > 0.
            alpha = -1.0 / (a * a);
            residual = -inv_residual(-b, -a, alpha);
        }
    } else {
        alpha = 1.0 / (2.0 * std::sqrt(b));
        residual = sqrt_residual(a, b, alpha);
    }
    if (!std::isfinite(alpha)) {
        throw NonFiniteError("linearization slope overflows");
    }

    QuadraticForm y = scale(alpha, x, fp);
    const double zeta = residual.mid();
    const double delta = residual.lg();
    std::vector<LinearTerm> band;
    if (delta > 0.0) {
        band.push_back({reg.fresh(), delta});
    }
    return add(y, QuadraticForm(zeta, std::move(band)), fp);
}

QuadraticForm unary_nonlinear(UnaryKind kind, const QuadraticForm& x, NoiseRegistry& reg, bool fp) {
    return unary_nonlinear(kind, x, concretize_mt(x), reg, fp);
}

} // namespace qz
