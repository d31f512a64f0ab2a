// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include "qz/interval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "qz/rounding.hpp"

namespace qz {

namespace {

// Products where one factor is zero are zero even against an infinite bound.
double prod_down(double a, double b) noexcept { return (a == 0.0 || b == 0.0) ? 0.0 : mul_down(a, b); }
double prod_up(double a, double b) noexcept { return (a == 0.0 || b == 0.0) ? 0.0 : mul_up(a, b); }

Interval checked(const ExtInterval& e) {
    if (!e.is_bounded()) {
        throw std::overflow_error("interval arithmetic overflow");
    }
    return {e.lo(), e.hi()};
}

} // namespace

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("interval bounds must be finite");
    }
    if (lo > hi) {
        throw std::invalid_argument("interval lower bound " + std::to_string(lo) + " exceeds upper bound " +
                                    std::to_string(hi));
    }
}

double Interval::mid() const noexcept {
    if (lo_ == hi_) {
        return lo_;
    }
    double m = 0.5 * lo_ + 0.5 * hi_;
    if (std::fabs(lo_) < 1e300 && std::fabs(hi_) < 1e300) {
        m = (lo_ + hi_) * 0.5;
    }
    return std::clamp(m, lo_, hi_);
}

double Interval::lg() const noexcept {
    const double m = mid();
    return std::max(sub_up(hi_, m), sub_up(m, lo_));
}

double Interval::width() const noexcept { return sub_up(hi_, lo_); }

Interval hull(const Interval& a, const Interval& b) noexcept {
    return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

std::optional<Interval> meet(const Interval& a, const Interval& b) noexcept {
    const double lo = std::max(a.lo(), b.lo());
    const double hi = std::min(a.hi(), b.hi());
    if (lo > hi) {
        return std::nullopt;
    }
    return Interval(lo, hi);
}

Interval operator+(const Interval& a, const Interval& b) { return checked(ExtInterval(a) + ExtInterval(b)); }
Interval operator-(const Interval& a, const Interval& b) { return checked(ExtInterval(a) - ExtInterval(b)); }
Interval operator-(const Interval& a) { return {-a.hi(), -a.lo()}; }
Interval operator*(const Interval& a, const Interval& b) { return checked(ExtInterval(a) * ExtInterval(b)); }
Interval operator*(double s, const Interval& a) { return Interval::point(s) * a; }

Interval sqr(const Interval& a) {
    const double m = std::max(std::fabs(a.lo()), std::fabs(a.hi()));
    const double lo = a.contains_zero() ? 0.0 : std::min(std::fabs(a.lo()), std::fabs(a.hi()));
    return checked(ExtInterval(mul_down(lo, lo), mul_up(m, m)));
}

Interval recip(const Interval& a) {
    if (a.contains_zero()) {
        throw std::domain_error("reciprocal of an interval containing zero");
    }
    return checked(ExtInterval(div_down(1.0, a.hi()), div_up(1.0, a.lo())));
}

Interval sqrt(const Interval& a) {
    if (a.lo() < 0.0) {
        throw std::domain_error("square root of an interval with negative part");
    }
    return {sqrt_down(a.lo()), sqrt_up(a.hi())};
}

std::ostream& operator<<(std::ostream& os, const Interval& i) { return os << '[' << i.lo() << ", " << i.hi() << ']'; }

ExtInterval::ExtInterval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (std::isnan(lo) || std::isnan(hi) || lo > hi || lo == kInf || hi == -kInf) {
        throw std::invalid_argument("malformed extended interval");
    }
}

bool ExtInterval::is_bounded() const noexcept { return std::isfinite(lo_) && std::isfinite(hi_); }

Interval ExtInterval::bounded() const { return checked(*this); }

double ExtInterval::width() const noexcept { return is_bounded() ? sub_up(hi_, lo_) : kInf; }

ExtInterval hull(const ExtInterval& a, const ExtInterval& b) noexcept {
    return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

std::optional<ExtInterval> meet(const ExtInterval& a, const ExtInterval& b) noexcept {
    const double lo = std::max(a.lo(), b.lo());
    const double hi = std::min(a.hi(), b.hi());
    if (lo > hi) {
        return std::nullopt;
    }
    return ExtInterval(lo, hi);
}

ExtInterval operator+(const ExtInterval& a, const ExtInterval& b) noexcept {
    return {add_down(a.lo(), b.lo()), add_up(a.hi(), b.hi())};
}

ExtInterval operator-(const ExtInterval& a, const ExtInterval& b) noexcept {
    return {sub_down(a.lo(), b.hi()), sub_up(a.hi(), b.lo())};
}

ExtInterval operator-(const ExtInterval& a) noexcept { return {-a.hi(), -a.lo()}; }

ExtInterval operator*(const ExtInterval& a, const ExtInterval& b) noexcept {
    const double lo = std::min({prod_down(a.lo(), b.lo()), prod_down(a.lo(), b.hi()), prod_down(a.hi(), b.lo()),
                                prod_down(a.hi(), b.hi())});
    const double hi = std::max({prod_up(a.lo(), b.lo()), prod_up(a.lo(), b.hi()), prod_up(a.hi(), b.lo()),
                                prod_up(a.hi(), b.hi())});
    return {lo, hi};
}

ExtInterval operator/(const ExtInterval& a, const ExtInterval& b) noexcept {
    if (b.contains_zero()) {
        return ExtInterval::whole();
    }
    const ExtInterval inv(div_down(1.0, b.hi()), div_up(1.0, b.lo()));
    return a * inv;
}

std::optional<ExtInterval> sqrt_preimage(const ExtInterval& a) noexcept {
    if (a.hi() < 0.0) {
        return std::nullopt;
    }
    const double lo = std::max(a.lo(), 0.0);
    return ExtInterval(prod_down(lo, lo), prod_up(a.hi(), a.hi()));
}

std::ostream& operator<<(std::ostream& os, const ExtInterval& i) {
    return os << '[' << i.lo() << ", " << i.hi() << ']';
}

} // namespace qz
