// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include "qz/rounding.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace qz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMax = std::numeric_limits<double>::max();
constexpr double kSplitter = 134217729.0; // 2^27 + 1
// Veltkamp splitting and the Dekker product are exact when both operands
// stay well inside the exponent range.
const double kSplitHi = std::ldexp(1.0, 400);
const double kSplitLo = std::ldexp(1.0, -400);
// Below this magnitude the product residual may not be representable.
const double kTinyProduct = std::ldexp(1.0, -969);

struct Split {
    double hi;
    double lo;
};

Split veltkamp(double a) noexcept {
    const double t = kSplitter * a;
    const double hi = t - (t - a);
    return {hi, a - hi};
}

bool splittable(double a) noexcept {
    const double m = std::fabs(a);
    return m <= kSplitHi && m >= kSplitLo;
}

// Rounds an overflowed result toward the requested side.
double saturate_up(double v) noexcept { return v == -kInf ? -kMax : v; }
double saturate_down(double v) noexcept { return v == kInf ? kMax : v; }

} // namespace

Eft two_sum(double u, double v) noexcept {
    const double s = u + v;
    if (!std::isfinite(s)) {
        return {s, kInf, false};
    }
    const double bv = s - u;
    const double av = s - bv;
    const double e = (u - av) + (v - bv);
    return {s, e, true};
}

Eft two_product(double u, double v) noexcept {
    const double p = u * v;
    if (u == 0.0 || v == 0.0) {
        return {p, 0.0, true};
    }
    if (!std::isfinite(p)) {
        return {p, kInf, false};
    }
    if (std::fabs(p) < kTinyProduct) {
        return {p, std::max(ulp(p), std::numeric_limits<double>::denorm_min()), false};
    }
    if (splittable(u) && splittable(v)) {
        const auto [uh, ul] = veltkamp(u);
        const auto [vh, vl] = veltkamp(v);
        const double e = ((uh * vh - p) + uh * vl + ul * vh) + ul * vl;
        return {p, e, true};
    }
    // Operands too large to split: the fused residual is exact here since the
    // product is far from the underflow range.
    return {p, std::fma(u, v, -p), true};
}

double next_up(double x) noexcept { return std::nextafter(x, kInf); }
double next_down(double x) noexcept { return std::nextafter(x, -kInf); }

double add_up(double a, double b) noexcept {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        return a + b;
    }
    const Eft r = two_sum(a, b);
    if (!std::isfinite(r.value)) {
        return saturate_up(r.value);
    }
    return r.error > 0.0 ? next_up(r.value) : r.value;
}

double add_down(double a, double b) noexcept {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        return a + b;
    }
    const Eft r = two_sum(a, b);
    if (!std::isfinite(r.value)) {
        return saturate_down(r.value);
    }
    return r.error < 0.0 ? next_down(r.value) : r.value;
}

double sub_up(double a, double b) noexcept { return add_up(a, -b); }
double sub_down(double a, double b) noexcept { return add_down(a, -b); }

double mul_up(double a, double b) noexcept {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        return a * b;
    }
    const Eft r = two_product(a, b);
    if (!std::isfinite(r.value)) {
        return saturate_up(r.value);
    }
    if (!r.exact) {
        return next_up(r.value);
    }
    return r.error > 0.0 ? next_up(r.value) : r.value;
}

double mul_down(double a, double b) noexcept {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        return a * b;
    }
    const Eft r = two_product(a, b);
    if (!std::isfinite(r.value)) {
        return saturate_down(r.value);
    }
    if (!r.exact) {
        return next_down(r.value);
    }
    return r.error < 0.0 ? next_down(r.value) : r.value;
}

namespace {

// Sign of (a/b - fl(a/b)): -1, 0 or +1; 2 when it cannot be decided.
int division_residual_sign(double a, double b, double q) noexcept {
    if (std::fabs(q) < kTinyProduct || std::fabs(a) < kTinyProduct) {
        return 2;
    }
    const double r = std::fma(-q, b, a);
    if (r == 0.0) {
        return 0;
    }
    return ((r > 0.0) == (b > 0.0)) ? 1 : -1;
}

} // namespace

double div_up(double a, double b) noexcept {
    const double q = a / b;
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(q)) {
        return std::isfinite(a) && std::isfinite(b) ? saturate_up(q) : q;
    }
    const int s = division_residual_sign(a, b, q);
    return (s == 1 || s == 2) ? next_up(q) : q;
}

double div_down(double a, double b) noexcept {
    const double q = a / b;
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(q)) {
        return std::isfinite(a) && std::isfinite(b) ? saturate_down(q) : q;
    }
    const int s = division_residual_sign(a, b, q);
    return (s == -1 || s == 2) ? next_down(q) : q;
}

double sqrt_up(double a) noexcept {
    const double s = std::sqrt(a);
    if (!std::isfinite(s) || s == 0.0) {
        return s;
    }
    const double r = std::fma(-s, s, a);
    return r > 0.0 ? next_up(s) : s;
}

double sqrt_down(double a) noexcept {
    const double s = std::sqrt(a);
    if (!std::isfinite(s) || s == 0.0) {
        return s;
    }
    const double r = std::fma(-s, s, a);
    return r < 0.0 ? next_down(s) : s;
}

double ulp(double x) noexcept {
    const double m = std::fabs(x);
    if (!std::isfinite(m)) {
        return m;
    }
    if (m == kMax) {
        return m - std::nextafter(m, 0.0);
    }
    return std::nextafter(m, kInf) - m;
}

void ErrorAccumulator::add(double e) noexcept { total_ = add_up(total_, std::fabs(e)); }

namespace {

bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

// Decides exactness of D * 10^k conservatively: false means "maybe inexact".
bool decimal_exact(std::string_view text) {
    std::string digits;
    int exponent = 0;
    std::size_t i = 0;
    bool after_point = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.') {
            after_point = true;
            continue;
        }
        if (!is_digit(c)) {
            break;
        }
        digits.push_back(c);
        if (after_point) {
            --exponent;
        }
    }
    if (i < text.size()) {
        // exponent part, already validated by the caller
        int e = 0;
        std::from_chars(text.data() + i + 1 + (text[i + 1] == '+' ? 1 : 0), text.data() + text.size(), e);
        exponent += e;
    }
    const auto first = digits.find_first_not_of('0');
    if (first == std::string::npos) {
        return true;
    }
    digits.erase(0, first);
    while (!digits.empty() && digits.back() == '0') {
        digits.pop_back();
        ++exponent;
    }
    if (digits.size() > 19) {
        return false;
    }
    std::uint64_t mantissa = std::stoull(digits);
    constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 53;
    if (exponent >= 0) {
        for (int k = 0; k < exponent; ++k) {
            if (mantissa > kExactLimit / 10) {
                return false;
            }
            mantissa *= 10;
        }
        return mantissa <= kExactLimit;
    }
    if (exponent < -22) {
        return false;
    }
    for (int k = 0; k < -exponent; ++k) {
        if (mantissa % 5 != 0) {
            return false;
        }
        mantissa /= 5;
    }
    // remaining value mantissa / 2^-exponent is a dyadic rational
    return mantissa <= kExactLimit;
}

} // namespace

DecimalValue parse_decimal(std::string_view text) {
    std::size_t i = 0;
    std::size_t mantissa_digits = 0;
    while (i < text.size() && is_digit(text[i])) {
        ++i;
        ++mantissa_digits;
    }
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && is_digit(text[i])) {
            ++i;
            ++mantissa_digits;
        }
    }
    if (mantissa_digits == 0) {
        throw std::invalid_argument("malformed numeric literal '" + std::string(text) + "'");
    }
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            ++i;
        }
        std::size_t exp_digits = 0;
        while (i < text.size() && is_digit(text[i])) {
            ++i;
            ++exp_digits;
        }
        if (exp_digits == 0) {
            throw std::invalid_argument("malformed exponent in '" + std::string(text) + "'");
        }
    }
    if (i != text.size()) {
        throw std::invalid_argument("trailing characters in numeric literal '" + std::string(text) + "'");
    }
    // strtod accepts a leading '.', from_chars does not care either way
    const std::string owned(text);
    char* end = nullptr;
    const double value = std::strtod(owned.c_str(), &end);
    if (!std::isfinite(value)) {
        throw std::invalid_argument("numeric literal out of range '" + owned + "'");
    }
    return {value, decimal_exact(text)};
}

double conversion_error(const DecimalValue& d) noexcept {
    if (d.exact) {
        return 0.0;
    }
    return std::max(ulp(d.value) * 0.5, std::numeric_limits<double>::denorm_min());
}

} // namespace qz
