// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>

namespace qz {

class ExtInterval;

// Closed, bounded, nonempty interval with finite endpoints. Arithmetic rounds
// outward; a result that would overflow throws std::overflow_error.
class Interval {
  public:
    constexpr Interval() = default;
    Interval(double lo, double hi);

    static Interval point(double v) { return {v, v}; }

    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }

    /// Round-to-nearest midpoint; always inside the interval.
    [[nodiscard]] double mid() const noexcept;
    /// Radius about mid(), rounded up so [mid-lg, mid+lg] covers the interval.
    [[nodiscard]] double lg() const noexcept;
    /// hi - lo rounded up.
    [[nodiscard]] double width() const noexcept;

    [[nodiscard]] bool contains(double v) const noexcept { return lo_ <= v && v <= hi_; }
    [[nodiscard]] bool contains(const Interval& o) const noexcept { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    [[nodiscard]] bool contains_zero() const noexcept { return lo_ <= 0.0 && 0.0 <= hi_; }
    [[nodiscard]] bool is_point() const noexcept { return lo_ == hi_; }

    friend bool operator==(const Interval&, const Interval&) = default;

  private:
    double lo_ = 0.0;
    double hi_ = 0.0;
};

Interval hull(const Interval& a, const Interval& b) noexcept;
std::optional<Interval> meet(const Interval& a, const Interval& b) noexcept;

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
Interval operator*(double s, const Interval& a);
Interval sqr(const Interval& a);
/// 1/a; throws std::domain_error when a contains zero.
Interval recip(const Interval& a);
/// sqrt(a); throws std::domain_error when a.lo() < 0.
Interval sqrt(const Interval& a);

std::ostream& operator<<(std::ostream& os, const Interval& i);

// Nonempty interval whose endpoints may be infinite. Used by guards, where
// half-lines appear, and as the carrier for top values.
class ExtInterval {
  public:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    constexpr ExtInterval() = default;
    ExtInterval(double lo, double hi);
    ExtInterval(const Interval& i) noexcept : lo_(i.lo()), hi_(i.hi()) {} // NOLINT(google-explicit-constructor)

    static ExtInterval whole() noexcept { return {}; }
    static ExtInterval at_least(double v) { return {v, kInf}; }
    static ExtInterval at_most(double v) { return {-kInf, v}; }

    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }
    [[nodiscard]] bool is_bounded() const noexcept;
    /// Throws std::overflow_error when unbounded.
    [[nodiscard]] Interval bounded() const;
    [[nodiscard]] double width() const noexcept;
    [[nodiscard]] bool contains(double v) const noexcept { return lo_ <= v && v <= hi_; }
    [[nodiscard]] bool contains(const ExtInterval& o) const noexcept { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    [[nodiscard]] bool contains_zero() const noexcept { return lo_ <= 0.0 && 0.0 <= hi_; }

    friend bool operator==(const ExtInterval&, const ExtInterval&) = default;

  private:
    double lo_ = -kInf;
    double hi_ = kInf;
};

ExtInterval hull(const ExtInterval& a, const ExtInterval& b) noexcept;
std::optional<ExtInterval> meet(const ExtInterval& a, const ExtInterval& b) noexcept;

ExtInterval operator+(const ExtInterval& a, const ExtInterval& b) noexcept;
ExtInterval operator-(const ExtInterval& a, const ExtInterval& b) noexcept;
ExtInterval operator-(const ExtInterval& a) noexcept;
ExtInterval operator*(const ExtInterval& a, const ExtInterval& b) noexcept;
/// a/b; the whole line when b contains zero.
ExtInterval operator/(const ExtInterval& a, const ExtInterval& b) noexcept;
/// {v : v >= 0, v*v in a} squared back, i.e. the preimage of sqrt restricted
/// to the nonnegative part of a. Empty when a is wholly negative.
std::optional<ExtInterval> sqrt_preimage(const ExtInterval& a) noexcept;

std::ostream& operator<<(std::ostream& os, const ExtInterval& i);

} // namespace qz
