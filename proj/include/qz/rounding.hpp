// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

namespace qz {

// Result of an error-free transformation: value + error equals the exact
// real result. When `exact` is false the transformation could not be carried
// out (overflow in the splitter, gradual underflow) and `error` only bounds
// the magnitude of the true residual.
struct Eft {
    double value;
    double error;
    bool exact = true;
};

/// Knuth's branch-free two-sum.
Eft two_sum(double u, double v) noexcept;

/// Dekker's product with Veltkamp splitting (splitter 2^27 + 1).
Eft two_product(double u, double v) noexcept;

double next_up(double x) noexcept;
double next_down(double x) noexcept;

// Directed rounding without touching the FPU mode: the round-to-nearest
// result is nudged by one ulp only when the residual shows it landed on the
// wrong side.
double add_up(double a, double b) noexcept;
double add_down(double a, double b) noexcept;
double sub_up(double a, double b) noexcept;
double sub_down(double a, double b) noexcept;
double mul_up(double a, double b) noexcept;
double mul_down(double a, double b) noexcept;
double div_up(double a, double b) noexcept;
double div_down(double a, double b) noexcept;
double sqrt_up(double a) noexcept;
double sqrt_down(double a) noexcept;

/// Unit in the last place of |x| (distance to the next representable value
/// away from zero).
double ulp(double x) noexcept;

// Sums |e| over a sequence of rounding residuals, rounding upward so the
// total is a guaranteed bound.
class ErrorAccumulator {
  public:
    void add(double e) noexcept;
    void add(const Eft& r) noexcept { add(r.error); }
    [[nodiscard]] double total() const noexcept { return total_; }

  private:
    double total_ = 0.0;
};

// A decimal literal converted to binary64. `exact` is true only when the
// conversion provably lost nothing; otherwise |decimal - value| <= ulp(value)/2.
struct DecimalValue {
    double value;
    bool exact;
};

/// Parses a decimal/scientific literal. Throws std::invalid_argument on
/// malformed text.
DecimalValue parse_decimal(std::string_view text);

/// Upper bound on the conversion error of a decimal literal.
double conversion_error(const DecimalValue& d) noexcept;

} // namespace qz
