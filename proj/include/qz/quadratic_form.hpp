// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qz/interval.hpp"
#include "qz/noise.hpp"
#include "qz/rounding.hpp"

namespace qz {

struct LinearTerm {
    SymbolId id;
    double coef;
    friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

// Coefficient of eps_i * eps_j with i <= j. Off-diagonal entries hold the
// combined weight of (i,j) and (j,i).
struct QuadTerm {
    SymbolId i;
    SymbolId j;
    double coef;
    friend bool operator==(const QuadTerm&, const QuadTerm&) = default;
};

/// A coefficient became infinite or NaN.
class NonFiniteError : public std::overflow_error {
  public:
    using std::overflow_error::overflow_error;
};

/// A nonlinear operator was applied outside its domain.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// c + b.eps + eps'A eps + pm*e_pm + plus*e_plus + minus*e_minus with eps in
// [-1,1]^m, e_pm in [-1,1], e_plus in [0,1], e_minus in [-1,0]. The three
// error symbols belong to the form; they are not shared with other forms.
//
// The center is stored as an unevaluated sum center() + center_tail(). The
// tail only becomes nonzero in floating-point accounting mode, where it
// absorbs the rounding error of center arithmetic exactly.
class QuadraticForm {
  public:
    QuadraticForm() = default;

    /// Validating constructor: terms may come in any order, duplicates are
    /// summed, zeros dropped, (j,i) keys folded onto (i,j). Throws
    /// std::invalid_argument on negative error coefficients and NonFiniteError
    /// on non-finite input.
    QuadraticForm(double c, std::vector<LinearTerm> b, std::vector<QuadTerm> a = {}, double pm = 0.0,
                  double plus = 0.0, double minus = 0.0);

    static QuadraticForm constant(double c) { return QuadraticForm(c, {}); }

    [[nodiscard]] double center() const noexcept { return c_; }
    [[nodiscard]] double center_tail() const noexcept { return tail_; }
    [[nodiscard]] std::span<const LinearTerm> linear() const noexcept { return b_; }
    [[nodiscard]] std::span<const QuadTerm> quadratic() const noexcept { return a_; }
    [[nodiscard]] double pm() const noexcept { return pm_; }
    [[nodiscard]] double plus() const noexcept { return plus_; }
    [[nodiscard]] double minus() const noexcept { return minus_; }

    [[nodiscard]] double linear_coef(SymbolId id) const noexcept;
    [[nodiscard]] double quadratic_coef(SymbolId i, SymbolId j) const noexcept;

    [[nodiscard]] bool has_error_terms() const noexcept { return pm_ != 0.0 || plus_ != 0.0 || minus_ != 0.0; }
    [[nodiscard]] bool is_constant() const noexcept { return b_.empty() && a_.empty() && !has_error_terms(); }
    [[nodiscard]] bool is_linear() const noexcept { return a_.empty(); }
    /// Sorted plain symbols with a nonzero coefficient.
    [[nodiscard]] std::vector<SymbolId> symbols() const;

    friend bool operator==(const QuadraticForm&, const QuadraticForm&) = default;

  private:
    friend class FormBuilder;

    double c_ = 0.0;
    double tail_ = 0.0;
    std::vector<LinearTerm> b_;
    std::vector<QuadTerm> a_;
    double pm_ = 0.0;
    double plus_ = 0.0;
    double minus_ = 0.0;
};

// Values for every noise symbol; symbols that are absent are taken as 0.
struct NoiseAssignment {
    std::map<SymbolId, long double> plain;
    long double pm = 0.0L;
    long double plus = 0.0L;
    long double minus = 0.0L;
};

/// Evaluates in long double. Throws std::out_of_range when the assignment
/// leaves the noise domain.
long double eval(const QuadraticForm& q, const NoiseAssignment& t);

/// Closed-form enclosure of the range, rounded outward.
Interval concretize_mt(const QuadraticForm& q);

/// mid(I) + lg(I) * eps_fresh. Point intervals give a constant and consume no
/// symbol.
QuadraticForm abstract_interval(const Interval& i, NoiseRegistry& reg);

/// A source constant; in fp mode a lossy decimal conversion is charged to the
/// symmetric error slot.
QuadraticForm literal_form(const DecimalValue& d, bool fp);

QuadraticForm add(const QuadraticForm& x, const QuadraticForm& y, bool fp = false);
QuadraticForm sub(const QuadraticForm& x, const QuadraticForm& y, bool fp = false);
QuadraticForm neg(const QuadraticForm& x);
QuadraticForm scale(double lambda, const QuadraticForm& x, bool fp = false);
QuadraticForm mul(const QuadraticForm& x, const QuadraticForm& y, bool fp = false);

/// x - y when both forms are read with the same error-symbol values, as for
/// a form and a truncation of it. Differences of slot coefficients of the
/// wrong sign are moved to the slot with the mirrored range.
QuadraticForm coherent_sub(const QuadraticForm& x, const QuadraticForm& y, bool fp = false);

/// Affine-arithmetic product for forms without quadratic terms: the
/// nonlinear part becomes one fresh symbol.
QuadraticForm mul_affine(const QuadraticForm& x, const QuadraticForm& y, NoiseRegistry& reg, bool fp = false);

struct ErrorRouting {
    double pm = 0.0;
    double plus = 0.0;
    double minus = 0.0;
};

/// Encodes a remainder range into the error slots: [-minus, plus] covers it.
ErrorRouting route_interval_to_errors(const Interval& i) noexcept;

enum class UnaryKind { Inv, Sqrt };

/// Min-range linearization alpha*x + zeta + delta*eps_fresh of 1/x or
/// sqrt(x), valid for every value of x inside `range`. Throws DomainError when
/// `range` contains 0 (inv) or has a negative part (sqrt).
QuadraticForm unary_nonlinear(UnaryKind kind, const QuadraticForm& x, const Interval& range, NoiseRegistry& reg,
                              bool fp = false);
/// Same, with range = concretize_mt(x).
QuadraticForm unary_nonlinear(UnaryKind kind, const QuadraticForm& x, NoiseRegistry& reg, bool fp = false);

} // namespace qz
