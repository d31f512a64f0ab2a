// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qz/quadratic_form.hpp"

namespace qz {

class FormSyntaxError : public std::invalid_argument {
  public:
    FormSyntaxError(const std::string& what, std::size_t position)
        : std::invalid_argument(what + " at position " + std::to_string(position + 1)), position_(position) {}
    /// Zero-based offset into the input.
    [[nodiscard]] std::size_t position() const noexcept { return position_; }

  private:
    std::size_t position_;
};

// Text syntax, whitespace-insensitive:
//
//   form   := [sign] term (sign term)*
//   term   := factor ("*" factor)*
//   factor := number | "e" digits | "ep" | "em" | "epm"
//
// e<i> is plain symbol i (i >= 1), ep / em / epm are the error symbols
// ranging over [0,1], [-1,0] and [-1,1]. A term holds at most two plain
// symbols, or exactly one error symbol with a nonnegative coefficient.
// Example: "1 + 0.5*e1 - e1*e2 + 0.25*epm".
QuadraticForm parse_form(std::string_view text);

/// Prints a form in the syntax accepted by parse_form, with round-trip
/// precision.
std::string to_string(const QuadraticForm& q);

} // namespace qz
