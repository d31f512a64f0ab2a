// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include <cctype>

#include "qz/concrete.hpp"

namespace qz {

Rational decimal_rational(std::string_view text) {
    std::string digits;
    long exponent = 0;
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    bool seen_digit = false;
    bool after_point = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits += c;
            seen_digit = true;
            if (after_point) {
                --exponent;
            }
        } else if (c == '.' && !after_point) {
            after_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) {
        throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
    }
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') {
            throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
        }
        exponent += std::stol(std::string(text.substr(i + 1)));
    }
    // cpp_int reads a leading 0 as an octal prefix
    const std::size_t nz = digits.find_first_not_of('0');
    const boost::multiprecision::cpp_int mantissa(nz == std::string::npos ? std::string("0") : digits.substr(nz));
    Rational r(mantissa);
    const boost::multiprecision::cpp_int scale = boost::multiprecision::pow(boost::multiprecision::cpp_int(10),
                                                                            static_cast<unsigned>(std::labs(exponent)));
    if (exponent >= 0) {
        r *= scale;
    } else {
        r /= scale;
    }
    return negative ? Rational(-r) : r;
}

} // namespace qz
