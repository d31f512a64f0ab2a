// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include "qz/form_text.hpp"

#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <vector>

namespace qz {

namespace {

enum class Slot { None, Plus, Minus, Pm };

class FormParser {
  public:
    explicit FormParser(std::string_view text) : text_(text) {}

    QuadraticForm parse() {
        skip_ws();
        if (at_end()) {
            fail("empty form");
        }
        double sign = 1.0;
        if (peek() == '+' || peek() == '-') {
            sign = take() == '-' ? -1.0 : 1.0;
        }
        term(sign);
        for (skip_ws(); !at_end(); skip_ws()) {
            const char op = peek();
            if (op != '+' && op != '-') {
                fail("expected '+' or '-'");
            }
            ++pos_;
            term(op == '-' ? -1.0 : 1.0);
        }
        return QuadraticForm(c_, std::move(b_), std::move(a_), pm_, plus_, minus_);
    }

  private:
    void term(double sign) {
        skip_ws();
        const std::size_t start = pos_;
        double coef = sign;
        std::vector<SymbolId> plain;
        Slot slot = Slot::None;
        bool first = true;
        for (;;) {
            skip_ws();
            if (!first) {
                if (at_end() || peek() != '*') {
                    break;
                }
                ++pos_;
                skip_ws();
            }
            first = false;
            if (at_end()) {
                fail("expected a number or symbol");
            }
            if (peek() == 'e') {
                symbol(plain, slot);
            } else {
                coef *= number();
            }
        }
        if (slot != Slot::None) {
            if (!plain.empty()) {
                fail_at("error symbols cannot multiply plain symbols", start);
            }
            if (coef < 0.0) {
                fail_at("error symbol with a negative coefficient", start);
            }
            (slot == Slot::Pm ? pm_ : slot == Slot::Plus ? plus_ : minus_) += coef;
            return;
        }
        switch (plain.size()) {
        case 0:
            c_ += coef;
            break;
        case 1:
            b_.push_back({plain[0], coef});
            break;
        case 2:
            a_.push_back({plain[0], plain[1], coef});
            break;
        default:
            fail_at("term of degree greater than two", start);
        }
    }

    void symbol(std::vector<SymbolId>& plain, Slot& slot) {
        const std::size_t start = pos_;
        ++pos_; // 'e'
        if (!at_end() && std::isdigit(static_cast<unsigned char>(peek())) != 0) {
            SymbolId id = 0;
            const char* first = text_.data() + pos_;
            const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), id);
            if (ec != std::errc() || id == 0) {
                fail_at("invalid symbol index", start);
            }
            pos_ += static_cast<std::size_t>(ptr - first);
            plain.push_back(id);
            return;
        }
        Slot s = Slot::None;
        if (text_.substr(pos_, 2) == "pm") {
            s = Slot::Pm;
            pos_ += 2;
        } else if (!at_end() && peek() == 'p') {
            s = Slot::Plus;
            ++pos_;
        } else if (!at_end() && peek() == 'm') {
            s = Slot::Minus;
            ++pos_;
        } else {
            fail_at("unknown symbol", start);
        }
        if (slot != Slot::None) {
            fail_at("more than one error symbol in a term", start);
        }
        slot = s;
    }

    double number() {
        const std::size_t start = pos_;
        while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) != 0 || peek() == '.')) {
            ++pos_;
        }
        // exponent only when followed by a digit or a signed digit, so that
        // "2e1" is twenty while "2*e1" is a symbol
        if (!at_end() && (peek() == 'e' || peek() == 'E')) {
            std::size_t k = pos_ + 1;
            if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) {
                ++k;
            }
            if (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k])) != 0) {
                pos_ = k;
                while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())) != 0) {
                    ++pos_;
                }
            }
        }
        if (pos_ == start) {
            fail("expected a number or symbol");
        }
        try {
            return parse_decimal(text_.substr(start, pos_ - start)).value;
        } catch (const std::invalid_argument&) {
            fail_at("malformed number", start);
        }
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek())) != 0) {
            ++pos_;
        }
    }
    [[nodiscard]] bool at_end() const { return pos_ >= text_.size(); }
    [[nodiscard]] char peek() const { return text_[pos_]; }
    char take() { return text_[pos_++]; }

    [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }
    [[noreturn]] static void fail_at(const std::string& msg, std::size_t at) { throw FormSyntaxError(msg, at); }

    std::string_view text_;
    std::size_t pos_ = 0;
    double c_ = 0.0;
    std::vector<LinearTerm> b_;
    std::vector<QuadTerm> a_;
    double pm_ = 0.0;
    double plus_ = 0.0;
    double minus_ = 0.0;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void append_term(std::string& out, double coef, const std::string& suffix) {
    if (out.empty()) {
        out = coef < 0.0 ? "-" : "";
    } else {
        out += coef < 0.0 ? " - " : " + ";
    }
    out += num(std::fabs(coef));
    out += suffix;
}

} // namespace

QuadraticForm parse_form(std::string_view text) { return FormParser(text).parse(); }

std::string to_string(const QuadraticForm& q) {
    std::string out;
    if (q.center() != 0.0 || q.is_constant()) {
        append_term(out, q.center(), "");
    }
    if (q.center_tail() != 0.0) {
        append_term(out, q.center_tail(), "");
    }
    for (const LinearTerm& t : q.linear()) {
        append_term(out, t.coef, "*e" + std::to_string(t.id));
    }
    for (const QuadTerm& t : q.quadratic()) {
        append_term(out, t.coef, "*e" + std::to_string(t.i) + "*e" + std::to_string(t.j));
    }
    if (q.pm() != 0.0) {
        append_term(out, q.pm(), "*epm");
    }
    if (q.plus() != 0.0) {
        append_term(out, q.plus(), "*ep");
    }
    if (q.minus() != 0.0) {
        append_term(out, q.minus(), "*em");
    }
    return out;
}

} // namespace qz
