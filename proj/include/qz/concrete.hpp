// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qz/ast.hpp"
#include "qz/interval.hpp"

namespace qz {

using Rational = boost::multiprecision::cpp_rational;

/// Exact value of a decimal/scientific literal.
Rational decimal_rational(std::string_view text);

/// Draws interval-literal values: an endpoint with small probability,
/// otherwise uniform.
class LiteralSampler {
  public:
    explicit LiteralSampler(std::uint64_t seed, double endpoint_probability = 0.05)
        : rng_(seed), endpoint_(endpoint_probability) {}

    double sample(double lo, double hi) {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
        if (u < endpoint_ / 2) {
            return lo;
        }
        if (u < endpoint_) {
            return hi;
        }
        const double v = std::uniform_real_distribution<double>(lo, hi)(rng_);
        return std::min(std::max(v, lo), hi);
    }

  private:
    std::mt19937_64 rng_;
    double endpoint_;
};

enum class RunStatus {
    Ok,
    Blocked,   // an assume failed or sqrt of a negative number
    Undefined, // division by zero
    Diverged,  // loop iteration cap hit
};

template <class T>
struct ConcreteOutcome {
    RunStatus status = RunStatus::Ok;
    std::vector<std::pair<std::string, T>> vars;

    [[nodiscard]] const T* find(std::string_view name) const {
        for (const auto& [n, v] : vars) {
            if (n == name) {
                return &v;
            }
        }
        return nullptr;
    }
};

template <class T>
struct ConcreteNumber;

template <>
struct ConcreteNumber<double> {
    static double constant(const lang::Expr& e, bool) { return e.value.value; }
    static double from_double(double v) { return v; }
    static double root(double v) { return std::sqrt(v); }
};

template <>
struct ConcreteNumber<long double> {
    static long double constant(const lang::Expr& e, bool decimal) {
        return !decimal || e.text.empty() ? static_cast<long double>(e.value.value)
                                          : std::strtold(e.text.c_str(), nullptr);
    }
    static long double from_double(double v) { return v; }
    static long double root(long double v) { return std::sqrt(v); }
};

template <>
struct ConcreteNumber<Rational> {
    static Rational constant(const lang::Expr& e, bool decimal) {
        return !decimal || e.text.empty() ? Rational(e.value.value) : decimal_rational(e.text);
    }
    static Rational from_double(double v) { return Rational(v); }
    static Rational root(const Rational&) { throw std::domain_error("sqrt has no exact rational execution"); }
};

/// Runs a program on concrete numbers, drawing every evaluation of an
/// interval literal from the sampler. Source constants denote their decimal
/// value, or with `decimal_constants` off, the nearest binary64.
template <class T>
class ConcreteRunner {
  public:
    explicit ConcreteRunner(LiteralSampler& sampler, long loop_cap = 100000, bool decimal_constants = true)
        : sampler_(&sampler), cap_(loop_cap), decimal_(decimal_constants) {}

    ConcreteOutcome<T> run(const lang::Program& p) {
        out_ = {};
        try {
            exec(p.body);
        } catch (const Stop& s) {
            out_.status = s.status;
        }
        return std::move(out_);
    }

  private:
    using N = ConcreteNumber<T>;
    struct Stop {
        RunStatus status;
    };

    T& slot(const std::string& name) {
        for (auto& [n, v] : out_.vars) {
            if (n == name) {
                return v;
            }
        }
        out_.vars.emplace_back(name, T(0));
        return out_.vars.back().second;
    }

    const T& read(const std::string& name) {
        const T* v = out_.find(name);
        if (v == nullptr) {
            throw std::out_of_range("unbound variable '" + name + "'");
        }
        return *v;
    }

    T eval(const lang::Expr& e) {
        using lang::ExprKind;
        switch (e.kind) {
        case ExprKind::Const:
            return N::constant(e, decimal_);
        case ExprKind::IntervalLit:
            return N::from_double(sampler_->sample(e.lo.value, e.hi.value));
        case ExprKind::Var:
            return read(e.name);
        case ExprKind::Neg:
            return -eval(*e.lhs);
        case ExprKind::Sqrt: {
            const T v = eval(*e.lhs);
            if (v < 0) {
                throw Stop{RunStatus::Blocked};
            }
            return N::root(v);
        }
        default:
            break;
        }
        const T l = eval(*e.lhs);
        const T r = eval(*e.rhs);
        switch (e.kind) {
        case ExprKind::Add:
            return l + r;
        case ExprKind::Sub:
            return l - r;
        case ExprKind::Mul:
            return l * r;
        case ExprKind::Div:
            if (r == 0) {
                throw Stop{RunStatus::Undefined};
            }
            return l / r;
        default:
            throw std::logic_error("unexpected expression kind");
        }
    }

    bool holds(const lang::RelExpr& c) {
        const T l = eval(*c.lhs);
        const T r = eval(*c.rhs);
        switch (c.op) {
        case lang::RelOp::Ge:
            return l >= r;
        case lang::RelOp::Le:
            return l <= r;
        case lang::RelOp::Gt:
            return l > r;
        case lang::RelOp::Lt:
            return l < r;
        case lang::RelOp::Eq:
            return l == r;
        case lang::RelOp::Ne:
            return l != r;
        }
        return false;
    }

    void exec(const lang::Block& b) {
        for (const lang::StmtPtr& s : b) {
            switch (s->kind) {
            case lang::StmtKind::Assign: {
                T v = eval(*s->expr);
                slot(s->target) = std::move(v);
                break;
            }
            case lang::StmtKind::Assume:
                if (!holds(s->cond)) {
                    throw Stop{RunStatus::Blocked};
                }
                break;
            case lang::StmtKind::If:
                exec(holds(s->cond) ? s->then_block : s->else_block);
                break;
            case lang::StmtKind::While: {
                long n = 0;
                while (holds(s->cond)) {
                    if (++n > cap_) {
                        throw Stop{RunStatus::Diverged};
                    }
                    exec(s->then_block);
                }
                break;
            }
            }
        }
    }

    LiteralSampler* sampler_;
    long cap_;
    bool decimal_;
    ConcreteOutcome<T> out_;
};

/// v inside iv, compared exactly.
template <class T>
bool encloses(const ExtInterval& iv, const T& v) {
    const bool lo_ok = std::isinf(iv.lo()) || ConcreteNumber<T>::from_double(iv.lo()) <= v;
    const bool hi_ok = std::isinf(iv.hi()) || v <= ConcreteNumber<T>::from_double(iv.hi());
    return lo_ok && hi_ok;
}

} // namespace qz
