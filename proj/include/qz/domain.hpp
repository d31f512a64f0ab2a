// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <charconv>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qz/ast.hpp"
#include "qz/interval.hpp"
#include "qz/noise.hpp"
#include "qz/quadratic_form.hpp"
#include "qz/sdp.hpp"

namespace qz {

enum class DomainKind { Interval, Affine, Quad };
enum class Conc { Mt, Sdp };

std::string to_string(DomainKind k);
std::string to_string(Conc c);
std::optional<DomainKind> parse_domain_kind(std::string_view text);
std::optional<Conc> parse_conc(std::string_view text);

struct DomainOptions {
    bool fp = false;
    Conc conc = Conc::Mt;
    sdp::SdpOptions sdp;
    int backward_passes = 1;
};

/// A domain element for one variable: a value, Top or Bottom.
template <class V>
class Abstract {
  public:
    enum class Kind { Value, Top, Bottom };

    Abstract(V v) : kind_(Kind::Value), v_(std::move(v)) {} // NOLINT(google-explicit-constructor)
    static Abstract top() { return Abstract(Kind::Top); }
    static Abstract bottom() { return Abstract(Kind::Bottom); }

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] bool is_value() const noexcept { return kind_ == Kind::Value; }
    [[nodiscard]] bool is_top() const noexcept { return kind_ == Kind::Top; }
    [[nodiscard]] bool is_bottom() const noexcept { return kind_ == Kind::Bottom; }
    [[nodiscard]] const V& value() const {
        if (!v_) {
            throw std::logic_error("abstract value is Top or Bottom");
        }
        return *v_;
    }

    bool operator==(const Abstract&) const = default;

  private:
    explicit Abstract(Kind k) : kind_(k) {}
    Kind kind_;
    std::optional<V> v_;
};

/// sgn(a) min(|a|,|b|) when a and b share a sign, 0 otherwise.
double argmin(double a, double b) noexcept;

/// Embedding into a larger symbol space. Symbols are global identifiers
/// here, so the sparse representation is unchanged.
QuadraticForm extend(const QuadraticForm& q, std::size_t before, std::size_t after);

using Concretizer = std::function<Interval(const QuadraticForm&)>;

struct FormJoin {
    QuadraticForm form;   // base + alpha(residual)
    QuadraticForm base;   // argmin part with the joined center
    Interval residual;    // hull of the two residual ranges
};

/// Upper bound of two forms: argmin coefficients, the midpoint of the union of
/// the ranges as center, and one fresh symbol for the residual hull (omitted
/// when the hull is a point).
FormJoin join_forms(const QuadraticForm& x, const QuadraticForm& y, const Concretizer& gamma, NoiseRegistry& reg,
                    bool fp);

/// alpha(gamma(x) meet gamma(y)); nullopt when the ranges are disjoint.
std::optional<QuadraticForm> meet_forms(const QuadraticForm& x, const QuadraticForm& y, const Concretizer& gamma,
                                        NoiseRegistry& reg);

/// Enclosure of an interval literal: bounds widened by one ulp when the
/// decimal is not a binary64 number.
Interval literal_interval(const DecimalValue& lo, const DecimalValue& hi);

class IntervalAlgebra {
  public:
    using Value = Interval;

    IntervalAlgebra(NoiseRegistry& reg, const DomainOptions& options) : reg_(&reg), options_(options) {}

    [[nodiscard]] DomainKind kind() const noexcept { return DomainKind::Interval; }
    [[nodiscard]] Value constant(const DecimalValue& d) const;
    [[nodiscard]] Value literal(const Interval& i) const { return i; }
    [[nodiscard]] Value add(const Value& a, const Value& b) const { return a + b; }
    [[nodiscard]] Value sub(const Value& a, const Value& b) const { return a - b; }
    [[nodiscard]] Value mul(const Value& a, const Value& b) const { return a * b; }
    [[nodiscard]] Value neg(const Value& a) const { return -a; }
    [[nodiscard]] Value recip(const Value&, const Interval& range) const { return qz::recip(range); }
    [[nodiscard]] Value sqrt(const Value&, const Interval& range) const { return qz::sqrt(range); }
    [[nodiscard]] Interval range(const Value& v) const { return v; }
    [[nodiscard]] Value join(const Value& a, const Value& b) const { return hull(a, b); }
    [[nodiscard]] Value restrict(const Value&, const Interval& r) const { return r; }
    [[nodiscard]] std::string describe(const Value& v) const;
    [[nodiscard]] NoiseRegistry& registry() const noexcept { return *reg_; }

  private:
    NoiseRegistry* reg_;
    DomainOptions options_;
};

/// Quadratic forms, or linear forms with the affine product.
class FormAlgebra {
  public:
    using Value = QuadraticForm;

    FormAlgebra(NoiseRegistry& reg, const DomainOptions& options, bool affine);

    [[nodiscard]] DomainKind kind() const noexcept { return affine_ ? DomainKind::Affine : DomainKind::Quad; }
    [[nodiscard]] Value constant(const DecimalValue& d) const { return literal_form(d, options_.fp); }
    [[nodiscard]] Value literal(const Interval& i) const { return abstract_interval(i, *reg_); }
    [[nodiscard]] Value add(const Value& a, const Value& b) const { return qz::add(a, b, options_.fp); }
    [[nodiscard]] Value sub(const Value& a, const Value& b) const { return qz::sub(a, b, options_.fp); }
    [[nodiscard]] Value mul(const Value& a, const Value& b) const;
    [[nodiscard]] Value neg(const Value& a) const { return qz::neg(a); }
    [[nodiscard]] Value recip(const Value& x, const Interval& range) const;
    [[nodiscard]] Value sqrt(const Value& x, const Interval& range) const;
    [[nodiscard]] Interval range(const Value& v) const;
    [[nodiscard]] Value join(const Value& a, const Value& b) const;
    [[nodiscard]] Value restrict(const Value&, const Interval& r) const { return abstract_interval(r, *reg_); }
    [[nodiscard]] std::string describe(const Value& v) const;
    [[nodiscard]] NoiseRegistry& registry() const noexcept { return *reg_; }
    [[nodiscard]] Concretizer concretizer() const;

  private:
    NoiseRegistry* reg_;
    DomainOptions options_;
    bool affine_;
};

class QuadAlgebra : public FormAlgebra {
  public:
    QuadAlgebra(NoiseRegistry& reg, const DomainOptions& options) : FormAlgebra(reg, options, false) {}
};

class AffineAlgebra : public FormAlgebra {
  public:
    AffineAlgebra(NoiseRegistry& reg, const DomainOptions& options) : FormAlgebra(reg, options, true) {}
};

/// Variable bindings in insertion order; an unreachable environment has no
/// meaningful bindings.
template <class V>
class Env {
  public:
    using Entry = std::pair<std::string, Abstract<V>>;

    static Env unreachable_env() {
        Env e;
        e.bottom_ = true;
        return e;
    }

    [[nodiscard]] bool unreachable() const noexcept { return bottom_; }
    [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return vars_; }

    [[nodiscard]] const Abstract<V>* find(std::string_view name) const {
        for (const Entry& e : vars_) {
            if (e.first == name) {
                return &e.second;
            }
        }
        return nullptr;
    }

    [[nodiscard]] const Abstract<V>& project(std::string_view name) const {
        const Abstract<V>* v = find(name);
        if (v == nullptr) {
            throw std::out_of_range("unbound variable '" + std::string(name) + "'");
        }
        return *v;
    }

    /// Binding Bottom makes the whole environment unreachable.
    void bind(std::string_view name, Abstract<V> v) {
        if (v.is_bottom()) {
            bottom_ = true;
            vars_.clear();
            return;
        }
        for (Entry& e : vars_) {
            if (e.first == name) {
                e.second = std::move(v);
                return;
            }
        }
        vars_.emplace_back(std::string(name), std::move(v));
    }

    bool operator==(const Env&) const = default;

  private:
    bool bottom_ = false;
    std::vector<Entry> vars_;
};

struct Box {
    bool unreachable = false;
    std::vector<std::pair<std::string, ExtInterval>> vars;

    [[nodiscard]] const ExtInterval* find(std::string_view name) const;
};

/// Every interval of a inside the one of b with the same name.
bool box_leq(const Box& a, const Box& b);

/// Expression semantics, assignment, guard, join and meet over one algebra.
template <class A>
class Domain {
  public:
    using V = typename A::Value;
    using Value = Abstract<V>;
    using State = Env<V>;

    Domain(NoiseRegistry& reg, const DomainOptions& options) : alg_(reg, options), options_(options) {}

    [[nodiscard]] A& algebra() noexcept { return alg_; }
    [[nodiscard]] const DomainOptions& options() const noexcept { return options_; }
    [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    void clear_warnings() { warnings_.clear(); }
    /// Records a warning once; repeats are dropped.
    void note(std::string w) { warn(std::move(w)); }

    Value eval(const lang::Expr& e, const State& s) { return eval_rec(e, s, nullptr).v; }

    State assign(State s, std::string_view var, const lang::Expr& e) {
        if (s.unreachable()) {
            return s;
        }
        Value v = eval(e, s);
        if (v.is_bottom()) {
            warn("assignment to '" + std::string(var) + "' has no possible value; the path is unreachable");
        }
        s.bind(var, std::move(v));
        return s;
    }

    [[nodiscard]] ExtInterval range(const Value& v) const {
        if (v.is_value()) {
            return ExtInterval(alg_.range(v.value()));
        }
        return ExtInterval::whole();
    }

    [[nodiscard]] Box box(const State& s) const {
        Box b;
        b.unreachable = s.unreachable();
        for (const auto& [name, v] : s.entries()) {
            b.vars.emplace_back(name, range(v));
        }
        return b;
    }

    State join(const State& a, const State& b) {
        if (a.unreachable()) {
            return b;
        }
        if (b.unreachable()) {
            return a;
        }
        State out;
        for (const auto& [name, x] : a.entries()) {
            const Value* y = b.find(name);
            out.bind(name, y == nullptr ? x : join_values(x, *y));
        }
        for (const auto& [name, y] : b.entries()) {
            if (a.find(name) == nullptr) {
                out.bind(name, y);
            }
        }
        return out;
    }

    Value join_values(const Value& x, const Value& y) {
        if (x.is_bottom()) {
            return y;
        }
        if (y.is_bottom() || x == y) {
            return x;
        }
        if (x.is_top() || y.is_top()) {
            return Value::top();
        }
        return guarded([&] { return Value(alg_.join(x.value(), y.value())); });
    }

    /// Componentwise meet; identical components are kept as they are.
    State meet(const State& a, const State& b) {
        if (a.unreachable() || b.unreachable()) {
            return State::unreachable_env();
        }
        State out;
        for (const auto& [name, x] : a.entries()) {
            const Value* y = b.find(name);
            out.bind(name, y == nullptr ? x : meet_values(x, *y));
            if (out.unreachable()) {
                return out;
            }
        }
        for (const auto& [name, y] : b.entries()) {
            if (a.find(name) == nullptr) {
                out.bind(name, y);
            }
        }
        return out;
    }

    Value meet_values(const Value& x, const Value& y) {
        if (x.is_bottom() || y.is_bottom()) {
            return Value::bottom();
        }
        if (x == y || y.is_top()) {
            return x;
        }
        if (x.is_top()) {
            return y;
        }
        const auto m = qz::meet(alg_.range(x.value()), alg_.range(y.value()));
        if (!m) {
            return Value::bottom();
        }
        return Value(alg_.restrict(x.value(), *m));
    }

    State guard(const State& s, const lang::RelExpr& r) {
        if (s.unreachable()) {
            return s;
        }
        ExtInterval half = ExtInterval::at_least(0.0);
        switch (r.op) {
        case lang::RelOp::Ne:
            return s;
        case lang::RelOp::Eq:
            half = ExtInterval(0.0, 0.0);
            break;
        case lang::RelOp::Le:
        case lang::RelOp::Lt:
            half = ExtInterval::at_most(0.0);
            break;
        default:
            break;
        }
        const lang::ExprPtr e = lang::Expr::binary(lang::ExprKind::Sub, r.lhs, r.rhs);

        State cur = s;
        for (int pass = 0; pass < std::max(1, options_.backward_passes); ++pass) {
            Trace trace;
            const Value root = eval_rec(*e, cur, &trace).v;
            if (root.is_bottom()) {
                return State::unreachable_env();
            }
            std::vector<std::pair<std::string, ExtInterval>> refined;
            if (!backward(*e, half, trace, refined)) {
                return State::unreachable_env();
            }
            State next = cur;
            bool changed = false;
            for (const auto& [name, target] : refined) {
                const Value& v = cur.project(name);
                if (v.is_top()) {
                    if (target.is_bounded()) {
                        next.bind(name, Value(alg_.literal(target.bounded())));
                        changed = true;
                    }
                    continue;
                }
                const Interval g = alg_.range(v.value());
                const auto m = qz::meet(ExtInterval(g), target);
                if (!m) {
                    return State::unreachable_env();
                }
                const Interval narrowed = m->bounded();
                if (shrinks(g, narrowed)) {
                    next.bind(name, Value(alg_.restrict(v.value(), narrowed)));
                    changed = true;
                }
            }
            cur = std::move(next);
            if (!changed) {
                break;
            }
        }
        return cur;
    }

  private:
    using Trace = std::unordered_map<const lang::Expr*, ExtInterval>;

    void warn(std::string w) {
        if (std::find(warnings_.begin(), warnings_.end(), w) == warnings_.end()) {
            warnings_.push_back(std::move(w));
        }
    }

    static std::string where(const lang::Expr& e) {
        return std::to_string(e.pos.line) + ":" + std::to_string(e.pos.col);
    }

    // Arithmetic overflow turns a value into Top.
    template <class F>
    Value guarded(F&& f) {
        try {
            return f();
        } catch (const std::overflow_error& ex) {
            warn(std::string("value promoted to Top: ") + ex.what());
            return Value::top();
        }
    }

    // A value together with the plain interval evaluation of the same
    // expression. Both enclose every reachable result, so nonlinear operators
    // linearize over their intersection.
    struct Evaluated {
        Value v;
        ExtInterval box;
    };

    Evaluated eval_rec(const lang::Expr& e, const State& s, Trace* trace) {
        Evaluated r = eval_node(e, s, trace);
        if (trace != nullptr) {
            const auto m = qz::meet(range(r.v), r.box);
            (*trace)[&e] = m ? *m : range(r.v);
        }
        return r;
    }

    static ExtInterval sqrt_box(const ExtInterval& a) {
        const auto m = qz::meet(a, ExtInterval::at_least(0.0));
        if (!m) {
            return a; // unused: the value is Bottom
        }
        if (m->is_bounded()) {
            return qz::sqrt(m->bounded());
        }
        return ExtInterval::at_least(qz::sqrt(Interval(m->lo(), m->lo())).lo());
    }

    Evaluated eval_node(const lang::Expr& e, const State& s, Trace* trace) {
        using lang::ExprKind;
        switch (e.kind) {
        case ExprKind::Const:
            return {guarded([&] { return Value(alg_.constant(e.value)); }), literal_interval(e.value, e.value)};
        case ExprKind::IntervalLit: {
            const Interval i = literal_interval(e.lo, e.hi);
            return {Value(alg_.literal(i)), i};
        }
        case ExprKind::Var: {
            const Value& v = s.project(e.name);
            return {v, range(v)};
        }
        default:
            break;
        }
        const Evaluated l = eval_rec(*e.lhs, s, trace);
        if (e.kind == ExprKind::Neg || e.kind == ExprKind::Sqrt) {
            const ExtInterval box = e.kind == ExprKind::Neg ? -l.box : sqrt_box(l.box);
            if (!l.v.is_value()) {
                return {l.v, box};
            }
            if (e.kind == ExprKind::Neg) {
                return {Value(alg_.neg(l.v.value())), box};
            }
            return {sqrt_value(e, l.v.value(), l.box), box};
        }
        const Evaluated r = eval_rec(*e.rhs, s, trace);
        ExtInterval box;
        switch (e.kind) {
        case ExprKind::Add:
            box = l.box + r.box;
            break;
        case ExprKind::Sub:
            box = l.box - r.box;
            break;
        case ExprKind::Mul:
            box = l.box * r.box;
            break;
        default:
            box = l.box / r.box;
            break;
        }
        if (l.v.is_bottom() || r.v.is_bottom()) {
            return {Value::bottom(), box};
        }
        if (l.v.is_top() || r.v.is_top()) {
            return {Value::top(), box};
        }
        const V& a = l.v.value();
        const V& b = r.v.value();
        switch (e.kind) {
        case ExprKind::Add:
            return {guarded([&] { return Value(alg_.add(a, b)); }), box};
        case ExprKind::Sub:
            return {guarded([&] { return Value(alg_.sub(a, b)); }), box};
        case ExprKind::Mul:
            return {guarded([&] { return Value(alg_.mul(a, b)); }), box};
        case ExprKind::Div:
            return {div_value(e, a, b, r.box), box};
        default:
            throw std::logic_error("unexpected expression kind");
        }
    }

    // Operand range for a nonlinear operator: the value's own range met with
    // the interval evaluation. Empty means no execution gets here.
    std::optional<Interval> operand_range(const V& a, const ExtInterval& box) const {
        const auto m = qz::meet(ExtInterval(alg_.range(a)), box);
        if (!m) {
            return std::nullopt;
        }
        return m->bounded();
    }

    Value div_value(const lang::Expr& e, const V& a, const V& b, const ExtInterval& box) {
        const auto r = operand_range(b, box);
        if (!r) {
            return Value::bottom();
        }
        if (r->contains_zero()) {
            warn("division at " + where(e) + ": divisor range " + to_string_interval(*r) +
                 " contains zero; result is Top");
            return Value::top();
        }
        return guarded([&] { return Value(alg_.mul(a, alg_.recip(b, *r))); });
    }

    Value sqrt_value(const lang::Expr& e, const V& a, const ExtInterval& box) {
        const auto rr = operand_range(a, box);
        if (!rr) {
            return Value::bottom();
        }
        Interval r = *rr;
        if (r.hi() < 0.0) {
            warn("sqrt at " + where(e) + ": argument range " + to_string_interval(r) +
                 " is negative; the path is unreachable");
            return Value::bottom();
        }
        if (r.lo() < 0.0) {
            warn("sqrt at " + where(e) + ": argument range " + to_string_interval(r) +
                 " has a negative part; only the nonnegative part is kept");
            // meet with [0, inf) before linearizing
            r = Interval(0.0, r.hi());
            return guarded([&] { return Value(alg_.sqrt(alg_.restrict(a, r), r)); });
        }
        return guarded([&] { return Value(alg_.sqrt(a, r)); });
    }

    static std::string to_string_interval(const Interval& i) {
        char buf[64];
        std::string out = "[";
        out.append(buf, std::to_chars(buf, buf + sizeof buf, i.lo()).ptr);
        out += ", ";
        out.append(buf, std::to_chars(buf, buf + sizeof buf, i.hi()).ptr);
        return out + "]";
    }

    // Relative width loss above which a variable is re-abstracted.
    static bool shrinks(const Interval& before, const Interval& after) {
        return before.width() - after.width() > 1e-12 * before.width();
    }

    // One top-down projection pass. Returns false on an empty refinement.
    static bool backward(const lang::Expr& e, const ExtInterval& target, const Trace& t,
                         std::vector<std::pair<std::string, ExtInterval>>& refined) {
        using lang::ExprKind;
        const auto m = qz::meet(t.at(&e), target);
        if (!m) {
            return false;
        }
        const ExtInterval n = *m;
        switch (e.kind) {
        case ExprKind::Const:
        case ExprKind::IntervalLit:
            return true;
        case ExprKind::Var: {
            for (auto& [name, iv] : refined) {
                if (name == e.name) {
                    const auto both = qz::meet(iv, n);
                    if (!both) {
                        return false;
                    }
                    iv = *both;
                    return true;
                }
            }
            refined.emplace_back(e.name, n);
            return true;
        }
        case ExprKind::Neg:
            return backward(*e.lhs, -n, t, refined);
        case ExprKind::Sqrt: {
            const auto pre = sqrt_preimage(n);
            return pre && backward(*e.lhs, *pre, t, refined);
        }
        default:
            break;
        }
        const ExtInterval l = t.at(e.lhs.get());
        const ExtInterval r = t.at(e.rhs.get());
        switch (e.kind) {
        case ExprKind::Add:
            return backward(*e.lhs, n - r, t, refined) && backward(*e.rhs, n - l, t, refined);
        case ExprKind::Sub:
            return backward(*e.lhs, n + r, t, refined) && backward(*e.rhs, l - n, t, refined);
        case ExprKind::Mul:
            return backward(*e.lhs, n / r, t, refined) && backward(*e.rhs, n / l, t, refined);
        case ExprKind::Div:
            return backward(*e.lhs, n * r, t, refined) && backward(*e.rhs, l / n, t, refined);
        default:
            return true;
        }
    }

    A alg_;
    DomainOptions options_;
    std::vector<std::string> warnings_;
};

} // namespace qz
