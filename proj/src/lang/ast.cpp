// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "qz/ast.hpp"

namespace qz::lang {

ExprPtr Expr::constant(DecimalValue v, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Const;
    e->value = v;
    e->pos = pos;
    return e;
}

ExprPtr Expr::constant(double v) { return constant(DecimalValue{v, true}); }

ExprPtr Expr::interval(DecimalValue lo, DecimalValue hi, SourcePos pos) {
    if (!(lo.value <= hi.value)) {
        throw std::invalid_argument("interval literal with lower bound above upper bound");
    }
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::IntervalLit;
    e->lo = lo;
    e->hi = hi;
    e->pos = pos;
    return e;
}

ExprPtr Expr::interval(double lo, double hi) { return interval(DecimalValue{lo, true}, DecimalValue{hi, true}); }

ExprPtr Expr::var(std::string name, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Var;
    e->name = std::move(name);
    e->pos = pos;
    return e;
}

ExprPtr Expr::binary(ExprKind kind, ExprPtr l, ExprPtr r, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    if (!e->is_binary()) {
        throw std::invalid_argument("not a binary operator");
    }
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    e->pos = pos;
    return e;
}

ExprPtr Expr::unary(ExprKind kind, ExprPtr operand, SourcePos pos) {
    if (kind != ExprKind::Neg && kind != ExprKind::Sqrt) {
        throw std::invalid_argument("not a unary operator");
    }
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->lhs = std::move(operand);
    e->pos = pos;
    return e;
}

RelExpr negate(const RelExpr& r) {
    RelExpr n = r;
    switch (r.op) {
    case RelOp::Ge:
    case RelOp::Gt:
        n.op = RelOp::Le;
        break;
    case RelOp::Le:
    case RelOp::Lt:
        n.op = RelOp::Ge;
        break;
    case RelOp::Eq:
        n.op = RelOp::Ne;
        break;
    case RelOp::Ne:
        n.op = RelOp::Eq;
        break;
    }
    return n;
}

StmtPtr Stmt::assign(std::string target, ExprPtr e, SourcePos pos) {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Assign;
    s->target = std::move(target);
    s->expr = std::move(e);
    s->pos = pos;
    return s;
}

StmtPtr Stmt::assume(RelExpr c, SourcePos pos) {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Assume;
    s->cond = std::move(c);
    s->pos = pos;
    return s;
}

StmtPtr Stmt::if_else(RelExpr c, Block then_block, Block else_block, SourcePos pos) {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::If;
    s->cond = std::move(c);
    s->then_block = std::move(then_block);
    s->else_block = std::move(else_block);
    s->pos = pos;
    return s;
}

StmtPtr Stmt::while_loop(RelExpr c, Block body, SourcePos pos) {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::While;
    s->cond = std::move(c);
    s->then_block = std::move(body);
    s->pos = pos;
    return s;
}

std::string to_string(RelOp op) {
    switch (op) {
    case RelOp::Ge:
        return ">=";
    case RelOp::Le:
        return "<=";
    case RelOp::Gt:
        return ">";
    case RelOp::Lt:
        return "<";
    case RelOp::Eq:
        return "==";
    case RelOp::Ne:
        return "!=";
    }
    return "?";
}

namespace {

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    // keep it a decimal literal of the language
    if (s.find_first_of(".en") == std::string::npos) {
        s += ".0";
    }
    return s;
}

int precedence(ExprKind k) {
    switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub:
        return 1;
    case ExprKind::Mul:
    case ExprKind::Div:
        return 2;
    default:
        return 3;
    }
}

void emit(const Expr& e, std::string& out) {
    switch (e.kind) {
    case ExprKind::Const:
        if (!e.text.empty()) {
            out += e.text;
        } else if (e.value.value < 0.0) {
            out += "(-" + number(-e.value.value) + ")";
        } else {
            out += number(e.value.value);
        }
        return;
    case ExprKind::IntervalLit:
        out += "[" + number(e.lo.value) + ", " + number(e.hi.value) + "]";
        return;
    case ExprKind::Var:
        out += e.name;
        return;
    case ExprKind::Neg:
        out += "-";
        if (precedence(e.lhs->kind) < 3) {
            out += "(";
            emit(*e.lhs, out);
            out += ")";
        } else {
            emit(*e.lhs, out);
        }
        return;
    case ExprKind::Sqrt:
        out += "sqrt(";
        emit(*e.lhs, out);
        out += ")";
        return;
    default:
        break;
    }
    const int p = precedence(e.kind);
    const bool lparen = precedence(e.lhs->kind) < p;
    // left associative: a right operand of equal precedence needs brackets
    const bool rparen = precedence(e.rhs->kind) <= p;
    if (lparen) {
        out += "(";
    }
    emit(*e.lhs, out);
    if (lparen) {
        out += ")";
    }
    static const char* ops[] = {"", "", "", " + ", " - ", " * ", " / "};
    out += ops[static_cast<int>(e.kind)];
    if (rparen) {
        out += "(";
    }
    emit(*e.rhs, out);
    if (rparen) {
        out += ")";
    }
}

void emit(const Block& b, int indent, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    for (const StmtPtr& s : b) {
        switch (s->kind) {
        case StmtKind::Assign:
            out += pad + s->target + " = " + to_source(*s->expr) + ";\n";
            break;
        case StmtKind::Assume:
            out += pad + "assume(" + to_source(s->cond) + ");\n";
            break;
        case StmtKind::If:
            out += pad + "if (" + to_source(s->cond) + ") {\n";
            emit(s->then_block, indent + 1, out);
            if (s->else_block.empty()) {
                out += pad + "}\n";
            } else {
                out += pad + "} else {\n";
                emit(s->else_block, indent + 1, out);
                out += pad + "}\n";
            }
            break;
        case StmtKind::While:
            out += pad + "while (" + to_source(s->cond) + ") {\n";
            emit(s->then_block, indent + 1, out);
            out += pad + "}\n";
            break;
        }
    }
}

void collect(const Expr& e, std::vector<std::string>& out) {
    if (e.kind == ExprKind::Var) {
        if (std::find(out.begin(), out.end(), e.name) == out.end()) {
            out.push_back(e.name);
        }
        return;
    }
    if (e.lhs) {
        collect(*e.lhs, out);
    }
    if (e.rhs) {
        collect(*e.rhs, out);
    }
}

} // namespace

std::string to_source(const Expr& e) {
    std::string out;
    emit(e, out);
    return out;
}

std::string to_source(const RelExpr& r) { return to_source(*r.lhs) + " " + to_string(r.op) + " " + to_source(*r.rhs); }

std::string to_source(const Program& p) {
    std::string out;
    emit(p.body, 0, out);
    return out;
}

std::vector<std::string> free_vars(const Expr& e) {
    std::vector<std::string> out;
    collect(e, out);
    return out;
}

} // namespace qz::lang
