// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qz/rounding.hpp"

namespace qz::lang {

struct SourcePos {
    int line = 1;
    int col = 1;
};

enum class ExprKind { Const, IntervalLit, Var, Add, Sub, Mul, Div, Neg, Sqrt };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind = ExprKind::Const;
    DecimalValue value{0.0, true}; // Const
    DecimalValue lo{0.0, true};    // IntervalLit
    DecimalValue hi{0.0, true};
    std::string text; // source spelling of a Const, when parsed
    std::string name;    // Var
    ExprPtr lhs;         // operand of unary nodes
    ExprPtr rhs;
    SourcePos pos;

    static ExprPtr constant(DecimalValue v, SourcePos pos = {});
    static ExprPtr constant(double v); // exact binary64 constant
    static ExprPtr interval(DecimalValue lo, DecimalValue hi, SourcePos pos = {});
    static ExprPtr interval(double lo, double hi);
    static ExprPtr var(std::string name, SourcePos pos = {});
    static ExprPtr binary(ExprKind kind, ExprPtr l, ExprPtr r, SourcePos pos = {});
    static ExprPtr unary(ExprKind kind, ExprPtr e, SourcePos pos = {});

    [[nodiscard]] bool is_binary() const noexcept {
        return kind == ExprKind::Add || kind == ExprKind::Sub || kind == ExprKind::Mul || kind == ExprKind::Div;
    }
};

enum class RelOp { Ge, Le, Gt, Lt, Eq, Ne };

struct RelExpr {
    ExprPtr lhs;
    RelOp op = RelOp::Ge;
    ExprPtr rhs;
};

/// Over-approximating negation: strict and non-strict forms coincide.
RelExpr negate(const RelExpr& r);

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using Block = std::vector<StmtPtr>;

enum class StmtKind { Assign, Assume, If, While };

struct Stmt {
    StmtKind kind = StmtKind::Assign;
    std::string target;
    ExprPtr expr;
    RelExpr cond;
    Block then_block;
    Block else_block;
    SourcePos pos;

    static StmtPtr assign(std::string target, ExprPtr e, SourcePos pos = {});
    static StmtPtr assume(RelExpr c, SourcePos pos = {});
    static StmtPtr if_else(RelExpr c, Block then_block, Block else_block, SourcePos pos = {});
    static StmtPtr while_loop(RelExpr c, Block body, SourcePos pos = {});
};

struct Program {
    Block body;
};

std::string to_string(RelOp op);
/// Source text that parses back to the same tree.
std::string to_source(const Expr& e);
std::string to_source(const RelExpr& r);
std::string to_source(const Program& p);

/// Variables in first-read order.
std::vector<std::string> free_vars(const Expr& e);

} // namespace qz::lang
