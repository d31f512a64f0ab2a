// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "qz/parser.hpp"

namespace qz::lang {

std::string to_string(TokenKind k) {
    switch (k) {
    case TokenKind::Ident:
        return "identifier";
    case TokenKind::Number:
        return "number";
    case TokenKind::If:
        return "'if'";
    case TokenKind::Else:
        return "'else'";
    case TokenKind::While:
        return "'while'";
    case TokenKind::Assume:
        return "'assume'";
    case TokenKind::Sqrt:
        return "'sqrt'";
    case TokenKind::Plus:
        return "'+'";
    case TokenKind::Minus:
        return "'-'";
    case TokenKind::Star:
        return "'*'";
    case TokenKind::Slash:
        return "'/'";
    case TokenKind::Assign:
        return "'='";
    case TokenKind::Ge:
        return "'>='";
    case TokenKind::Le:
        return "'<='";
    case TokenKind::Gt:
        return "'>'";
    case TokenKind::Lt:
        return "'<'";
    case TokenKind::EqEq:
        return "'=='";
    case TokenKind::NotEq:
        return "'!='";
    case TokenKind::LParen:
        return "'('";
    case TokenKind::RParen:
        return "')'";
    case TokenKind::LBracket:
        return "'['";
    case TokenKind::RBracket:
        return "']'";
    case TokenKind::LBrace:
        return "'{'";
    case TokenKind::RBrace:
        return "'}'";
    case TokenKind::Comma:
        return "','";
    case TokenKind::Semicolon:
        return "';'";
    case TokenKind::End:
        return "end of input";
    }
    return "?";
}

namespace {

class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_blank();
            const SourcePos pos{line_, col_};
            if (at_end()) {
                out.push_back({TokenKind::End, "", pos});
                return out;
            }
            const char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                out.push_back(word(pos));
            } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && is_digit(peek(1)))) {
                out.push_back(number(pos));
            } else {
                out.push_back(punct(pos));
            }
        }
    }

  private:
    [[nodiscard]] bool at_end() const { return i_ >= text_.size(); }
    [[nodiscard]] char peek(std::size_t ahead = 0) const {
        return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0';
    }
    static bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

    char advance() {
        const char c = text_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_blank() {
        while (!at_end()) {
            if (std::isspace(static_cast<unsigned char>(peek()))) {
                advance();
            } else if (peek() == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') {
                    advance();
                }
            } else {
                return;
            }
        }
    }

    Token word(SourcePos pos) {
        std::string w;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
            w += advance();
        }
        TokenKind k = TokenKind::Ident;
        if (w == "if") {
            k = TokenKind::If;
        } else if (w == "else") {
            k = TokenKind::Else;
        } else if (w == "while") {
            k = TokenKind::While;
        } else if (w == "assume") {
            k = TokenKind::Assume;
        } else if (w == "sqrt") {
            k = TokenKind::Sqrt;
        }
        return {k, std::move(w), pos};
    }

    Token number(SourcePos pos) {
        std::string s;
        while (is_digit(peek())) {
            s += advance();
        }
        if (peek() == '.') {
            s += advance();
            while (is_digit(peek())) {
                s += advance();
            }
        }
        if (peek() == 'e' || peek() == 'E') {
            const std::size_t sign = (peek(1) == '+' || peek(1) == '-') ? 1 : 0;
            if (!is_digit(peek(1 + sign))) {
                throw SyntaxError("malformed exponent in number '" + s + "'", {line_, col_});
            }
            s += advance();
            if (sign != 0) {
                s += advance();
            }
            while (is_digit(peek())) {
                s += advance();
            }
        }
        if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_') {
            throw SyntaxError("unexpected character '" + std::string(1, peek()) + "' after number", {line_, col_});
        }
        return {TokenKind::Number, std::move(s), pos};
    }

    Token punct(SourcePos pos) {
        const char c = peek();
        const char n = peek(1);
        auto two = [&](TokenKind k) {
            std::string t{advance()};
            t += advance();
            return Token{k, t, pos};
        };
        auto one = [&](TokenKind k) { return Token{k, std::string(1, advance()), pos}; };
        switch (c) {
        case '+':
            return one(TokenKind::Plus);
        case '-':
            return one(TokenKind::Minus);
        case '*':
            return one(TokenKind::Star);
        case '/':
            return one(TokenKind::Slash);
        case '(':
            return one(TokenKind::LParen);
        case ')':
            return one(TokenKind::RParen);
        case '[':
            return one(TokenKind::LBracket);
        case ']':
            return one(TokenKind::RBracket);
        case '{':
            return one(TokenKind::LBrace);
        case '}':
            return one(TokenKind::RBrace);
        case ',':
            return one(TokenKind::Comma);
        case ';':
            return one(TokenKind::Semicolon);
        case '=':
            return n == '=' ? two(TokenKind::EqEq) : one(TokenKind::Assign);
        case '>':
            return n == '=' ? two(TokenKind::Ge) : one(TokenKind::Gt);
        case '<':
            return n == '=' ? two(TokenKind::Le) : one(TokenKind::Lt);
        case '!':
            if (n == '=') {
                return two(TokenKind::NotEq);
            }
            break;
        default:
            break;
        }
        std::string shown(1, c);
        if (static_cast<unsigned char>(c) >= 0x80 || !std::isprint(static_cast<unsigned char>(c))) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\x%02x", static_cast<unsigned>(static_cast<unsigned char>(c)));
            shown = buf;
        }
        throw SyntaxError("illegal character '" + shown + "'", pos);
    }

    std::string_view text_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
  public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {
        if (toks_.empty() || toks_.back().kind != TokenKind::End) {
            throw std::invalid_argument("token stream must end with End");
        }
    }

    Program program() {
        Program p;
        while (cur().kind != TokenKind::End) {
            p.body.push_back(statement());
        }
        return p;
    }

  private:
    [[nodiscard]] const Token& cur() const { return toks_[k_]; }
    const Token& take() {
        const Token& t = toks_[k_];
        if (t.kind != TokenKind::End) {
            ++k_;
        }
        return t;
    }
    bool accept(TokenKind kind) {
        if (cur().kind == kind) {
            take();
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(std::initializer_list<TokenKind> expected) const {
        std::string msg = "expected ";
        std::size_t i = 0;
        for (TokenKind k : expected) {
            if (i > 0) {
                msg += i + 1 == expected.size() ? " or " : ", ";
            }
            msg += to_string(k);
            ++i;
        }
        msg += " but found " + (cur().kind == TokenKind::End ? to_string(TokenKind::End) : "'" + cur().text + "'");
        throw SyntaxError(msg, cur().pos);
    }

    const Token& expect(TokenKind kind) {
        if (cur().kind != kind) {
            fail({kind});
        }
        return take();
    }

    StmtPtr statement() {
        const SourcePos pos = cur().pos;
        switch (cur().kind) {
        case TokenKind::Ident: {
            std::string name = take().text;
            expect(TokenKind::Assign);
            ExprPtr e = expr();
            expect(TokenKind::Semicolon);
            return Stmt::assign(std::move(name), std::move(e), pos);
        }
        case TokenKind::Assume: {
            take();
            expect(TokenKind::LParen);
            RelExpr r = rel();
            expect(TokenKind::RParen);
            expect(TokenKind::Semicolon);
            return Stmt::assume(std::move(r), pos);
        }
        case TokenKind::If: {
            take();
            expect(TokenKind::LParen);
            RelExpr r = rel();
            expect(TokenKind::RParen);
            Block then_block = block();
            Block else_block;
            if (accept(TokenKind::Else)) {
                else_block = block();
            }
            return Stmt::if_else(std::move(r), std::move(then_block), std::move(else_block), pos);
        }
        case TokenKind::While: {
            take();
            expect(TokenKind::LParen);
            RelExpr r = rel();
            expect(TokenKind::RParen);
            return Stmt::while_loop(std::move(r), block(), pos);
        }
        default:
            fail({TokenKind::Ident, TokenKind::Assume, TokenKind::If, TokenKind::While});
        }
    }

    Block block() {
        expect(TokenKind::LBrace);
        Block b;
        while (cur().kind != TokenKind::RBrace) {
            if (cur().kind == TokenKind::End) {
                fail({TokenKind::RBrace});
            }
            b.push_back(statement());
        }
        take();
        return b;
    }

    RelExpr rel() {
        RelExpr r;
        r.lhs = expr();
        switch (cur().kind) {
        case TokenKind::Ge:
            r.op = RelOp::Ge;
            break;
        case TokenKind::Le:
            r.op = RelOp::Le;
            break;
        case TokenKind::Gt:
            r.op = RelOp::Gt;
            break;
        case TokenKind::Lt:
            r.op = RelOp::Lt;
            break;
        case TokenKind::EqEq:
            r.op = RelOp::Eq;
            break;
        case TokenKind::NotEq:
            r.op = RelOp::Ne;
            break;
        default:
            fail({TokenKind::Ge, TokenKind::Le, TokenKind::Gt, TokenKind::Lt, TokenKind::EqEq, TokenKind::NotEq});
        }
        take();
        r.rhs = expr();
        return r;
    }

    ExprPtr expr() {
        ExprPtr e = term();
        while (cur().kind == TokenKind::Plus || cur().kind == TokenKind::Minus) {
            const Token& op = take();
            e = Expr::binary(op.kind == TokenKind::Plus ? ExprKind::Add : ExprKind::Sub, e, term(), op.pos);
        }
        return e;
    }

    ExprPtr term() {
        ExprPtr e = factor();
        while (cur().kind == TokenKind::Star || cur().kind == TokenKind::Slash) {
            const Token& op = take();
            e = Expr::binary(op.kind == TokenKind::Star ? ExprKind::Mul : ExprKind::Div, e, factor(), op.pos);
        }
        return e;
    }

    DecimalValue number(const Token& t, bool negative) {
        DecimalValue d{};
        try {
            d = parse_decimal(t.text);
        } catch (const std::logic_error&) {
            throw SyntaxError("number '" + t.text + "' is out of range", t.pos);
        }
        if (!std::isfinite(d.value)) {
            throw SyntaxError("number '" + t.text + "' is out of range", t.pos);
        }
        if (negative) {
            d.value = -d.value;
        }
        return d;
    }

    // Bound of an interval literal: an optionally signed number.
    DecimalValue bound() {
        const bool negative = accept(TokenKind::Minus);
        if (cur().kind != TokenKind::Number) {
            fail({TokenKind::Number});
        }
        return number(take(), negative);
    }

    ExprPtr factor() {
        const Token& t = cur();
        switch (t.kind) {
        case TokenKind::Number: {
            take();
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Const;
            e->value = number(t, false);
            e->text = t.text;
            e->pos = t.pos;
            return e;
        }
        case TokenKind::Ident:
            take();
            return Expr::var(t.text, t.pos);
        case TokenKind::LBracket: {
            take();
            const DecimalValue lo = bound();
            expect(TokenKind::Comma);
            const DecimalValue hi = bound();
            expect(TokenKind::RBracket);
            if (!(lo.value <= hi.value)) {
                throw SyntaxError("interval literal has its lower bound above its upper bound", t.pos);
            }
            return Expr::interval(lo, hi, t.pos);
        }
        case TokenKind::LParen: {
            take();
            ExprPtr e = expr();
            expect(TokenKind::RParen);
            return e;
        }
        case TokenKind::Minus:
            take();
            return Expr::unary(ExprKind::Neg, factor(), t.pos);
        case TokenKind::Sqrt: {
            take();
            expect(TokenKind::LParen);
            ExprPtr e = expr();
            expect(TokenKind::RParen);
            return Expr::unary(ExprKind::Sqrt, std::move(e), t.pos);
        }
        default:
            fail({TokenKind::Number, TokenKind::Ident, TokenKind::LBracket, TokenKind::LParen, TokenKind::Minus,
                  TokenKind::Sqrt});
        }
    }

    const std::vector<Token>& toks_;
    std::size_t k_ = 0;
};

using VarSet = std::set<std::string, std::less<>>;

void check_reads(const Expr& e, const VarSet& defined) {
    if (e.kind == ExprKind::Var) {
        if (!defined.contains(e.name)) {
            throw SyntaxError("variable '" + e.name + "' may be read before it is assigned", e.pos);
        }
        return;
    }
    if (e.lhs) {
        check_reads(*e.lhs, defined);
    }
    if (e.rhs) {
        check_reads(*e.rhs, defined);
    }
}

void check_reads(const RelExpr& r, const VarSet& defined) {
    check_reads(*r.lhs, defined);
    check_reads(*r.rhs, defined);
}

// Returns the variables assigned on every path through b.
VarSet check_block(const Block& b, VarSet defined) {
    for (const StmtPtr& s : b) {
        switch (s->kind) {
        case StmtKind::Assign:
            check_reads(*s->expr, defined);
            defined.insert(s->target);
            break;
        case StmtKind::Assume:
            check_reads(s->cond, defined);
            break;
        case StmtKind::If: {
            check_reads(s->cond, defined);
            const VarSet t = check_block(s->then_block, defined);
            const VarSet e = check_block(s->else_block, defined);
            VarSet both;
            std::set_intersection(t.begin(), t.end(), e.begin(), e.end(), std::inserter(both, both.end()));
            defined = std::move(both);
            break;
        }
        case StmtKind::While:
            check_reads(s->cond, defined);
            (void)check_block(s->then_block, defined);
            break;
        }
    }
    return defined;
}

} // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

Program parse(const std::vector<Token>& tokens) { return Parser(tokens).program(); }

Program parse_program(std::string_view text) { return parse(tokenize(text)); }

void check_definite_assignment(const Program& p) { (void)check_block(p.body, {}); }

} // namespace qz::lang
