// Copyright (c) qz contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qz/ast.hpp"

namespace qz::lang {

/// Lexical, syntax or static-check error at a source position.
class SyntaxError : public std::runtime_error {
  public:
    SyntaxError(const std::string& message, SourcePos pos)
        : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + message), pos_(pos),
          message_(message) {}

    [[nodiscard]] SourcePos pos() const noexcept { return pos_; }
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

  private:
    SourcePos pos_;
    std::string message_;
};

enum class TokenKind {
    Ident,
    Number,
    If,
    Else,
    While,
    Assume,
    Sqrt,
    Plus,
    Minus,
    Star,
    Slash,
    Assign,
    Ge,
    Le,
    Gt,
    Lt,
    EqEq,
    NotEq,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semicolon,
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    SourcePos pos;
};

std::string to_string(TokenKind k);

/// Splits source text into tokens; `//` starts a comment running to the end
/// of the line. The last token is End.
std::vector<Token> tokenize(std::string_view text);

Program parse(const std::vector<Token>& tokens);
Program parse_program(std::string_view text);

/// Rejects reads of variables that are not assigned on every path leading
/// to them.
void check_definite_assignment(const Program& p);

} // namespace qz::lang
