#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plccov/source_loc.hpp"

namespace plccov {

enum class Tok {
    Ident,
    IntLit,
    RealLit,
    TimeLit,
    StringLit,
    Keyword, // text holds the canonical upper-case keyword
    Assign,  // :=
    OutArrow, // =>
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    DotDot,
    LBracket,
    RBracket,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;   // identifier / keyword / string contents
    int64_t ival = 0;   // IntLit / TimeLit (ms)
    double rval = 0.0;  // RealLit
    SourceLoc loc;
};

// Tokenizes one source file. Keywords are case-insensitive, identifiers keep
// their case. Comments: // to end of line and (* ... *).
std::vector<Token> lex(const std::string& file, const std::string& text);

bool is_keyword(const std::string& upper);

} // namespace plccov
