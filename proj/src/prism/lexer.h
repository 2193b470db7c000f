#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mlbisim::prism::detail {

enum class Tok {
    end,
    identifier,
    integer,
    decimal,
    string,
    keyword,
    // punctuation
    semicolon, colon, comma, lbracket, rbracket, lparen, rparen, dotdot, arrow,
    plus, minus, star, slash, equal, not_equal, less, less_equal, greater, greater_equal,
    amp, bar, bang, implies, prime, question, lbrace, rbrace,
};

struct Token {
    Tok kind = Tok::end;
    std::string text;
    int line = 0;
    int column = 0;
};

/// Splits source text into tokens, dropping // and /* */ comments.
/// Throws ParseError on characters outside the grammar.
std::vector<Token> tokenize(std::string_view text);

bool is_keyword(std::string_view word);

}  // namespace mlbisim::prism::detail
