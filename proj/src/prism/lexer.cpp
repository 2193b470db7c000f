#include "lexer.h"

#include <array>
#include <cctype>

#include "mlbisim/core/errors.h"

namespace mlbisim::prism::detail {

namespace {

// Words reserved by the full modelling language. Only some are accepted by
// the parser; the rest produce an "unsupported construct" error there.
constexpr std::array<std::string_view, 36> kKeywords = {
    "mdp",      "nondeterministic", "dtmc",    "probabilistic", "ctmc",     "stochastic", "pta",     "ma",
    "const",    "int",              "bool",    "double",        "global",   "module",     "endmodule", "init",
    "endinit",  "label",            "true",    "false",         "formula",  "rewards",    "endrewards", "system",
    "endsystem", "clock",           "invariant", "endinvariant", "min",     "max",        "floor",   "ceil",
    "pow",      "mod",              "log",     "filter",
};

}  // namespace

bool is_keyword(std::string_view word) {
    for (auto k : kKeywords) {
        if (k == word) return true;
    }
    return false;
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    int line = 1;
    int column = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n = 1) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
    };
    auto peek = [&](std::size_t offset = 0) -> char { return i + offset < text.size() ? text[i + offset] : '\0'; };

    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance();
            continue;
        }
        if (c == '/' && peek(1) == '/') {
            while (i < text.size() && text[i] != '\n') advance();
            continue;
        }
        if (c == '/' && peek(1) == '*') {
            int start_line = line, start_col = column;
            advance(2);
            while (i < text.size() && !(text[i] == '*' && peek(1) == '/')) advance();
            if (i >= text.size()) throw ParseError("unterminated comment", start_line, start_col);
            advance(2);
            continue;
        }

        Token tok;
        tok.line = line;
        tok.column = column;

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) advance();
            tok.text = std::string(text.substr(start, i - start));
            tok.kind = is_keyword(tok.text) ? Tok::keyword : Tok::identifier;
            out.push_back(std::move(tok));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            std::size_t start = i;
            bool decimal = false;
            while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
            // "0..3" is a range, not a decimal point.
            if (peek() == '.' && peek(1) != '.') {
                decimal = true;
                advance();
                while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
            }
            if (peek() == 'e' || peek() == 'E') {
                std::size_t save = i;
                int save_line = line, save_col = column;
                advance();
                if (peek() == '+' || peek() == '-') advance();
                if (std::isdigit(static_cast<unsigned char>(peek()))) {
                    decimal = true;
                    while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
                } else {
                    i = save;
                    line = save_line;
                    column = save_col;
                }
            }
            tok.kind = decimal ? Tok::decimal : Tok::integer;
            tok.text = std::string(text.substr(start, i - start));
            out.push_back(std::move(tok));
            continue;
        }
        if (c == '"') {
            advance();
            std::size_t start = i;
            while (i < text.size() && text[i] != '"' && text[i] != '\n') advance();
            if (peek() != '"') throw ParseError("unterminated string literal", tok.line, tok.column);
            tok.kind = Tok::string;
            tok.text = std::string(text.substr(start, i - start));
            advance();
            out.push_back(std::move(tok));
            continue;
        }

        auto two = [&](char a, char b) { return c == a && peek(1) == b; };
        std::size_t len = 1;
        if (two('.', '.')) { tok.kind = Tok::dotdot; len = 2; }
        else if (two('-', '>')) { tok.kind = Tok::arrow; len = 2; }
        else if (two('!', '=')) { tok.kind = Tok::not_equal; len = 2; }
        else if (two('<', '=')) { tok.kind = Tok::less_equal; len = 2; }
        else if (two('>', '=')) { tok.kind = Tok::greater_equal; len = 2; }
        else if (two('=', '>')) { tok.kind = Tok::implies; len = 2; }
        else {
            switch (c) {
                case ';': tok.kind = Tok::semicolon; break;
                case ':': tok.kind = Tok::colon; break;
                case ',': tok.kind = Tok::comma; break;
                case '[': tok.kind = Tok::lbracket; break;
                case ']': tok.kind = Tok::rbracket; break;
                case '(': tok.kind = Tok::lparen; break;
                case ')': tok.kind = Tok::rparen; break;
                case '+': tok.kind = Tok::plus; break;
                case '-': tok.kind = Tok::minus; break;
                case '*': tok.kind = Tok::star; break;
                case '/': tok.kind = Tok::slash; break;
                case '=': tok.kind = Tok::equal; break;
                case '<': tok.kind = Tok::less; break;
                case '>': tok.kind = Tok::greater; break;
                case '&': tok.kind = Tok::amp; break;
                case '|': tok.kind = Tok::bar; break;
                case '!': tok.kind = Tok::bang; break;
                case '\'': tok.kind = Tok::prime; break;
                case '?': tok.kind = Tok::question; break;
                case '{': tok.kind = Tok::lbrace; break;
                case '}': tok.kind = Tok::rbrace; break;
                default:
                    throw ParseError(std::string("unexpected character '") + c + "'", line, column);
            }
        }
        tok.text = std::string(text.substr(i, len));
        advance(len);
        out.push_back(std::move(tok));
    }
    Token end;
    end.kind = Tok::end;
    end.line = line;
    end.column = column;
    out.push_back(end);
    return out;
}

}  // namespace mlbisim::prism::detail
