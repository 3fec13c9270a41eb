#include "lexer.hpp"

#include <cctype>

namespace sct::detail {

namespace {
bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
} // namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    SourcePos pos;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            ++pos.offset;
            if (text[i] == '\n') {
                ++pos.line;
                pos.column = 1;
            } else {
                ++pos.column;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') { // comment to end of line
            while (i < text.size() && text[i] != '\n')
                advance(1);
            continue;
        }
        SourcePos start = pos;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j]))
                ++j;
            out.push_back({Token::Kind::Ident, std::string(text.substr(i, j - i)), start});
            advance(j - i);
            continue;
        }
        if (c == '0') {
            if (i + 1 < text.size() && ident_char(text[i + 1]))
                throw Error(ErrorKind::SyntaxError, "unexpected character after '0'", start);
            out.push_back({Token::Kind::Zero, "0", start});
            advance(1);
            continue;
        }
        if ((c == '>' || c == '<') && i + 1 < text.size() && text[i + 1] == c) {
            out.push_back({Token::Kind::Punct, std::string(2, c), start});
            advance(2);
            continue;
        }
        static constexpr std::string_view single = "?!&+{}:,.()|*@";
        if (single.find(c) != std::string_view::npos) {
            out.push_back({Token::Kind::Punct, std::string(1, c), start});
            advance(1);
            continue;
        }
        throw Error(ErrorKind::SyntaxError, std::string("unexpected character '") + c + "'", start);
    }
    out.push_back({Token::Kind::Eof, "", pos});
    return out;
}

std::string describe(const Token& t) {
    if (t.kind == Token::Kind::Eof)
        return "end of input";
    return "'" + t.text + "'";
}

bool is_keyword(std::string_view s) { return s == "end" || s == "rec" || s == "un" || s == "lin" || s == "new"; }

void TokenStream::expect(std::string_view p) {
    if (!accept(p))
        fail("expected '" + std::string(p) + "' but found " + describe(peek()));
}

std::string TokenStream::expect_ident(std::string_view what) {
    if (peek().kind != Token::Kind::Ident || is_keyword(peek().text))
        fail("expected " + std::string(what) + " but found " + describe(peek()));
    return next().text;
}

void TokenStream::fail(const std::string& msg) const { fail_at(peek(), ErrorKind::SyntaxError, msg); }

void TokenStream::fail_at(const Token& t, ErrorKind kind, const std::string& msg) const {
    throw Error(kind, msg, t.pos);
}

} // namespace sct::detail
