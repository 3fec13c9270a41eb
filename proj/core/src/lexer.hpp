#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sct/error.hpp"

namespace sct::detail {

struct Token {
    enum class Kind { Ident, Zero, Punct, Eof };
    Kind kind;
    std::string text;
    SourcePos pos;
};

/// Tokens shared by the type and process grammars.
std::vector<Token> tokenize(std::string_view text);

class TokenStream {
public:
    explicit TokenStream(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& next() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1)
            ++pos_;
        return t;
    }
    bool at_punct(std::string_view p) const { return peek().kind == Token::Kind::Punct && peek().text == p; }
    bool at_ident(std::string_view w) const { return peek().kind == Token::Kind::Ident && peek().text == w; }
    bool accept(std::string_view p) {
        if (!at_punct(p))
            return false;
        next();
        return true;
    }
    void expect(std::string_view p);
    std::string expect_ident(std::string_view what);
    bool at_end() const { return peek().kind == Token::Kind::Eof; }

    [[noreturn]] void fail(const std::string& msg) const;
    [[noreturn]] void fail_at(const Token& t, ErrorKind kind, const std::string& msg) const;

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

std::string describe(const Token& t);

bool is_keyword(std::string_view s);

} // namespace sct::detail
