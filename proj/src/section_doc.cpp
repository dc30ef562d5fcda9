#include "section_doc.hpp"

#include <cctype>

#include "bdg/model.hpp"

namespace bdg::detail {

namespace {

enum class TokenKind { Bare, Quoted, LBrace, RBrace, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    SourceSpan span;
};

bool is_bare_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '{' && c != '}' && c != '"' &&
           c != '#';
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_blanks();
        Token tok;
        tok.span = span_;
        if (pos_ >= text_.size()) {
            tok.kind = TokenKind::End;
            return tok;
        }
        char c = text_[pos_];
        if (c == '{') {
            advance();
            tok.kind = TokenKind::LBrace;
            return tok;
        }
        if (c == '}') {
            advance();
            tok.kind = TokenKind::RBrace;
            return tok;
        }
        if (c == '"') return lex_quoted(tok);
        return lex_bare(tok);
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++span_.line;
            span_.column = 1;
        } else {
            ++span_.column;
        }
        ++pos_;
    }

    void skip_blanks() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    Token lex_quoted(Token tok) {
        advance(); // opening quote
        std::string out;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '"') {
                advance();
                tok.kind = TokenKind::Quoted;
                tok.text = std::move(out);
                return tok;
            }
            if (c == '\\') {
                SourceSpan at = span_;
                advance();
                if (pos_ >= text_.size()) break;
                char esc = text_[pos_];
                if (esc != '"' && esc != '\\') {
                    throw ParseError("invalid escape sequence \"\\" + std::string(1, esc) + "\"",
                                     at);
                }
                out.push_back(esc);
                advance();
            } else {
                out.push_back(c);
                advance();
            }
        }
        throw ParseError("unterminated string", span_);
    }

    Token lex_bare(Token tok) {
        std::string out;
        while (pos_ < text_.size() && is_bare_char(text_[pos_])) {
            out.push_back(text_[pos_]);
            advance();
        }
        tok.kind = TokenKind::Bare;
        tok.text = std::move(out);
        return tok;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    SourceSpan span_;
};

void parse_items(Lexer& lexer, SectionNode& into, bool at_root) {
    for (;;) {
        Token head = lexer.next();
        if (head.kind == TokenKind::End) {
            if (!at_root) throw ParseError("unterminated section \"" + into.name + "\"", head.span);
            return;
        }
        if (head.kind == TokenKind::RBrace) {
            if (at_root) throw ParseError("unmatched \"}\"", head.span);
            return;
        }
        if (head.kind == TokenKind::LBrace) {
            throw ParseError("section is missing a name", head.span);
        }
        if (head.kind == TokenKind::Quoted) {
            throw ParseError("expected a key, found a quoted string", head.span);
        }
        if (!is_identifier(head.text)) {
            throw ParseError("key \"" + head.text + "\" is not an identifier", head.span);
        }

        Token follow = lexer.next();
        if (follow.kind == TokenKind::LBrace) {
            SectionNode child;
            child.name = head.text;
            child.span = head.span;
            parse_items(lexer, child, false);
            SectionItem item;
            item.section.push_back(std::move(child));
            into.items.push_back(std::move(item));
            continue;
        }
        if (follow.kind == TokenKind::Bare || follow.kind == TokenKind::Quoted) {
            SectionItem item;
            item.pair = KeyValue{head.text, follow.text, follow.kind == TokenKind::Quoted,
                                 head.span};
            into.items.push_back(std::move(item));
            continue;
        }
        throw ParseError("key \"" + head.text + "\" has no value", follow.span);
    }
}

} // namespace

SectionNode parse_document(std::string_view text) {
    Lexer lexer(text);
    SectionNode root;
    parse_items(lexer, root, true);
    return root;
}

bool is_bare_token(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!is_bare_char(c)) return false;
    }
    return true;
}

std::string quoted(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace bdg::detail
