#include "synlang/token.hpp"

#include <array>
#include <cctype>
#include <string>

namespace synlang {

namespace {

bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
}

bool is_digit(char c) {
    return c >= '0' && c <= '9';
}

// Returns the byte offset of the first invalid UTF-8 sequence, or npos.
std::size_t find_utf8_error(std::string_view s) {
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        const unsigned char b = static_cast<unsigned char>(s[i]);
        std::size_t need = 0;
        if (b < 0x80) {
            i += 1;
            continue;
        } else if ((b & 0xE0) == 0xC0) {
            if (b < 0xC2) return i;  // overlong
            need = 1;
        } else if ((b & 0xF0) == 0xE0) {
            need = 2;
        } else if ((b & 0xF8) == 0xF0) {
            if (b > 0xF4) return i;
            need = 3;
        } else {
            return i;
        }
        if (i + need >= n) return i;  // truncated sequence
        for (std::size_t k = 1; k <= need; ++k) {
            const unsigned char c = static_cast<unsigned char>(s[i + k]);
            if ((c & 0xC0) != 0x80) return i;
            if (k == 1) {
                if (b == 0xE0 && c < 0xA0) return i;  // overlong
                if (b == 0xED && c > 0x9F) return i;  // surrogate
                if (b == 0xF0 && c < 0x90) return i;  // overlong
                if (b == 0xF4 && c > 0x8F) return i;  // > U+10FFFF
            }
        }
        i += need + 1;
    }
    return std::string_view::npos;
}

struct MarkerRule {
    std::string_view literal;
    TokenKind kind;
};

// Longest match first; every recognized line-start terminal of the grammar.
constexpr std::array<MarkerRule, 20> kMarkers{{
    {"TRACE_FE:", TokenKind::TraceFeKeyword},
    {"PREFER:", TokenKind::PreferKeyword},
    {"TRACE:", TokenKind::TraceKeyword},
    {"FEEL:", TokenKind::FeelKeyword},
    {"ONLY:", TokenKind::OnlyKeyword},
    {"MOD:", TokenKind::ModKeyword},
    {"COT:", TokenKind::CotKeyword},
    {"CTX:", TokenKind::CtxKeyword},
    {"===", TokenKind::ContextFence},
    {">>>", TokenKind::SubfactorMarker},
    {"-!!", TokenKind::HardExcludeMarker},
    {">>", TokenKind::FactorMarker},
    {"-!", TokenKind::SoftExcludeMarker},
    {"//", TokenKind::CommentMarker},
    {"R:", TokenKind::ResponseKeyword},
    {">", TokenKind::QueryMarker},
    {"#", TokenKind::TaskMarker},
    {"@", TokenKind::AgentMarker},
    {"-", TokenKind::Dash},
    {"}", TokenKind::RBrace},
}};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    LexResult run() {
        const std::size_t bad = find_utf8_error(src_);
        if (bad != std::string_view::npos) {
            Diagnostic d;
            d.severity = Severity::Error;
            d.code = "E-ENC-001";
            d.message = "invalid UTF-8 byte sequence at byte offset " + std::to_string(bad);
            d.span = span_at_offset(bad);
            return {{}, {d}};
        }
        while (pos_ < src_.size()) {
            lex_line();
        }
        return {std::move(tokens_), {}};
    }

  private:
    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    std::vector<Token> tokens_;

    Span span_at_offset(std::size_t offset) const {
        int line = 1;
        int col = 1;
        for (std::size_t i = 0; i < offset && i < src_.size(); ++i) {
            if (src_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {{line, col}, {line, col + 1}};
    }

    void emit(TokenKind kind, std::size_t begin, int begin_col) {
        tokens_.push_back(Token{kind, src_.substr(begin, pos_ - begin),
                                Span{{line_, begin_col}, {line_, col_}}, begin});
    }

    void advance(std::size_t n) {
        pos_ += n;
        col_ += static_cast<int>(n);
    }

    char at(std::size_t i) const { return src_[i]; }

    void lex_ws(std::size_t limit) {
        const std::size_t begin = pos_;
        const int begin_col = col_;
        while (pos_ < limit && (at(pos_) == ' ' || at(pos_) == '\t')) advance(1);
        if (pos_ > begin) emit(TokenKind::Whitespace, begin, begin_col);
    }

    bool lex_identifier(std::size_t limit) {
        if (pos_ >= limit || !is_ident_start(at(pos_))) return false;
        const std::size_t begin = pos_;
        const int begin_col = col_;
        while (pos_ < limit && is_ident_char(at(pos_))) advance(1);
        emit(TokenKind::Identifier, begin, begin_col);
        return true;
    }

    // <float> ::= [0-9]* "." [0-9]+
    bool lex_float(std::size_t limit) {
        std::size_t p = pos_;
        while (p < limit && is_digit(at(p))) ++p;
        if (p >= limit || at(p) != '.') return false;
        ++p;
        const std::size_t frac_begin = p;
        while (p < limit && is_digit(at(p))) ++p;
        if (p == frac_begin) return false;
        const std::size_t begin = pos_;
        const int begin_col = col_;
        advance(p - pos_);
        emit(TokenKind::Float, begin, begin_col);
        return true;
    }

    void lex_punct(TokenKind kind, std::size_t n) {
        const std::size_t begin = pos_;
        const int begin_col = col_;
        advance(n);
        emit(kind, begin, begin_col);
    }

    void lex_rest_as_text(std::size_t limit) {
        if (pos_ >= limit) return;
        const std::size_t begin = pos_;
        const int begin_col = col_;
        advance(limit - pos_);
        emit(TokenKind::Text, begin, begin_col);
    }

    bool accept(std::string_view literal, TokenKind kind, std::size_t limit) {
        if (src_.substr(pos_, limit - pos_).substr(0, literal.size()) != literal) return false;
        lex_punct(kind, literal.size());
        return true;
    }

    // Finds a trailing "(confidence=<float>)" clause in [pos_, limit);
    // whitespace may follow the closing paren. Returns the clause's start
    // offset or npos.
    std::size_t find_trailing_clause(std::size_t limit) const {
        const std::string_view tail = src_.substr(pos_, limit - pos_);
        const std::size_t rp = tail.rfind("(confidence=");
        if (rp == std::string_view::npos) return std::string_view::npos;
        std::size_t p = rp + 12;
        while (p < tail.size() && is_digit(tail[p])) ++p;
        if (p >= tail.size() || tail[p] != '.') return std::string_view::npos;
        ++p;
        std::size_t frac = 0;
        while (p < tail.size() && is_digit(tail[p])) {
            ++p;
            ++frac;
        }
        if (frac == 0) return std::string_view::npos;
        if (p >= tail.size() || tail[p] != ')') return std::string_view::npos;
        ++p;
        while (p < tail.size() && (tail[p] == ' ' || tail[p] == '\t')) ++p;
        if (p != tail.size()) return std::string_view::npos;
        return pos_ + rp;
    }

    // Emits [pos_, limit) as Text, splitting out a trailing confidence clause
    // into LParen/ConfidenceKeyword/Equals/Float/RParen when present.
    void lex_text_with_clause(std::size_t limit) {
        const std::size_t clause = find_trailing_clause(limit);
        if (clause == std::string_view::npos) {
            lex_rest_as_text(limit);
            return;
        }
        if (clause > pos_) {
            const std::size_t begin = pos_;
            const int begin_col = col_;
            advance(clause - pos_);
            emit(TokenKind::Text, begin, begin_col);
        }
        lex_punct(TokenKind::LParen, 1);
        lex_punct(TokenKind::ConfidenceKeyword, 10);
        lex_punct(TokenKind::Equals, 1);
        lex_float(limit);
        lex_punct(TokenKind::RParen, 1);
        lex_ws(limit);
    }

    void lex_line() {
        std::size_t nl = src_.find('\n', pos_);
        std::size_t content_end;
        std::size_t line_end;
        if (nl == std::string_view::npos) {
            content_end = src_.size();
            line_end = src_.size();
        } else {
            content_end = (nl > pos_ && src_[nl - 1] == '\r') ? nl - 1 : nl;
            line_end = nl + 1;
        }

        lex_ws(content_end);
        if (pos_ < content_end) {
            lex_markers_and_tail(content_end);
        }
        // Anything a tail lexer left behind becomes raw text.
        lex_rest_as_text(content_end);

        if (line_end > content_end) {
            const std::size_t begin = content_end;
            const int begin_col = col_;
            pos_ = line_end;
            tokens_.push_back(Token{TokenKind::Newline, src_.substr(begin, line_end - begin),
                                    Span{{line_, begin_col}, {line_, begin_col + 1}}, begin});
            ++line_;
            col_ = 1;
        }
    }

    void lex_markers_and_tail(std::size_t limit) {
        const std::string_view rest = src_.substr(pos_, limit - pos_);
        for (const MarkerRule& rule : kMarkers) {
            if (rest.substr(0, rule.literal.size()) == rule.literal) {
                lex_punct(rule.kind, rule.literal.size());
                lex_tail(rule.kind, limit);
                return;
            }
        }
        lex_text_with_clause(limit);
    }

    void lex_tail(TokenKind marker, std::size_t limit) {
        switch (marker) {
            case TokenKind::TaskMarker:
            case TokenKind::AgentMarker:
            case TokenKind::FeelKeyword:
            case TokenKind::ResponseKeyword:
                lex_ws(limit);
                if (lex_identifier(limit)) lex_ws(limit);
                break;
            case TokenKind::ContextFence: {
                const std::string_view tail = src_.substr(pos_, limit - pos_);
                const std::size_t close = tail.rfind("===");
                if (close == std::string_view::npos) break;  // unterminated, rest as text
                if (close > 0) {
                    const std::size_t begin = pos_;
                    const int begin_col = col_;
                    advance(close);
                    emit(TokenKind::Text, begin, begin_col);
                }
                lex_punct(TokenKind::ContextFence, 3);
                lex_ws(limit);
                break;
            }
            case TokenKind::QueryMarker:
            case TokenKind::FactorMarker:
            case TokenKind::SubfactorMarker:
            case TokenKind::ModKeyword:
            case TokenKind::OnlyKeyword:
            case TokenKind::PreferKeyword:
            case TokenKind::SoftExcludeMarker:
            case TokenKind::HardExcludeMarker:
            case TokenKind::CommentMarker:
                lex_ws(limit);
                lex_rest_as_text(limit);
                break;
            case TokenKind::TraceKeyword:
                while (pos_ < limit) {
                    lex_ws(limit);
                    if (pos_ >= limit) break;
                    if (at(pos_) == ',') {
                        lex_punct(TokenKind::Comma, 1);
                    } else if (!lex_identifier(limit)) {
                        break;  // stray characters; leave for rest-as-text
                    }
                }
                break;
            case TokenKind::TraceFeKeyword:
                lex_ws(limit);
                break;
            case TokenKind::Dash:
                lex_ws(limit);
                if (!lex_identifier(limit)) break;
                if (pos_ < limit && at(pos_) == ':') {
                    lex_punct(TokenKind::Colon, 1);
                    lex_ws(limit);
                    lex_text_with_clause(limit);
                }
                break;
            case TokenKind::CotKeyword:
                lex_ws(limit);
                if (!lex_identifier(limit)) break;
                lex_ws(limit);
                if (!accept("->", TokenKind::Arrow, limit)) break;
                lex_ws(limit);
                if (!accept("@", TokenKind::AgentMarker, limit)) break;
                if (!lex_identifier(limit)) break;
                if (pos_ < limit && at(pos_) == ':') {
                    lex_punct(TokenKind::Colon, 1);
                    lex_ws(limit);
                    lex_rest_as_text(limit);
                }
                break;
            case TokenKind::CtxKeyword:
                lex_ws(limit);
                if (!lex_identifier(limit)) break;
                lex_ws(limit);
                if (pos_ < limit && at(pos_) == '{') lex_punct(TokenKind::LBrace, 1);
                lex_ws(limit);
                break;
            case TokenKind::RBrace:
                lex_ws(limit);
                break;
            default:
                break;
        }
    }
};

}  // namespace

std::string_view to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::TaskMarker: return "TaskMarker";
        case TokenKind::AgentMarker: return "AgentMarker";
        case TokenKind::ContextFence: return "ContextFence";
        case TokenKind::QueryMarker: return "QueryMarker";
        case TokenKind::FactorMarker: return "FactorMarker";
        case TokenKind::SubfactorMarker: return "SubfactorMarker";
        case TokenKind::TraceKeyword: return "TraceKeyword";
        case TokenKind::TraceFeKeyword: return "TraceFeKeyword";
        case TokenKind::FeelKeyword: return "FeelKeyword";
        case TokenKind::ResponseKeyword: return "ResponseKeyword";
        case TokenKind::ModKeyword: return "ModKeyword";
        case TokenKind::OnlyKeyword: return "OnlyKeyword";
        case TokenKind::PreferKeyword: return "PreferKeyword";
        case TokenKind::SoftExcludeMarker: return "SoftExcludeMarker";
        case TokenKind::HardExcludeMarker: return "HardExcludeMarker";
        case TokenKind::CommentMarker: return "CommentMarker";
        case TokenKind::CotKeyword: return "CotKeyword";
        case TokenKind::CtxKeyword: return "CtxKeyword";
        case TokenKind::Arrow: return "Arrow";
        case TokenKind::Dash: return "Dash";
        case TokenKind::Colon: return "Colon";
        case TokenKind::Comma: return "Comma";
        case TokenKind::LBrace: return "LBrace";
        case TokenKind::RBrace: return "RBrace";
        case TokenKind::LParen: return "LParen";
        case TokenKind::RParen: return "RParen";
        case TokenKind::ConfidenceKeyword: return "ConfidenceKeyword";
        case TokenKind::Equals: return "Equals";
        case TokenKind::Float: return "Float";
        case TokenKind::Identifier: return "Identifier";
        case TokenKind::Text: return "Text";
        case TokenKind::Whitespace: return "Whitespace";
        case TokenKind::Newline: return "Newline";
    }
    return "Unknown";
}

LexResult tokenize(std::string_view source) {
    return Lexer(source).run();
}

bool is_identifier(std::string_view text) {
    if (text.empty() || !is_ident_start(text.front())) return false;
    for (char c : text) {
        if (!is_ident_char(c)) return false;
    }
    return true;
}

}  // namespace synlang
