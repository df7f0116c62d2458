#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "synlang/source.hpp"

namespace synlang {

// One kind per grammar terminal, plus trivia (Whitespace) and free-text runs.
enum class TokenKind {
    TaskMarker,         // "#"
    AgentMarker,        // "@"
    ContextFence,       // "==="
    QueryMarker,        // ">"
    FactorMarker,       // ">>"
    SubfactorMarker,    // ">>>"
    TraceKeyword,       // "TRACE:"
    TraceFeKeyword,     // "TRACE_FE:"
    FeelKeyword,        // "FEEL:"
    ResponseKeyword,    // "R:"
    ModKeyword,         // "MOD:"
    OnlyKeyword,        // "ONLY:"
    PreferKeyword,      // "PREFER:"
    SoftExcludeMarker,  // "-!"
    HardExcludeMarker,  // "-!!"
    CommentMarker,      // "//"
    CotKeyword,         // "COT:"
    CtxKeyword,         // "CTX:"
    Arrow,              // "->"
    Dash,               // "-" (trace item bullet)
    Colon,              // ":"
    Comma,              // ","
    LBrace,             // "{"
    RBrace,             // "}"
    LParen,             // "("
    RParen,             // ")"
    ConfidenceKeyword,  // "confidence"
    Equals,             // "="
    Float,              // [0-9]* "." [0-9]+
    Identifier,         // [a-zA-Z_][a-zA-Z0-9_]*
    Text,               // free text run
    Whitespace,         // trivia
    Newline,            // "\n" | "\r\n"
};

std::string_view to_string(TokenKind kind);

// Lexemes view into the tokenized source; they stay valid only while that
// buffer is alive. Concatenating all lexemes in order reproduces the input
// byte for byte.
struct Token {
    TokenKind kind;
    std::string_view lexeme;
    Span span;
    std::size_t offset = 0;  // byte offset of lexeme start
};

struct LexResult {
    std::vector<Token> tokens;
    std::vector<Diagnostic> diagnostics;  // encoding errors only
};

LexResult tokenize(std::string_view source);

bool is_identifier(std::string_view text);

}  // namespace synlang
