#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace synlang {

// 1-based line / byte-column position into a source buffer.
struct Position {
    int line = 1;
    int column = 1;
};

struct Span {
    Position begin;
    Position end;  // inclusive start, exclusive end column
};

enum class Severity { Error, Warning };

std::string_view to_string(Severity s);

// A structured finding attached to a source span. Codes are short stable
// identifiers (E-CONF-001, W-TRACE-001, E-SYN-004, ...).
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    Span span;
};

// Renders "file:line:col: severity[code]: message".
std::string render(const Diagnostic& d, std::string_view file, bool color = false);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

// Stable ordering: by line, then column, then code.
void sort_by_span(std::vector<Diagnostic>& diagnostics);

}  // namespace synlang
