#include "synlang/source.hpp"

#include <algorithm>
#include <tuple>

namespace synlang {

std::string_view to_string(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

std::string render(const Diagnostic& d, std::string_view file, bool color) {
    std::string out;
    out.reserve(file.size() + d.message.size() + d.code.size() + 32);
    out += file;
    out += ':';
    out += std::to_string(d.span.begin.line);
    out += ':';
    out += std::to_string(d.span.begin.column);
    out += ": ";
    if (color) {
        out += d.severity == Severity::Error ? "\033[31m" : "\033[33m";
    }
    out += to_string(d.severity);
    out += '[';
    out += d.code;
    out += ']';
    if (color) {
        out += "\033[0m";
    }
    out += ": ";
    out += d.message;
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

void sort_by_span(std::vector<Diagnostic>& diagnostics) {
    std::stable_sort(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                         return std::tie(a.span.begin.line, a.span.begin.column, a.code) <
                                std::tie(b.span.begin.line, b.span.begin.column, b.code);
                     });
}

}  // namespace synlang
