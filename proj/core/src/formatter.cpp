#include "synlang/formatter.hpp"

#include <charconv>
#include <system_error>

namespace synlang {

namespace {

// Quoting is needed exactly when reparsing the bare text would change it:
// the fence-splitting case and the quote-stripping case.
bool context_needs_quotes(const std::string& text) {
    if (text.find("===") != std::string::npos) return true;
    return text.size() >= 2 && text.front() == '"' && text.back() == '"';
}

void append_item(std::string& out, const TraceItem& item) {
    out += "  - ";
    out += item.label;
    out += ':';
    if (!item.explanation.empty()) {
        out += ' ';
        out += item.explanation;
    }
    if (item.confidence) {
        out += " (confidence=";
        out += format_confidence(*item.confidence);
        out += ')';
    }
    out += '\n';
}

void append_marker_line(std::string& out, std::string_view marker, const std::string& text) {
    out += marker;
    if (!text.empty()) {
        out += ' ';
        out += text;
    }
    out += '\n';
}

}  // namespace

std::string format_confidence(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
    std::string s(buf, res.ptr);
    if (s.find('.') == std::string::npos) {
        s += ".0";
    }
    return s;
}

std::string format_canonical(const Block& block) {
    std::string out;
    out += '#';
    out += block.task;
    out += '\n';
    out += '@';
    out += block.agent;
    out += '\n';
    out += "=== ";
    if (context_needs_quotes(block.context)) {
        out += '"';
        out += block.context;
        out += '"';
    } else {
        out += block.context;
    }
    out += " ===\n";
    append_marker_line(out, ">", block.query);
    for (const Factor& f : block.factors) {
        append_marker_line(out, f.depth == 2 ? ">>" : ">>>", f.text);
    }
    if (block.feel) {
        out += "FEEL: ";
        out += *block.feel;
        out += '\n';
    }
    if (!block.trace.empty()) {
        out += "TRACE: ";
        for (std::size_t i = 0; i < block.trace.size(); ++i) {
            if (i) out += ", ";
            out += block.trace[i];
        }
        out += '\n';
    }
    if (!block.trace_fe.empty()) {
        out += "TRACE_FE:\n";
        for (const TraceItem& item : block.trace_fe) {
            append_item(out, item);
        }
    }
    if (block.response_format) {
        out += "R: ";
        out += block.response_format->name;
        out += '\n';
    }
    for (const ControlDirective& c : block.controls) {
        switch (c.kind) {
            case ControlKind::Mod: append_marker_line(out, "MOD:", c.text); break;
            case ControlKind::Only: append_marker_line(out, "ONLY:", c.text); break;
            case ControlKind::Prefer: append_marker_line(out, "PREFER:", c.text); break;
            case ControlKind::SoftExclude: append_marker_line(out, "-!", c.text); break;
            case ControlKind::HardExclude: append_marker_line(out, "-!!", c.text); break;
            case ControlKind::Comment: append_marker_line(out, "//", c.text); break;
        }
    }
    if (block.coordination) {
        const Coordination& coord = *block.coordination;
        out += "COT: ";
        out += coord.cot_id;
        out += " -> @";
        out += coord.target_agent;
        out += ": \"";
        out += coord.task_description;
        out += "\"\n";
        out += "CTX: ";
        out += coord.ctx_id;
        out += " {\n";
        for (const TraceItem& item : coord.ctx_items) {
            append_item(out, item);
        }
        out += "}\n";
    }
    return out;
}

std::string format_canonical(const std::vector<Block>& document) {
    std::string out;
    for (std::size_t i = 0; i < document.size(); ++i) {
        if (i) out += '\n';
        out += format_canonical(document[i]);
    }
    return out;
}

}  // namespace synlang
