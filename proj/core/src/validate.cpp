#include "synlang/validate.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "synlang/formatter.hpp"
#include "synlang/kv_config.hpp"

namespace synlang {

namespace {

constexpr std::string_view kKnownCodes[] = {
    "E-CONF-001", "E-CTX-001", "E-RESP-001", "E-COT-001",
    "W-TRACE-001", "W-CTRL-001", "W-CTRL-002", "W-CTX-001",
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Comma-separated source terms of an ONLY/exclusion directive.
std::vector<std::string> directive_terms(const std::string& text) {
    std::vector<std::string> terms;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        const std::string_view term = trim(std::string_view(text).substr(start, comma - start));
        if (!term.empty()) terms.emplace_back(term);
        start = comma + 1;
    }
    return terms;
}

class Checker {
  public:
    Checker(const RuleSet& rules) : rules_(rules) {}

    void report(const std::string& code, std::string message, Span span) {
        const auto severity = rules_.severity(code);
        if (!severity) return;
        out_.push_back({*severity, code, std::move(message), span});
    }

    void check_block(const Block& block) {
        check_confidences(block);
        check_coordination_ids(block);
        check_response(block);
        check_trace_labels(block);
        check_controls(block);
        check_ctx_confidence(block);
    }

    std::vector<Diagnostic> take() {
        sort_by_span(out_);
        return std::move(out_);
    }

  private:
    const RuleSet& rules_;
    std::vector<Diagnostic> out_;

    void check_confidence_value(const TraceItem& item) {
        if (!item.confidence) return;
        const double c = *item.confidence;
        if (!(c >= 0.0 && c <= 1.0) || !std::isfinite(c)) {
            report("E-CONF-001",
                   "confidence " + format_confidence(c) + " of '" + item.label +
                       "' is outside [0, 1]",
                   item.span);
        }
    }

    void check_confidences(const Block& block) {
        for (const TraceItem& item : block.trace_fe) check_confidence_value(item);
        if (block.coordination) {
            for (const TraceItem& item : block.coordination->ctx_items) {
                check_confidence_value(item);
            }
        }
    }

    void check_coordination_ids(const Block& block) {
        if (!block.coordination) return;
        const Coordination& coord = *block.coordination;
        if (coord.ctx_id != coord.cot_id) {
            report("E-CTX-001",
                   "CTX id '" + coord.ctx_id + "' does not match the COT id '" + coord.cot_id +
                       "'",
                   coord.ctx_span);
        }
    }

    void check_response(const Block& block) {
        if (!block.response_format) return;
        if (block.response_format->kind == ResponseKind::Unknown) {
            report("E-RESP-001",
                   "unknown response format '" + block.response_format->name + "'",
                   block.response_format->span);
        }
    }

    void check_trace_labels(const Block& block) {
        if (block.trace.empty()) return;
        for (const TraceItem& item : block.trace_fe) {
            bool found = false;
            for (const std::string& id : block.trace) {
                if (id == item.label) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                report("W-TRACE-001",
                       "TRACE_FE label '" + item.label + "' is absent from the TRACE list",
                       item.span);
            }
        }
    }

    void check_controls(const Block& block) {
        // ONLY vs exclusion conflicts
        for (const ControlDirective& excl : block.controls) {
            if (excl.kind != ControlKind::SoftExclude && excl.kind != ControlKind::HardExclude) {
                continue;
            }
            const std::vector<std::string> excl_terms = directive_terms(excl.text);
            for (const ControlDirective& only : block.controls) {
                if (only.kind != ControlKind::Only) continue;
                for (const std::string& t : directive_terms(only.text)) {
                    for (const std::string& e : excl_terms) {
                        if (t == e) {
                            report("W-CTRL-001",
                                   "'" + t + "' appears in both ONLY and an exclusion directive",
                                   excl.span);
                        }
                    }
                }
            }
        }
        // duplicate kind + identical text
        for (std::size_t i = 0; i < block.controls.size(); ++i) {
            for (std::size_t k = 0; k < i; ++k) {
                if (block.controls[i].kind == block.controls[k].kind &&
                    block.controls[i].text == block.controls[k].text) {
                    report("W-CTRL-002",
                           std::string("duplicate ") +
                               std::string(to_string(block.controls[i].kind)) +
                               " directive with identical text",
                           block.controls[i].span);
                    break;
                }
            }
        }
    }

    void check_ctx_confidence(const Block& block) {
        if (!block.coordination) return;
        for (const TraceItem& item : block.coordination->ctx_items) {
            if (!item.confidence) {
                report("W-CTX-001",
                       "CTX item '" + item.label + "' has no confidence clause", item.span);
            }
        }
    }
};

}  // namespace

RuleSet RuleSet::defaults() {
    RuleSet rs;
    for (const std::string_view code : kKnownCodes) {
        rs.rules_[std::string(code)] =
            code.front() == 'E' ? RuleSeverity::Error : RuleSeverity::Warning;
    }
    return rs;
}

RuleSet RuleSet::from_config(std::string_view text) {
    RuleSet rs = defaults();
    for (const KvEntry& entry : parse_kv(text)) {
        RuleSeverity sev;
        if (entry.value == "error") {
            sev = RuleSeverity::Error;
        } else if (entry.value == "warning") {
            sev = RuleSeverity::Warning;
        } else if (entry.value == "off") {
            sev = RuleSeverity::Off;
        } else {
            throw std::invalid_argument("line " + std::to_string(entry.line) +
                                        ": unknown severity '" + entry.value +
                                        "' (expected error, warning, or off)");
        }
        rs.set(entry.key, sev);
    }
    return rs;
}

void RuleSet::set(const std::string& code, RuleSeverity severity) {
    if (rules_.find(code) == rules_.end()) {
        throw std::invalid_argument("unknown rule code '" + code + "'");
    }
    rules_[code] = severity;
}

std::optional<Severity> RuleSet::severity(const std::string& code) const {
    const auto it = rules_.find(code);
    if (it == rules_.end() || it->second == RuleSeverity::Off) return std::nullopt;
    return it->second == RuleSeverity::Error ? Severity::Error : Severity::Warning;
}

std::vector<Diagnostic> validate_block(const Block& block, const RuleSet& rules) {
    Checker checker(rules);
    checker.check_block(block);
    return checker.take();
}

std::vector<Diagnostic> validate_document(const std::vector<Block>& blocks,
                                          const RuleSet& rules) {
    std::vector<Diagnostic> out;
    std::set<std::string> introduced;
    for (const Block& block : blocks) {
        Checker checker(rules);
        checker.check_block(block);
        if (block.coordination) {
            // The block's own COT line precedes its CTX line, so it counts
            // as introduced before the reference check.
            introduced.insert(block.coordination->cot_id);
            if (introduced.find(block.coordination->ctx_id) == introduced.end()) {
                checker.report("E-COT-001",
                               "CTX references COT id '" + block.coordination->ctx_id +
                                   "' which no COT line introduced",
                               block.coordination->ctx_span);
            }
        }
        std::vector<Diagnostic> block_diags = checker.take();
        out.insert(out.end(), block_diags.begin(), block_diags.end());
    }
    return out;
}

}  // namespace synlang
