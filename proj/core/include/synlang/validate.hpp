#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synlang/ast.hpp"
#include "synlang/source.hpp"

namespace synlang {

enum class RuleSeverity { Error, Warning, Off };

// Rule catalog with per-code severity overrides. Unknown rule codes are
// rejected when configuring.
class RuleSet {
  public:
    // Default catalog:
    //   E-CONF-001  confidence outside [0,1]
    //   E-CTX-001   CTX id differs from the block's COT id
    //   E-RESP-001  unknown response format
    //   E-COT-001   CTX references a COT id never introduced in the document
    //   W-TRACE-001 TRACE_FE label absent from the TRACE list
    //   W-CTRL-001  term listed in ONLY also appears in an exclusion
    //   W-CTRL-002  duplicate directive kind with identical text
    //   W-CTX-001   CTX item without a confidence clause
    static RuleSet defaults();

    // Parses a flat key-value file ("CODE = error|warning|off"). Throws
    // std::invalid_argument on unknown codes or severities.
    static RuleSet from_config(std::string_view text);

    void set(const std::string& code, RuleSeverity severity);

    // Nullopt when the rule is disabled.
    std::optional<Severity> severity(const std::string& code) const;

    const std::map<std::string, RuleSeverity>& rules() const { return rules_; }

  private:
    std::map<std::string, RuleSeverity> rules_;
};

// Diagnostics are deterministic and ordered by source span.
std::vector<Diagnostic> validate_block(const Block& block, const RuleSet& rules);

// Per-block diagnostics plus cross-block reference checks (E-COT-001).
std::vector<Diagnostic> validate_document(const std::vector<Block>& blocks,
                                          const RuleSet& rules);

}  // namespace synlang
