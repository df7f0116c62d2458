#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "synlang/ast.hpp"
#include "synlang/source.hpp"

namespace synlang {

// Strict follows the published grammar exactly. Lenient additionally
//   - joins continuation lines (any line that starts with no recognized
//     marker) onto the previous logical line,
//   - accepts TRACE_FE/CTX items without a confidence clause,
//   - tolerates blank lines and flexible line order after the mandatory
//     four-line prefix.
enum class ParseMode { Strict, Lenient };

struct ParseResult {
    std::optional<Block> block;  // absent when errors prevented construction
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return block.has_value() && !has_errors(diagnostics); }
};

struct DocumentResult {
    std::vector<ParseResult> blocks;          // one entry per '#'-led segment
    std::vector<Diagnostic> diagnostics;      // document-level findings

    // Every diagnostic in source order: document-level first, then per block.
    std::vector<Diagnostic> all_diagnostics() const;
    bool ok() const;
};

ParseResult parse_block(std::string_view source, ParseMode mode);

// Splits at each line whose first byte (column 0) is '#'; a '#' inside free
// text does not separate blocks. Per-block errors stay attached to their
// entry without aborting the rest.
DocumentResult parse_document(std::string_view source, ParseMode mode);

}  // namespace synlang
