#pragma once

#include <string>
#include <vector>

#include "synlang/ast.hpp"

namespace synlang {

// Shortest decimal digits that reparse to the same double, always with a
// decimal point so the result matches the grammar's float rule.
std::string format_confidence(double value);

// Canonical layout: grammar line order, 2-space indent for TRACE_FE/CTX
// items, one logical line per item, no blank lines. Strict-parsing the
// output of a strict parse yields a structurally equal block, and
// formatting is a fixpoint.
std::string format_canonical(const Block& block);

// Blocks joined by a single blank line, trailing newline at the end.
std::string format_canonical(const std::vector<Block>& document);

}  // namespace synlang
