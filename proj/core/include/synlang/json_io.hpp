#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "synlang/ast.hpp"

namespace synlang {

// Stable machine-readable tree mirroring Block fields, keys in declaration
// order, confidences as numbers. Collections keep source order.
nlohmann::ordered_json to_json(const Block& block);

// Inverse of to_json. Throws std::invalid_argument on a tree that does not
// describe a valid block (bad kinds, out-of-pattern identifiers, non-finite
// confidences).
Block block_from_json(const nlohmann::ordered_json& j);

// to_json rendered with 2-space indentation and a trailing newline.
std::string export_json(const Block& block);

Block import_json(const std::string& text);

}  // namespace synlang
