#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace synlang {

struct KvEntry {
    std::string key;
    std::string value;
    int line = 1;
};

// Flat "key = value" text: one entry per line, '#' starts a comment, blank
// lines ignored. Throws std::invalid_argument on lines without '='.
std::vector<KvEntry> parse_kv(std::string_view text);

}  // namespace synlang
