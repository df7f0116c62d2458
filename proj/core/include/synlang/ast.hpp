#pragma once

#include <optional>
#include <string>
#include <vector>

#include "synlang/source.hpp"

namespace synlang {

// Supporting factor (">>", depth 2) or sub-factor (">>>", depth 3).
struct Factor {
    int depth = 2;
    std::string text;
    Span span;
};

// One labeled explanation with an optional confidence value. The parser
// accepts any finite float; range checks live in the validate module.
struct TraceItem {
    std::string label;
    std::string explanation;
    std::optional<double> confidence;
    Span span;
};

enum class ControlKind { Mod, Only, Prefer, SoftExclude, HardExclude, Comment };

std::string_view to_string(ControlKind kind);

struct ControlDirective {
    ControlKind kind = ControlKind::Mod;
    std::string text;
    Span span;
};

enum class ResponseKind { Structured, Bulletpoint, Table, Plain, Json, Code, Unknown };

// `name` keeps the source spelling so unknown formats survive to the
// validator (E-RESP-001) and round-trip through the formatter.
struct ResponseFormat {
    ResponseKind kind = ResponseKind::Unknown;
    std::string name;
    Span span;
};

ResponseKind response_kind_from_name(std::string_view name);

// COT line plus its CTX transfer payload.
struct Coordination {
    std::string cot_id;
    std::string target_agent;
    std::string task_description;  // stored without the surrounding quotes
    std::string ctx_id;
    std::vector<TraceItem> ctx_items;
    Span cot_span;
    Span ctx_span;
};

// One parsed communication block.
struct Block {
    std::string task;
    std::string agent;
    std::string context;
    std::string query;
    std::vector<Factor> factors;
    std::optional<std::string> feel;
    std::vector<std::string> trace;
    std::vector<TraceItem> trace_fe;
    std::optional<ResponseFormat> response_format;
    std::vector<ControlDirective> controls;
    std::optional<Coordination> coordination;
    Span span;
};

// Field-wise equality ignoring source spans. Confidences compare exactly;
// canonical formatting preserves them bit for bit.
bool structurally_equal(const TraceItem& a, const TraceItem& b);
bool structurally_equal(const Block& a, const Block& b);

}  // namespace synlang
