#include "synlang/json_io.hpp"

#include <cmath>
#include <stdexcept>

#include "synlang/token.hpp"

namespace synlang {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json item_to_json(const TraceItem& item) {
    ordered_json j;
    j["label"] = item.label;
    j["explanation"] = item.explanation;
    if (item.confidence) {
        j["confidence"] = *item.confidence;
    }
    return j;
}

TraceItem item_from_json(const ordered_json& j) {
    TraceItem item;
    item.label = j.at("label").get<std::string>();
    if (!is_identifier(item.label)) {
        throw std::invalid_argument("trace item label is not an identifier: " + item.label);
    }
    item.explanation = j.at("explanation").get<std::string>();
    if (j.contains("confidence")) {
        const double c = j.at("confidence").get<double>();
        if (!std::isfinite(c)) {
            throw std::invalid_argument("trace item confidence is not finite");
        }
        item.confidence = c;
    }
    return item;
}

ControlKind control_kind_from_name(const std::string& name) {
    if (name == "MOD") return ControlKind::Mod;
    if (name == "ONLY") return ControlKind::Only;
    if (name == "PREFER") return ControlKind::Prefer;
    if (name == "SOFT_EXCLUDE") return ControlKind::SoftExclude;
    if (name == "HARD_EXCLUDE") return ControlKind::HardExclude;
    if (name == "COMMENT") return ControlKind::Comment;
    throw std::invalid_argument("unknown control directive kind: " + name);
}

}  // namespace

nlohmann::ordered_json to_json(const Block& block) {
    ordered_json j;
    j["task"] = block.task;
    j["agent"] = block.agent;
    j["context"] = block.context;
    j["query"] = block.query;
    j["factors"] = ordered_json::array();
    for (const Factor& f : block.factors) {
        ordered_json fj;
        fj["depth"] = f.depth;
        fj["text"] = f.text;
        j["factors"].push_back(std::move(fj));
    }
    j["feel"] = block.feel ? ordered_json(*block.feel) : ordered_json(nullptr);
    j["trace"] = block.trace;
    j["trace_fe"] = ordered_json::array();
    for (const TraceItem& item : block.trace_fe) {
        j["trace_fe"].push_back(item_to_json(item));
    }
    j["response_format"] =
        block.response_format ? ordered_json(block.response_format->name) : ordered_json(nullptr);
    j["controls"] = ordered_json::array();
    for (const ControlDirective& c : block.controls) {
        ordered_json cj;
        cj["kind"] = std::string(to_string(c.kind));
        cj["text"] = c.text;
        j["controls"].push_back(std::move(cj));
    }
    if (block.coordination) {
        const Coordination& coord = *block.coordination;
        ordered_json cj;
        cj["cot_id"] = coord.cot_id;
        cj["target_agent"] = coord.target_agent;
        cj["task_description"] = coord.task_description;
        cj["ctx_id"] = coord.ctx_id;
        cj["ctx_items"] = ordered_json::array();
        for (const TraceItem& item : coord.ctx_items) {
            cj["ctx_items"].push_back(item_to_json(item));
        }
        j["coordination"] = std::move(cj);
    } else {
        j["coordination"] = nullptr;
    }
    return j;
}

Block block_from_json(const nlohmann::ordered_json& j) {
    Block block;
    block.task = j.at("task").get<std::string>();
    block.agent = j.at("agent").get<std::string>();
    if (!is_identifier(block.task) || !is_identifier(block.agent)) {
        throw std::invalid_argument("task and agent must be identifiers");
    }
    block.context = j.at("context").get<std::string>();
    block.query = j.at("query").get<std::string>();
    for (const auto& fj : j.at("factors")) {
        Factor f;
        f.depth = fj.at("depth").get<int>();
        if (f.depth != 2 && f.depth != 3) {
            throw std::invalid_argument("factor depth must be 2 or 3");
        }
        f.text = fj.at("text").get<std::string>();
        block.factors.push_back(std::move(f));
    }
    if (j.contains("feel") && !j.at("feel").is_null()) {
        block.feel = j.at("feel").get<std::string>();
    }
    if (j.contains("trace")) {
        block.trace = j.at("trace").get<std::vector<std::string>>();
    }
    if (j.contains("trace_fe")) {
        for (const auto& ij : j.at("trace_fe")) {
            block.trace_fe.push_back(item_from_json(ij));
        }
    }
    if (j.contains("response_format") && !j.at("response_format").is_null()) {
        ResponseFormat rf;
        rf.name = j.at("response_format").get<std::string>();
        rf.kind = response_kind_from_name(rf.name);
        block.response_format = std::move(rf);
    }
    if (j.contains("controls")) {
        for (const auto& cj : j.at("controls")) {
            ControlDirective c;
            c.kind = control_kind_from_name(cj.at("kind").get<std::string>());
            c.text = cj.at("text").get<std::string>();
            block.controls.push_back(std::move(c));
        }
    }
    if (j.contains("coordination") && !j.at("coordination").is_null()) {
        const auto& cj = j.at("coordination");
        Coordination coord;
        coord.cot_id = cj.at("cot_id").get<std::string>();
        coord.target_agent = cj.at("target_agent").get<std::string>();
        coord.task_description = cj.at("task_description").get<std::string>();
        coord.ctx_id = cj.at("ctx_id").get<std::string>();
        if (!is_identifier(coord.cot_id) || !is_identifier(coord.ctx_id) ||
            !is_identifier(coord.target_agent)) {
            throw std::invalid_argument("coordination ids and target must be identifiers");
        }
        for (const auto& ij : cj.at("ctx_items")) {
            coord.ctx_items.push_back(item_from_json(ij));
        }
        block.coordination = std::move(coord);
    }
    return block;
}

std::string export_json(const Block& block) {
    return to_json(block).dump(2) + "\n";
}

Block import_json(const std::string& text) {
    return block_from_json(nlohmann::ordered_json::parse(text));
}

}  // namespace synlang
