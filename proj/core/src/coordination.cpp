#include "synlang/coordination.hpp"

#include "synlang/validate.hpp"

namespace synlang {

namespace {

// Sender-side predecessor for a transferred label: the most recent step
// with the same name, so relayed items keep counting hops.
int next_hop_index(const ReasoningTrace& sender_trace, const std::string& label) {
    for (auto it = sender_trace.steps().rbegin(); it != sender_trace.steps().rend(); ++it) {
        if (it->step == label) return it->hop_index + 1;
    }
    return 1;
}

nlohmann::ordered_json step_to_json(const TraceStep& step) {
    nlohmann::ordered_json j;
    j["step"] = step.step;
    j["evidence"] = step.evidence;
    if (step.confidence) {
        j["confidence"] = step.confidence->value();
    }
    j["origin_agent"] = step.origin_agent;
    j["hop_index"] = step.hop_index;
    return j;
}

nlohmann::ordered_json item_to_json(const TraceItem& item) {
    nlohmann::ordered_json j;
    j["label"] = item.label;
    j["explanation"] = item.explanation;
    if (item.confidence) {
        j["confidence"] = *item.confidence;
    }
    return j;
}

}  // namespace

ReasoningTrace compose_traces(const ReasoningTrace& first, const ReasoningTrace& second) {
    ReasoningTrace out;
    for (const TraceStep& s : first.steps()) out.append(s);
    for (const TraceStep& s : second.steps()) out.append(s);
    return out;
}

bool AgentRegistry::register_agent(AgentProfile profile) {
    const std::string name = profile.name;
    return agents_.emplace(name, std::move(profile)).second;
}

const AgentProfile* AgentRegistry::find(const std::string& name) const {
    const auto it = agents_.find(name);
    return it == agents_.end() ? nullptr : &it->second;
}

nlohmann::ordered_json to_json(const AuditLog& log) {
    nlohmann::ordered_json j;
    j["handoffs"] = nlohmann::ordered_json::array();
    for (const HandoffRecord& r : log.handoffs) {
        nlohmann::ordered_json rj;
        rj["timestamp"] = r.timestamp;
        rj["cot_id"] = r.cot_id;
        rj["sender"] = r.sender;
        rj["receiver"] = r.receiver;
        rj["task_description"] = r.task_description;
        rj["transferred_items"] = nlohmann::ordered_json::array();
        for (const TraceItem& item : r.transferred_items) {
            rj["transferred_items"].push_back(item_to_json(item));
        }
        j["handoffs"].push_back(std::move(rj));
    }
    j["traces"] = nlohmann::ordered_json::object();
    for (const auto& [agent, trace] : log.traces) {
        nlohmann::ordered_json tj = nlohmann::ordered_json::array();
        for (const TraceStep& step : trace.steps()) {
            tj.push_back(step_to_json(step));
        }
        j["traces"][agent] = std::move(tj);
    }
    return j;
}

std::string export_json(const AuditLog& log) {
    return to_json(log).dump(2) + "\n";
}

Simulator::Simulator(AgentRegistry registry) : registry_(std::move(registry)) {}

std::optional<SimError> Simulator::validate_event(const std::string& sender,
                                                  const Block& block) const {
    if (!registry_.find(sender)) {
        return SimError{"E-ROUTE-001", "sender '" + sender + "' is not registered"};
    }
    const std::vector<Diagnostic> diags = validate_block(block, RuleSet::defaults());
    if (has_errors(diags)) {
        std::string message = "block refused by validation:";
        for (const Diagnostic& d : diags) {
            if (d.severity == Severity::Error) {
                message += " [" + d.code + "] " + d.message + ";";
            }
        }
        return SimError{"E-VAL-001", message};
    }
    return std::nullopt;
}

std::variant<HandoffRecord, SimError> Simulator::route(const std::string& sender,
                                                       const Block& block) {
    const Coordination& coord = *block.coordination;
    const AgentProfile* receiver = registry_.find(coord.target_agent);
    if (!receiver) {
        return SimError{"E-ROUTE-001",
                        "receiver '" + coord.target_agent + "' is not registered"};
    }
    const ReasoningTrace& sender_trace = log_.traces[sender];

    HandoffRecord record;
    record.cot_id = coord.cot_id;
    record.sender = sender;
    record.receiver = coord.target_agent;
    record.task_description = coord.task_description;

    std::vector<TraceStep> incoming;
    for (const TraceItem& item : coord.ctx_items) {
        TraceItem transferred = item;
        transferred.span = {};
        if (item.confidence) {
            const Confidence degraded =
                propagate(Confidence(*item.confidence), receiver->policy, receiver->trust);
            transferred.confidence = degraded.value();
        }
        TraceStep step;
        step.step = item.label;
        step.evidence = item.explanation;
        if (transferred.confidence) {
            step.confidence = Confidence(*transferred.confidence);
        }
        step.origin_agent = sender;
        step.hop_index = next_hop_index(sender_trace, item.label);
        incoming.push_back(std::move(step));
        record.transferred_items.push_back(std::move(transferred));
    }
    ReasoningTrace& target = log_.traces[coord.target_agent];
    for (TraceStep& step : incoming) {
        target.append(std::move(step));
    }
    record.timestamp = next_timestamp_++;
    log_.handoffs.push_back(record);
    return record;
}

std::variant<HandoffRecord, SimError> Simulator::handoff(const std::string& sender,
                                                         const Block& block) {
    if (!block.coordination) {
        return SimError{"E-USAGE-001", "block carries no coordination payload"};
    }
    if (auto err = validate_event(sender, block)) {
        return *err;
    }
    return route(sender, block);
}

std::optional<SimError> Simulator::process(const std::string& sender, const Block& block) {
    if (auto err = validate_event(sender, block)) {
        return err;
    }
    ReasoningTrace& own = log_.traces[sender];
    for (const TraceItem& item : block.trace_fe) {
        TraceStep step;
        step.step = item.label;
        step.evidence = item.explanation;
        if (item.confidence) {
            step.confidence = Confidence(*item.confidence);
        }
        step.origin_agent = sender;
        step.hop_index = 0;
        own.append(std::move(step));
    }
    if (!block.coordination) {
        return std::nullopt;
    }
    auto result = route(sender, block);
    if (auto* err = std::get_if<SimError>(&result)) {
        return *err;
    }
    return std::nullopt;
}

SimulationResult simulate(AgentRegistry registry, const std::vector<ScenarioEvent>& scenario) {
    Simulator sim(std::move(registry));
    for (const ScenarioEvent& event : scenario) {
        if (auto err = sim.process(event.sender, event.block)) {
            return {sim.log(), err};
        }
    }
    return {sim.log(), std::nullopt};
}

}  // namespace synlang
