#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "synlang/ast.hpp"
#include "synlang/calculus.hpp"

namespace synlang {

// One step of an agent's reasoning trace. Confidence is absent for
// unquantified context items; those are exempt from degradation and from
// humility checks. hop_index counts handoffs since the step's creation.
struct TraceStep {
    std::string step;
    std::string evidence;
    std::optional<Confidence> confidence;
    std::string origin_agent;
    int hop_index = 0;
};

class ReasoningTrace {
  public:
    void append(TraceStep step) { steps_.push_back(std::move(step)); }
    const std::vector<TraceStep>& steps() const { return steps_; }
    bool empty() const { return steps_.empty(); }
    std::size_t size() const { return steps_.size(); }

  private:
    std::vector<TraceStep> steps_;
};

// Concatenation that preserves order, origin, and confidence of every step.
ReasoningTrace compose_traces(const ReasoningTrace& first, const ReasoningTrace& second);

struct AgentProfile {
    std::string name;
    TrustFactor trust;
    PropagationPolicy policy;
};

class AgentRegistry {
  public:
    // False when the name is already registered.
    bool register_agent(AgentProfile profile);
    const AgentProfile* find(const std::string& name) const;
    std::size_t size() const { return agents_.size(); }

  private:
    std::map<std::string, AgentProfile> agents_;
};

struct HandoffRecord {
    std::string cot_id;
    std::string sender;
    std::string receiver;
    std::string task_description;
    std::vector<TraceItem> transferred_items;  // post-degradation confidences
    std::uint64_t timestamp = 0;               // logical sequence number
};

// Replayable run record: handoffs in sequence order plus each agent's
// composed trace. Equal scenarios export byte-identical JSON.
struct AuditLog {
    std::vector<HandoffRecord> handoffs;
    std::map<std::string, ReasoningTrace> traces;
};

nlohmann::ordered_json to_json(const AuditLog& log);
std::string export_json(const AuditLog& log);

struct SimError {
    std::string code;  // E-ROUTE-001, E-VAL-001, E-USAGE-001
    std::string message;
};

struct ScenarioEvent {
    std::string sender;
    Block block;
};

// Routes COT/CTX handoffs among registered agents on a single logical
// timeline. Owns its state for the duration of a run; one simulator must
// not be driven from two threads at once.
class Simulator {
  public:
    explicit Simulator(AgentRegistry registry);

    // Validates, then routes the block's coordination payload: CTX items are
    // degraded by the receiver's policy and trust, appended to the
    // receiver's trace with origin_agent = sender and hop_index one past the
    // sender-side predecessor, and recorded with the preserved COT id.
    std::variant<HandoffRecord, SimError> handoff(const std::string& sender, const Block& block);

    // One scenario event: the sender's own TRACE_FE items join its trace,
    // then any coordination payload is handed off.
    std::optional<SimError> process(const std::string& sender, const Block& block);

    const AuditLog& log() const { return log_; }

  private:
    std::optional<SimError> validate_event(const std::string& sender, const Block& block) const;
    std::variant<HandoffRecord, SimError> route(const std::string& sender, const Block& block);

    AgentRegistry registry_;
    AuditLog log_;
    std::uint64_t next_timestamp_ = 1;
};

struct SimulationResult {
    AuditLog log;
    std::optional<SimError> error;  // first routing failure, log is partial
};

// Processes events strictly in scenario order; deterministic.
SimulationResult simulate(AgentRegistry registry, const std::vector<ScenarioEvent>& scenario);

}  // namespace synlang
