#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>

#include "synlang/coordination.hpp"
#include "synlang/parser.hpp"

using namespace synlang;

namespace {

constexpr double kTol = 1e-9;

std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(SYNLANG_FIXTURE_DIR) + "/" + name, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

Block parse_ok(const std::string& source) {
    const ParseResult r = parse_block(source, ParseMode::Lenient);
    REQUIRE(r.block.has_value());
    REQUIRE_FALSE(has_errors(r.diagnostics));
    return *r.block;
}

TraceStep step(const std::string& name, double conf, const std::string& origin, int hop = 0) {
    TraceStep s;
    s.step = name;
    s.evidence = "evidence for " + name;
    s.confidence = Confidence(conf);
    s.origin_agent = origin;
    s.hop_index = hop;
    return s;
}

AgentRegistry registry_with(std::initializer_list<AgentProfile> profiles) {
    AgentRegistry reg;
    for (const AgentProfile& p : profiles) {
        REQUIRE(reg.register_agent(p));
    }
    return reg;
}

AgentProfile multiplicative_agent(const std::string& name, double tf = 1.0, double trust = 1.0) {
    return AgentProfile{name, TrustFactor(trust), PropagationPolicy::multiplicative(tf)};
}

}  // namespace

TEST_CASE("trace composition concatenates and preserves origins") {
    ReasoningTrace t1;
    t1.append(step("s1", 0.9, "AI_DETECTOR"));
    t1.append(step("s2", 0.8, "AI_DETECTOR"));
    ReasoningTrace t2;
    t2.append(step("s3", 0.7, "AI_FORENSICS"));

    const ReasoningTrace composed = compose_traces(t1, t2);
    REQUIRE(composed.size() == 3);
    CHECK(composed.steps()[0].step == "s1");
    CHECK(composed.steps()[1].step == "s2");
    CHECK(composed.steps()[2].step == "s3");
    CHECK(composed.steps()[0].origin_agent == "AI_DETECTOR");
    CHECK(composed.steps()[2].origin_agent == "AI_FORENSICS");
    CHECK(composed.steps()[2].confidence->value() == 0.7);
}

TEST_CASE("empty trace is the identity element") {
    ReasoningTrace t;
    t.append(step("s1", 0.9, "A"));
    const ReasoningTrace left = compose_traces(t, ReasoningTrace{});
    const ReasoningTrace right = compose_traces(ReasoningTrace{}, t);
    REQUIRE(left.size() == 1);
    REQUIRE(right.size() == 1);
    CHECK(left.steps()[0].step == "s1");
    CHECK(right.steps()[0].step == "s1");
}

TEST_CASE("composition is associative") {
    ReasoningTrace a, b, c;
    a.append(step("s1", 0.9, "A"));
    b.append(step("s2", 0.8, "B"));
    c.append(step("s3", 0.7, "C"));
    const ReasoningTrace left = compose_traces(compose_traces(a, b), c);
    const ReasoningTrace right = compose_traces(a, compose_traces(b, c));
    REQUIRE(left.size() == right.size());
    for (std::size_t i = 0; i < left.size(); ++i) {
        CHECK(left.steps()[i].step == right.steps()[i].step);
        CHECK(left.steps()[i].origin_agent == right.steps()[i].origin_agent);
    }
}

TEST_CASE("composition conserves the step/origin multiset") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> conf(0.0, 1.0);
    for (int round = 0; round < 100; ++round) {
        ReasoningTrace t1, t2;
        std::multiset<std::pair<std::string, std::string>> expected;
        const int n1 = static_cast<int>(rng() % 5);
        const int n2 = static_cast<int>(rng() % 5);
        for (int i = 0; i < n1; ++i) {
            auto s = step("s" + std::to_string(static_cast<int>(rng() % 3)), conf(rng), "A");
            expected.emplace(s.step, s.origin_agent);
            t1.append(std::move(s));
        }
        for (int i = 0; i < n2; ++i) {
            auto s = step("s" + std::to_string(static_cast<int>(rng() % 3)), conf(rng), "B");
            expected.emplace(s.step, s.origin_agent);
            t2.append(std::move(s));
        }
        const ReasoningTrace composed = compose_traces(t1, t2);
        std::multiset<std::pair<std::string, std::string>> actual;
        for (const TraceStep& s : composed.steps()) {
            actual.emplace(s.step, s.origin_agent);
        }
        CHECK(actual == expected);
    }
}

TEST_CASE("registration rejects duplicates") {
    AgentRegistry reg;
    CHECK(reg.register_agent(multiplicative_agent("AI_FORENSICS")));
    CHECK_FALSE(reg.register_agent(multiplicative_agent("AI_FORENSICS")));
    CHECK(reg.size() == 1);
}

TEST_CASE("empty registry rejects any handoff") {
    Simulator sim{AgentRegistry{}};
    const Block block = parse_ok(read_fixture("paper/disinfo_analysis.syn"));
    const auto result = sim.handoff("AI_DETECTOR", block);
    REQUIRE(std::holds_alternative<SimError>(result));
    CHECK(std::get<SimError>(result).code == "E-ROUTE-001");
}

TEST_CASE("handoff to an unregistered receiver fails") {
    Simulator sim{registry_with({multiplicative_agent("AI_DETECTOR")})};
    const Block block = parse_ok(read_fixture("paper/disinfo_analysis.syn"));
    const auto result = sim.handoff("AI_DETECTOR", block);
    REQUIRE(std::holds_alternative<SimError>(result));
    CHECK(std::get<SimError>(result).code == "E-ROUTE-001");
    CHECK(std::get<SimError>(result).message.find("AI_FORENSICS") != std::string::npos);
}

TEST_CASE("handoff without coordination is a usage error") {
    Simulator sim{registry_with({multiplicative_agent("A"), multiplicative_agent("B")})};
    const Block block = parse_ok("#T\n@B\n=== c ===\n> q\n");
    const auto result = sim.handoff("A", block);
    REQUIRE(std::holds_alternative<SimError>(result));
    CHECK(std::get<SimError>(result).code == "E-USAGE-001");
}

TEST_CASE("validation errors refuse the handoff and list diagnostics") {
    Simulator sim{registry_with({multiplicative_agent("A"), multiplicative_agent("B")})};
    const Block block = parse_ok(
        "#T\n@B\n=== c ===\n> q\nCOT: C1 -> @B: \"t\"\nCTX: C1 {\n"
        "  - k: v (confidence=1.5)\n}\n");
    const auto result = sim.handoff("A", block);
    REQUIRE(std::holds_alternative<SimError>(result));
    CHECK(std::get<SimError>(result).code == "E-VAL-001");
    CHECK(std::get<SimError>(result).message.find("E-CONF-001") != std::string::npos);
}

TEST_CASE("published example transfers both ctx items") {
    AgentRegistry reg = registry_with(
        {multiplicative_agent("AI_DETECTOR", 0.95),
         AgentProfile{"AI_FORENSICS", TrustFactor(1.0), PropagationPolicy::fixed_decrement(0.02)}});
    Simulator sim{std::move(reg)};
    const Block block = parse_ok(read_fixture("paper/disinfo_analysis.syn"));
    const auto result = sim.handoff("AI_DETECTOR", block);
    REQUIRE(std::holds_alternative<HandoffRecord>(result));
    const HandoffRecord& record = std::get<HandoffRecord>(result);
    CHECK(record.cot_id == "COT_a1b2c");
    CHECK(record.sender == "AI_DETECTOR");
    CHECK(record.receiver == "AI_FORENSICS");
    CHECK(record.task_description == "Analyze frame-level compression");
    CHECK(record.timestamp == 1);
    REQUIRE(record.transferred_items.size() == 2);
    CHECK(record.transferred_items[0].label == "decision");
    CHECK(std::abs(*record.transferred_items[0].confidence - 0.89) <= kTol);
    CHECK(record.transferred_items[1].label == "context");
    CHECK_FALSE(record.transferred_items[1].confidence.has_value());

    const auto& trace = sim.log().traces.at("AI_FORENSICS");
    REQUIRE(trace.size() == 2);
    CHECK(trace.steps()[0].origin_agent == "AI_DETECTOR");
    CHECK(trace.steps()[0].hop_index == 1);
    CHECK_FALSE(trace.steps()[1].confidence.has_value());
}

TEST_CASE("simulating the published scenario appends the receiver trace") {
    AgentRegistry reg = registry_with(
        {multiplicative_agent("AI_DETECTOR", 0.95),
         AgentProfile{"AI_FORENSICS", TrustFactor(1.0), PropagationPolicy::fixed_decrement(0.02)}});
    const Block block = parse_ok(read_fixture("paper/disinfo_analysis.syn"));
    const SimulationResult result = simulate(std::move(reg), {{"AI_DETECTOR", block}});
    REQUIRE_FALSE(result.error.has_value());
    REQUIRE(result.log.handoffs.size() == 1);
    CHECK(result.log.traces.at("AI_FORENSICS").size() == 2);
    // sender's own TRACE_FE entries are its reasoning steps (hop 0)
    const auto& own = result.log.traces.at("AI_DETECTOR");
    REQUIRE(own.size() == 2);
    CHECK(own.steps()[0].step == "lip_sync");
    CHECK(own.steps()[0].hop_index == 0);
    CHECK(own.steps()[0].origin_agent == "AI_DETECTOR");
}

TEST_CASE("empty scenario yields an empty audit log") {
    const SimulationResult result = simulate(AgentRegistry{}, {});
    CHECK_FALSE(result.error.has_value());
    CHECK(result.log.handoffs.empty());
    CHECK(result.log.traces.empty());
}

TEST_CASE("three-agent relay multiplies per hop and counts hops") {
    AgentRegistry reg = registry_with({multiplicative_agent("AI_RELAY_A", 0.95),
                                       multiplicative_agent("AI_RELAY_B", 0.95),
                                       multiplicative_agent("AI_RELAY_C", 0.95)});
    const DocumentResult doc =
        parse_document(read_fixture("scenario/relay.syn"), ParseMode::Lenient);
    REQUIRE(doc.ok());
    std::vector<ScenarioEvent> events;
    events.push_back({"AI_RELAY_A", *doc.blocks[0].block});
    events.push_back({"AI_RELAY_B", *doc.blocks[1].block});
    const SimulationResult result = simulate(std::move(reg), events);
    REQUIRE_FALSE(result.error.has_value());
    REQUIRE(result.log.handoffs.size() == 2);
    CHECK(result.log.handoffs[0].timestamp == 1);
    CHECK(result.log.handoffs[1].timestamp == 2);

    const auto& c_trace = result.log.traces.at("AI_RELAY_C");
    REQUIRE(c_trace.size() == 1);
    CHECK(std::abs(c_trace.steps()[0].confidence->value() - 0.9 * 0.95 * 0.95) <= kTol);
    CHECK(c_trace.steps()[0].hop_index == 2);
    CHECK(c_trace.steps()[0].origin_agent == "AI_RELAY_B");

    const auto& b_trace = result.log.traces.at("AI_RELAY_B");
    REQUIRE(b_trace.size() == 1);
    CHECK(b_trace.steps()[0].hop_index == 1);
    CHECK(std::abs(b_trace.steps()[0].confidence->value() - 0.9 * 0.95) <= kTol);
}

TEST_CASE("transferred confidence never exceeds the written value") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> conf(0.0, 1.0);
    std::uniform_real_distribution<double> tf(0.9, 1.0);
    std::uniform_real_distribution<double> trust(0.5, 1.0);
    for (int round = 0; round < 100; ++round) {
        AgentRegistry reg = registry_with(
            {multiplicative_agent("A"),
             AgentProfile{"B", TrustFactor(trust(rng)),
                          round % 2 == 0
                              ? PropagationPolicy::multiplicative(tf(rng))
                              : PropagationPolicy::fixed_decrement(0.02)}});
        std::ostringstream src;
        src << "#T\n@B\n=== c ===\n> q\nCOT: C1 -> @B: \"t\"\nCTX: C1 {\n";
        std::vector<double> written;
        const int items = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < items; ++i) {
            std::ostringstream lit;
            lit.precision(4);
            lit << std::fixed << conf(rng);
            written.push_back(std::stod(lit.str()));
            src << "  - item" << i << ": text (confidence=" << lit.str() << ")\n";
        }
        src << "}\n";
        Simulator sim{std::move(reg)};
        const auto result = sim.handoff("A", parse_ok(src.str()));
        REQUIRE(std::holds_alternative<HandoffRecord>(result));
        const HandoffRecord& record = std::get<HandoffRecord>(result);
        REQUIRE(record.transferred_items.size() == written.size());
        for (std::size_t i = 0; i < written.size(); ++i) {
            CHECK(*record.transferred_items[i].confidence <= written[i] + 1e-12);
        }
    }
}

TEST_CASE("audit log export is byte-identical across runs") {
    const Block block = parse_ok(read_fixture("paper/disinfo_analysis.syn"));
    std::string dumps[2];
    for (int i = 0; i < 2; ++i) {
        AgentRegistry reg = registry_with(
            {multiplicative_agent("AI_DETECTOR", 0.95),
             AgentProfile{"AI_FORENSICS", TrustFactor(1.0),
                          PropagationPolicy::fixed_decrement(0.02)}});
        const SimulationResult result = simulate(std::move(reg), {{"AI_DETECTOR", block}});
        REQUIRE_FALSE(result.error.has_value());
        dumps[i] = export_json(result.log);
    }
    CHECK(dumps[0] == dumps[1]);
    CHECK(dumps[0].find("\"cot_id\": \"COT_a1b2c\"") != std::string::npos);
}

TEST_CASE("routing failure aborts with a partial log") {
    AgentRegistry reg = registry_with({multiplicative_agent("A"), multiplicative_agent("B")});
    const Block good = parse_ok(
        "#T\n@B\n=== c ===\n> q\nTRACE_FE:\n  - done: first step (confidence=0.8)\n"
        "COT: C1 -> @B: \"t\"\nCTX: C1 {\n  - done: first step (confidence=0.8)\n}\n");
    const Block bad = parse_ok(
        "#T\n@Z\n=== c ===\n> q\nCOT: C2 -> @Z: \"t\"\nCTX: C2 {\n}\n");
    const SimulationResult result =
        simulate(std::move(reg), {{"A", good}, {"B", bad}});
    REQUIRE(result.error.has_value());
    CHECK(result.error->code == "E-ROUTE-001");
    CHECK(result.log.handoffs.size() == 1);  // the first event completed
}
