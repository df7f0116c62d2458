// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances and runtime budgets are pinned in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gen.hpp"
#include "synlang/calculus.hpp"
#include "synlang/cli.hpp"
#include "synlang/coordination.hpp"
#include "synlang/formatter.hpp"
#include "synlang/parser.hpp"
#include "synlang/validate.hpp"

using namespace synlang;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kFixtures = SYNLANG_FIXTURE_DIR;

int g_failed = 0;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

struct Check {
    std::vector<std::string> problems;

    void require(bool ok, const std::string& what) {
        if (!ok) problems.push_back(what);
    }
};

void criterion(int number, const std::string& title, double budget_seconds,
               const std::function<void(Check&)>& body) {
    Check check;
    const auto start = Clock::now();
    try {
        body(check);
    } catch (const std::exception& e) {
        check.problems.push_back(std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    if (budget_seconds > 0 && elapsed >= budget_seconds) {
        std::ostringstream msg;
        msg << "runtime " << elapsed << "s exceeds budget " << budget_seconds << "s";
        check.problems.push_back(msg.str());
    }
    std::ostringstream line;
    line << (check.problems.empty() ? "[PASS]" : "[FAIL]") << " criterion " << number << ": "
         << title << " (" << static_cast<int>(elapsed * 1000.0) << " ms)";
    std::cout << line.str() << "\n";
    for (const std::string& p : check.problems) {
        std::cout << "       - " << p << "\n";
        ++g_failed;
    }
}

std::vector<Block> lenient_blocks(const std::string& path, Check& check) {
    const DocumentResult doc = parse_document(read_file(path), ParseMode::Lenient);
    std::vector<Block> blocks;
    for (const ParseResult& r : doc.blocks) {
        if (r.block) blocks.push_back(*r.block);
    }
    check.require(!has_errors(doc.all_diagnostics()), path + ": parse errors");
    check.require(blocks.size() == doc.blocks.size(), path + ": some blocks failed to parse");
    return blocks;
}

std::vector<std::string> lint_codes(const std::string& path, Check& check) {
    std::vector<Block> blocks = lenient_blocks(path, check);
    std::vector<std::string> codes;
    for (const Diagnostic& d : validate_document(blocks, RuleSet::defaults())) {
        codes.push_back(d.code);
    }
    std::sort(codes.begin(), codes.end());
    return codes;
}

// --- criterion 1 -----------------------------------------------------------

void fixture_corpus(Check& check) {
    const char* fixtures[] = {
        "paper/disinfo_analysis.syn", "paper/philosophy_analysis.syn",
        "paper/modify_reasoning.syn", "paper/response_bulletpoint.syn",
        "paper/medical_trace.syn",    "paper/scientific_trace.syn",
        "paper/recidivism_trace.syn",
    };
    for (const char* name : fixtures) {
        const std::string path = kFixtures + "/" + name;
        const ParseResult r = parse_block(read_file(path), ParseMode::Lenient);
        check.require(r.block.has_value() && !has_errors(r.diagnostics),
                      std::string(name) + ": lenient parse reported errors");
        if (!r.block) continue;
        const auto diags = validate_block(*r.block, RuleSet::defaults());
        check.require(!has_errors(diags), std::string(name) + ": validation errors");
    }

    const ParseResult r =
        parse_block(read_file(kFixtures + "/paper/disinfo_analysis.syn"), ParseMode::Lenient);
    if (!r.block) {
        check.require(false, "complete example failed to parse");
        return;
    }
    const Block& b = *r.block;
    check.require(b.task == "DISINFO_ANALYSIS", "task mismatch");
    check.require(b.agent == "AI_DETECTOR", "agent mismatch");
    check.require(b.factors.size() == 2, "factor count mismatch");
    check.require(b.feel == std::optional<std::string>("urgent"), "feel mismatch");
    check.require(b.trace == std::vector<std::string>{"lip_sync", "background_artifacts"},
                  "trace mismatch");
    check.require(b.trace_fe.size() == 2 && b.trace_fe[0].label == "lip_sync" &&
                      b.trace_fe[0].confidence == 0.94 &&
                      b.trace_fe[1].label == "background_artifacts" &&
                      b.trace_fe[1].confidence == 0.87,
                  "trace_fe mismatch");
    check.require(b.response_format && b.response_format->kind == ResponseKind::Structured,
                  "response format mismatch");
    check.require(b.coordination.has_value(), "missing coordination");
    if (b.coordination) {
        check.require(b.coordination->cot_id == "COT_a1b2c", "cot id mismatch");
        check.require(b.coordination->target_agent == "AI_FORENSICS", "target mismatch");
        check.require(b.coordination->ctx_items.size() == 2, "ctx item count mismatch");
    }
}

// --- criterion 2 -----------------------------------------------------------

void round_trip(Check& check) {
    testgen::BlockGenerator gen(0xACCE1);
    int failures = 0;
    for (int i = 0; i < 1000; ++i) {
        const testgen::Generated g = gen.next();
        const ParseResult first = parse_block(g.text, ParseMode::Strict);
        if (!first.ok()) {
            ++failures;
            continue;
        }
        const std::string formatted = format_canonical(*first.block);
        const ParseResult second = parse_block(formatted, ParseMode::Strict);
        if (!second.ok() || !structurally_equal(*first.block, *second.block) ||
            format_canonical(*second.block) != formatted) {
            ++failures;
        }
    }
    check.require(failures == 0,
                  std::to_string(failures) + " of 1000 generated blocks failed the round-trip");
}

// --- criterion 3 -----------------------------------------------------------

void degradation_example(Check& check) {
    const Confidence out =
        propagate(Confidence(0.95), PropagationPolicy::fixed_decrement(0.02), TrustFactor(1.0));
    check.require(std::abs(out.value() - 0.93) <= 1e-9,
                  "fixed_decrement(0.02) on 0.95 is not 0.93 within 1e-9");
}

// --- criterion 4 -----------------------------------------------------------

void humility_suite(Check& check) {
    std::mt19937_64 rng(0xACCE4);
    std::uniform_real_distribution<double> conf(0.0, 1.0);
    std::uniform_real_distribution<double> coherence(1e-12, 1.0);
    std::uniform_real_distribution<double> tf(0.9, 1.0);
    std::uniform_real_distribution<double> trust(0.5, 1.0);
    std::uniform_real_distribution<double> dec(0.0, 0.1);

    int chain_failures = 0;
    for (int i = 0; i < 10000; ++i) {
        const int n = 1 + static_cast<int>(rng() % 10);
        std::vector<Confidence> chain;
        chain.reserve(static_cast<std::size_t>(n));
        double min_c = 1.0;
        for (int k = 0; k < n; ++k) {
            const double c = conf(rng);
            min_c = std::min(min_c, c);
            chain.emplace_back(c);
        }
        const Confidence out = compose_chain(chain, CoherenceFactor(coherence(rng)));
        if (out.value() > min_c + 1e-12) ++chain_failures;
    }
    check.require(chain_failures == 0,
                  std::to_string(chain_failures) + " of 10000 chains exceeded min(chain)");

    int prop_failures = 0;
    for (int i = 0; i < 10000; ++i) {
        const Confidence c(conf(rng));
        const PropagationPolicy policy = (i % 2 == 0)
                                             ? PropagationPolicy::multiplicative(tf(rng))
                                             : PropagationPolicy::fixed_decrement(dec(rng));
        const Confidence out = propagate(c, policy, TrustFactor(trust(rng)));
        if (out.value() > c.value()) ++prop_failures;
    }
    check.require(prop_failures == 0,
                  std::to_string(prop_failures) + " of 10000 propagations exceeded the input");
}

// --- criterion 5 -----------------------------------------------------------

void authority_anchors(Check& check) {
    const AuthorityWeights weights =
        AuthorityWeights::from_config(read_file(kFixtures + "/authority/default.weights"));
    const struct {
        const char* profile;
        double anchor;
    } anchors[] = {
        {"authority/ethical.profile", 0.9},
        {"authority/medical.profile", 0.6},
        {"authority/financial.profile", 0.3},
        {"authority/data_processing.profile", 0.1},
    };
    for (const auto& a : anchors) {
        const AuthorityContext ctx =
            authority_context_from_config(read_file(kFixtures + "/" + a.profile));
        const double alpha = authority(ctx, weights);
        std::ostringstream msg;
        msg << a.profile << ": alpha " << alpha << " not within 0.1 of " << a.anchor;
        check.require(std::abs(alpha - a.anchor) <= 0.1, msg.str());
    }

    std::mt19937_64 rng(0xACCE5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const double e = unit(rng), c = unit(rng), v = unit(rng), t = unit(rng);
        const double alpha = authority(AuthorityContext(e, c, v, t), weights);
        if (alpha < 0.0 || alpha > 1.0) ++violations;
        const double dc = unit(rng) * (1.0 - c);
        if (authority(AuthorityContext(e, c + dc, v, t), weights) < alpha - 1e-12) ++violations;
        const double de = unit(rng) * (1.0 - e);
        if (authority(AuthorityContext(e + de, c, v, t), weights) > alpha + 1e-12) ++violations;
    }
    check.require(violations == 0,
                  std::to_string(violations) + " monotonicity/clamping violations");
}

// --- criterion 6 -----------------------------------------------------------

void coordination_semantics(Check& check) {
    const std::string scenario_path = kFixtures + "/scenario/disinfo.syn";
    const std::string manifest_path = kFixtures + "/scenario/disinfo.manifest";

    const DocumentResult doc = parse_document(read_file(scenario_path), ParseMode::Lenient);
    check.require(doc.ok(), "scenario failed to parse");
    if (!doc.ok()) return;

    AgentRegistry registry;
    registry.register_agent(
        AgentProfile{"AI_DETECTOR", TrustFactor(1.0), PropagationPolicy::multiplicative(0.95)});
    registry.register_agent(
        AgentProfile{"AI_FORENSICS", TrustFactor(1.0), PropagationPolicy::fixed_decrement(0.02)});

    std::vector<ScenarioEvent> events;
    for (const ParseResult& r : doc.blocks) {
        events.push_back(ScenarioEvent{"AI_DETECTOR", *r.block});
    }
    const SimulationResult result = simulate(std::move(registry), events);
    check.require(!result.error.has_value(), "simulation reported an error");
    check.require(result.log.handoffs.size() == 1, "expected exactly one handoff record");

    // ctx id equals cot id in every coordination block that produced a record
    for (const ParseResult& r : doc.blocks) {
        if (r.block->coordination) {
            check.require(r.block->coordination->ctx_id == r.block->coordination->cot_id,
                          "ctx id differs from cot id");
        }
    }

    if (!result.log.handoffs.empty()) {
        const HandoffRecord& record = result.log.handoffs.front();
        check.require(record.cot_id == "COT_a1b2c", "record lost the COT id");
        check.require(record.sender == "AI_DETECTOR", "record sender mismatch");

        const auto it = result.log.traces.find(record.receiver);
        check.require(it != result.log.traces.end(), "receiver has no composed trace");
        if (it != result.log.traces.end()) {
            const auto& steps = it->second.steps();
            check.require(steps.size() == record.transferred_items.size(),
                          "receiver trace does not contain the appended steps");
            for (const TraceStep& s : steps) {
                check.require(s.origin_agent == record.sender,
                              "transferred step lost its origin agent");
                check.require(s.hop_index == 1, "transferred step hop index is not 1");
            }
        }

        // quantified transferred confidences never exceed the originals
        const Coordination& coord = *doc.blocks.front().block->coordination;
        for (std::size_t i = 0; i < coord.ctx_items.size(); ++i) {
            const auto& original = coord.ctx_items[i].confidence;
            const auto& transferred = record.transferred_items[i].confidence;
            check.require(original.has_value() == transferred.has_value(),
                          "quantification changed in transfer");
            if (original && transferred) {
                check.require(*transferred <= *original + 1e-12,
                              "transferred confidence exceeds the original");
            }
        }
    }

    // two runs produce byte-identical exported logs (through the CLI surface)
    std::istringstream empty_in1, empty_in2;
    std::ostringstream out1, err1, out2, err2;
    const int s1 = cli::run({"simulate", scenario_path, manifest_path}, empty_in1, out1, err1);
    const int s2 = cli::run({"simulate", scenario_path, manifest_path}, empty_in2, out2, err2);
    check.require(s1 == 0 && s2 == 0, "simulate subcommand failed");
    check.require(out1.str() == out2.str(), "exported logs differ between runs");
}

// --- criterion 7 -----------------------------------------------------------

void lint_detection(Check& check) {
    const std::map<std::string, std::vector<std::string>> violations = {
        {"violations/v01_conf_range.syn", {"E-CONF-001"}},
        {"violations/v02_conf_range.syn", {"E-CONF-001"}},
        {"violations/v03_conf_range_ctx.syn", {"E-CONF-001"}},
        {"violations/v04_conf_range.syn", {"E-CONF-001"}},
        {"violations/v05_conf_range.syn", {"E-CONF-001"}},
        {"violations/v06_ctx_mismatch.syn", {"E-CTX-001"}},
        {"violations/v07_ctx_mismatch.syn", {"E-CTX-001"}},
        {"violations/v08_ctx_mismatch.syn", {"E-CTX-001"}},
        {"violations/v09_ctx_mismatch.syn", {"E-CTX-001"}},
        {"violations/v10_ctx_mismatch.syn", {"E-CTX-001"}},
        {"violations/v11_dangling_ctx.syn", {"E-COT-001", "E-CTX-001"}},
        {"violations/v12_dangling_ctx.syn", {"E-COT-001", "E-CTX-001"}},
        {"violations/v13_dangling_ctx.syn", {"E-COT-001", "E-CTX-001"}},
        {"violations/v14_dangling_ctx.syn", {"E-COT-001", "E-CTX-001"}},
        {"violations/v15_dangling_ctx.syn", {"E-COT-001", "E-CTX-001"}},
        {"violations/v16_only_exclusion.syn", {"W-CTRL-001"}},
        {"violations/v17_only_exclusion.syn", {"W-CTRL-001"}},
        {"violations/v18_only_exclusion.syn", {"W-CTRL-001"}},
        {"violations/v19_only_exclusion.syn", {"W-CTRL-001"}},
        {"violations/v20_only_exclusion.syn", {"W-CTRL-001"}},
    };
    for (const auto& [name, expected] : violations) {
        const std::vector<std::string> found = lint_codes(kFixtures + "/" + name, check);
        check.require(found == expected, name + ": expected exactly the seeded codes");
    }

    // zero false positives: clean fixtures produce exactly their documented sets
    const std::map<std::string, std::vector<std::string>> cleans = {
        {"paper/disinfo_analysis.syn", {"W-CTX-001"}},
        {"paper/philosophy_analysis.syn", {}},
        {"paper/modify_reasoning.syn", {}},
        {"paper/response_bulletpoint.syn", {}},
        {"paper/medical_trace.syn", {"W-TRACE-001"}},
        {"paper/scientific_trace.syn", {"W-TRACE-001", "W-TRACE-001"}},
        {"paper/recidivism_trace.syn", {"W-TRACE-001"}},
        {"paper/thermal_lines.syn", {}},
    };
    for (const auto& [name, expected] : cleans) {
        const std::vector<std::string> found = lint_codes(kFixtures + "/" + name, check);
        check.require(found == expected, name + ": unexpected diagnostics on a clean fixture");
        for (const std::string& code : found) {
            check.require(code.front() == 'W', name + ": error-severity code " + code);
        }
    }
}

}  // namespace

int main() {
    criterion(1, "paper fixture corpus parses clean in lenient mode", 1.0, fixture_corpus);
    criterion(2, "round-trip and fixpoint over 1000 generated blocks", 10.0, round_trip);
    criterion(3, "fixed-decrement degradation reproduces 0.95 -> 0.93", 0.0,
              degradation_example);
    criterion(4, "epistemic humility over 10000 chains and propagations", 5.0, humility_suite);
    criterion(5, "authority anchors and monotonicity contracts", 0.0, authority_anchors);
    criterion(6, "coordination semantics on the published scenario", 0.0,
              coordination_semantics);
    criterion(7, "lint detection: full recall, no false positives", 0.0, lint_detection);

    if (g_failed == 0) {
        std::cout << "all acceptance criteria passed\n";
        return 0;
    }
    std::cout << g_failed << " acceptance problem(s)\n";
    return 1;
}
