#include "synlang/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "synlang/coordination.hpp"
#include "synlang/formatter.hpp"
#include "synlang/json_io.hpp"
#include "synlang/kv_config.hpp"
#include "synlang/parser.hpp"
#include "synlang/validate.hpp"

#if !defined(_WIN32)
#include <unistd.h>
#endif

namespace synlang::cli {

namespace {

constexpr std::string_view kUsage =
    "usage: synlang <command> [options]\n"
    "\n"
    "commands:\n"
    "  parse FILE [--lenient]          print a structural summary per block\n"
    "  lint FILE [--rules CFG] [--lenient]\n"
    "                                  print diagnostics; exit 1 on errors\n"
    "  fmt FILE [--check] [--lenient]  rewrite to canonical form\n"
    "  export FILE [--format json] [--lenient]\n"
    "                                  emit the machine-readable tree\n"
    "  simulate SCENARIO MANIFEST      run the coordination scenario\n"
    "  authority --profile FILE [--weights FILE]\n"
    "                                  print the cognitive authority value\n";

bool color_enabled(const std::ostream& err) {
    if (std::getenv("NO_COLOR") != nullptr) return false;
#ifdef _WIN32
    return false;
#else
    return &err == &std::cerr && isatty(fileno(stderr));
#endif
}

std::optional<std::string> read_file(const std::string& path, std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "synlang: cannot open '" << path << "'\n";
        return std::nullopt;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void print_diagnostics(const std::vector<Diagnostic>& diags, const std::string& file,
                       std::ostream& err) {
    const bool color = color_enabled(err);
    for (const Diagnostic& d : diags) {
        err << render(d, file, color) << '\n';
    }
}

struct FileArgs {
    std::string file;
    ParseMode mode = ParseMode::Strict;
    std::optional<std::string> rules;
    bool check = false;
    std::string format = "json";
    bool ok = true;
};

FileArgs parse_file_args(const std::vector<std::string>& args, std::size_t from,
                         std::ostream& err) {
    FileArgs out;
    for (std::size_t i = from; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--lenient") {
            out.mode = ParseMode::Lenient;
        } else if (a == "--check") {
            out.check = true;
        } else if (a == "--rules") {
            if (i + 1 >= args.size()) {
                err << "synlang: --rules requires a file argument\n";
                out.ok = false;
                return out;
            }
            out.rules = args[++i];
        } else if (a == "--format") {
            if (i + 1 >= args.size()) {
                err << "synlang: --format requires a value\n";
                out.ok = false;
                return out;
            }
            out.format = args[++i];
        } else if (!a.empty() && a.front() == '-') {
            err << "synlang: unknown option '" << a << "'\n";
            out.ok = false;
            return out;
        } else if (out.file.empty()) {
            out.file = a;
        } else {
            err << "synlang: unexpected argument '" << a << "'\n";
            out.ok = false;
            return out;
        }
    }
    if (out.file.empty()) {
        err << "synlang: missing file argument\n";
        out.ok = false;
    }
    return out;
}

int cmd_parse(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const FileArgs opts = parse_file_args(args, 1, err);
    if (!opts.ok) return kExitUsage;
    const auto source = read_file(opts.file, err);
    if (!source) return kExitUsage;

    const DocumentResult doc = parse_document(*source, opts.mode);
    const std::vector<Diagnostic> diags = doc.all_diagnostics();
    print_diagnostics(diags, opts.file, err);
    int index = 0;
    for (const ParseResult& r : doc.blocks) {
        ++index;
        out << "block " << index << '\n';
        if (!r.block) {
            out << "  (failed to parse)\n";
            continue;
        }
        const Block& b = *r.block;
        out << "  task: " << b.task << '\n';
        out << "  agent: " << b.agent << '\n';
        out << "  context: " << b.context << '\n';
        out << "  query: " << b.query << '\n';
        out << "  factors: " << b.factors.size() << '\n';
        if (b.feel) out << "  feel: " << *b.feel << '\n';
        if (!b.trace.empty()) {
            out << "  trace:";
            for (const std::string& id : b.trace) out << ' ' << id;
            out << '\n';
        }
        out << "  trace_fe: " << b.trace_fe.size() << '\n';
        if (b.response_format) out << "  response_format: " << b.response_format->name << '\n';
        out << "  controls: " << b.controls.size() << '\n';
        if (b.coordination) {
            out << "  coordination: " << b.coordination->cot_id << " -> "
                << b.coordination->target_agent << " (" << b.coordination->ctx_items.size()
                << " ctx items)\n";
        }
    }
    return has_errors(diags) ? kExitDiagnostics : kExitOk;
}

int cmd_lint(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    (void)out;
    const FileArgs opts = parse_file_args(args, 1, err);
    if (!opts.ok) return kExitUsage;
    const auto source = read_file(opts.file, err);
    if (!source) return kExitUsage;

    RuleSet rules = RuleSet::defaults();
    if (opts.rules) {
        const auto config = read_file(*opts.rules, err);
        if (!config) return kExitUsage;
        try {
            rules = RuleSet::from_config(*config);
        } catch (const std::exception& e) {
            err << "synlang: " << *opts.rules << ": " << e.what() << '\n';
            return kExitUsage;
        }
    }

    const DocumentResult doc = parse_document(*source, opts.mode);
    std::vector<Diagnostic> diags = doc.all_diagnostics();
    std::vector<Block> blocks;
    for (const ParseResult& r : doc.blocks) {
        if (r.block) blocks.push_back(*r.block);
    }
    std::vector<Diagnostic> semantic = validate_document(blocks, rules);
    diags.insert(diags.end(), semantic.begin(), semantic.end());
    print_diagnostics(diags, opts.file, err);
    return has_errors(diags) ? kExitDiagnostics : kExitOk;
}

int cmd_fmt(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    (void)out;
    const FileArgs opts = parse_file_args(args, 1, err);
    if (!opts.ok) return kExitUsage;
    const auto source = read_file(opts.file, err);
    if (!source) return kExitUsage;

    const DocumentResult doc = parse_document(*source, opts.mode);
    const std::vector<Diagnostic> diags = doc.all_diagnostics();
    if (has_errors(diags)) {
        print_diagnostics(diags, opts.file, err);
        return kExitDiagnostics;
    }
    std::vector<Block> blocks;
    for (const ParseResult& r : doc.blocks) {
        blocks.push_back(*r.block);
    }
    const std::string canonical = format_canonical(blocks);
    if (opts.check) {
        if (canonical != *source) {
            err << opts.file << ": not canonical\n";
            return kExitDiagnostics;
        }
        return kExitOk;
    }
    if (canonical != *source) {
        std::ofstream fout(opts.file, std::ios::binary | std::ios::trunc);
        if (!fout) {
            err << "synlang: cannot write '" << opts.file << "'\n";
            return kExitUsage;
        }
        fout << canonical;
    }
    return kExitOk;
}

int cmd_export(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const FileArgs opts = parse_file_args(args, 1, err);
    if (!opts.ok) return kExitUsage;
    if (opts.format != "json") {
        err << "synlang: unsupported export format '" << opts.format << "'\n";
        return kExitUsage;
    }
    const auto source = read_file(opts.file, err);
    if (!source) return kExitUsage;

    const DocumentResult doc = parse_document(*source, opts.mode);
    const std::vector<Diagnostic> diags = doc.all_diagnostics();
    if (has_errors(diags)) {
        print_diagnostics(diags, opts.file, err);
        return kExitDiagnostics;
    }
    if (doc.blocks.size() == 1) {
        out << export_json(*doc.blocks.front().block);
    } else {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const ParseResult& r : doc.blocks) {
            arr.push_back(to_json(*r.block));
        }
        out << arr.dump(2) << '\n';
    }
    return kExitOk;
}

struct Manifest {
    AgentRegistry registry;
    std::map<std::size_t, std::string> senders;
};

// Manifest keys: agent.NAME.trust, agent.NAME.policy (multiplicative |
// fixed_decrement), agent.NAME.transmission, agent.NAME.decrement, and
// block.INDEX.sender.
std::optional<Manifest> load_manifest(const std::string& text, std::ostream& err) {
    struct AgentConfig {
        double trust = 1.0;
        std::string policy = "multiplicative";
        double transmission = 1.0;
        double decrement = 0.02;
    };
    std::map<std::string, AgentConfig> agents;
    std::map<std::size_t, std::string> senders;
    try {
        for (const KvEntry& entry : parse_kv(text)) {
            const std::string& key = entry.key;
            if (key.rfind("agent.", 0) == 0) {
                const std::size_t dot = key.rfind('.');
                const std::string name = key.substr(6, dot - 6);
                const std::string field = key.substr(dot + 1);
                AgentConfig& cfg = agents[name];
                if (field == "trust") {
                    cfg.trust = std::stod(entry.value);
                } else if (field == "policy") {
                    cfg.policy = entry.value;
                } else if (field == "transmission") {
                    cfg.transmission = std::stod(entry.value);
                } else if (field == "decrement") {
                    cfg.decrement = std::stod(entry.value);
                } else {
                    err << "synlang: manifest line " << entry.line << ": unknown agent field '"
                        << field << "'\n";
                    return std::nullopt;
                }
            } else if (key.rfind("block.", 0) == 0) {
                const std::size_t dot = key.rfind('.');
                const std::string field = key.substr(dot + 1);
                if (field != "sender") {
                    err << "synlang: manifest line " << entry.line << ": unknown block field '"
                        << field << "'\n";
                    return std::nullopt;
                }
                const std::size_t index = std::stoul(key.substr(6, dot - 6));
                senders[index] = entry.value;
            } else {
                err << "synlang: manifest line " << entry.line << ": unknown key '" << key
                    << "'\n";
                return std::nullopt;
            }
        }
        Manifest manifest;
        manifest.senders = std::move(senders);
        for (const auto& [name, cfg] : agents) {
            if (cfg.policy != "fixed_decrement" && cfg.policy != "multiplicative") {
                err << "synlang: manifest: unknown policy '" << cfg.policy << "' for agent '"
                    << name << "'\n";
                return std::nullopt;
            }
            const PropagationPolicy policy =
                cfg.policy == "fixed_decrement"
                    ? PropagationPolicy::fixed_decrement(cfg.decrement)
                    : PropagationPolicy::multiplicative(cfg.transmission);
            if (!manifest.registry.register_agent(
                    AgentProfile{name, TrustFactor(cfg.trust), policy})) {
                err << "synlang: manifest: duplicate agent '" << name << "'\n";
                return std::nullopt;
            }
        }
        return manifest;
    } catch (const std::exception& e) {
        err << "synlang: manifest: " << e.what() << '\n';
        return std::nullopt;
    }
}

int cmd_simulate(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.size() != 3) {
        err << "synlang: simulate requires SCENARIO and MANIFEST files\n";
        return kExitUsage;
    }
    const auto scenario_text = read_file(args[1], err);
    if (!scenario_text) return kExitUsage;
    const auto manifest_text = read_file(args[2], err);
    if (!manifest_text) return kExitUsage;

    // Paper-style scenarios need continuation joining, so simulate always
    // parses leniently.
    const DocumentResult doc = parse_document(*scenario_text, ParseMode::Lenient);
    const std::vector<Diagnostic> diags = doc.all_diagnostics();
    if (has_errors(diags)) {
        print_diagnostics(diags, args[1], err);
        return kExitDiagnostics;
    }
    const auto manifest = load_manifest(*manifest_text, err);
    if (!manifest) return kExitUsage;

    std::vector<ScenarioEvent> events;
    for (std::size_t i = 0; i < doc.blocks.size(); ++i) {
        const auto it = manifest->senders.find(i);
        if (it == manifest->senders.end()) {
            err << "synlang: manifest assigns no sender to block " << i << '\n';
            return kExitUsage;
        }
        events.push_back(ScenarioEvent{it->second, *doc.blocks[i].block});
    }
    const SimulationResult result = simulate(manifest->registry, events);
    if (result.error) {
        err << "synlang: simulation failed [" << result.error->code << "]: "
            << result.error->message << '\n';
        return kExitDiagnostics;
    }
    out << export_json(result.log);
    return kExitOk;
}

int cmd_authority(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::optional<std::string> profile_path;
    std::optional<std::string> weights_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--profile" && i + 1 < args.size()) {
            profile_path = args[++i];
        } else if (args[i] == "--weights" && i + 1 < args.size()) {
            weights_path = args[++i];
        } else {
            err << "synlang: unknown or incomplete option '" << args[i] << "'\n";
            return kExitUsage;
        }
    }
    if (!profile_path) {
        err << "synlang: authority requires --profile FILE\n";
        return kExitUsage;
    }
    const auto profile_text = read_file(*profile_path, err);
    if (!profile_text) return kExitUsage;
    try {
        AuthorityWeights weights = AuthorityWeights::defaults();
        if (weights_path) {
            const auto weights_text = read_file(*weights_path, err);
            if (!weights_text) return kExitUsage;
            weights = AuthorityWeights::from_config(*weights_text);
        }
        const AuthorityContext ctx = authority_context_from_config(*profile_text);
        const double alpha = authority(ctx, weights);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", alpha);
        out << buf << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        err << "synlang: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
    (void)in;
    if (args.empty()) {
        err << kUsage;
        return kExitUsage;
    }
    const std::string& command = args.front();
    if (command == "parse") return cmd_parse(args, out, err);
    if (command == "lint") return cmd_lint(args, out, err);
    if (command == "fmt") return cmd_fmt(args, out, err);
    if (command == "export") return cmd_export(args, out, err);
    if (command == "simulate") return cmd_simulate(args, out, err);
    if (command == "authority") return cmd_authority(args, out, err);
    if (command == "--help" || command == "-h" || command == "help") {
        out << kUsage;
        return kExitOk;
    }
    err << "synlang: unknown command '" << command << "'\n" << kUsage;
    return kExitUsage;
}

}  // namespace synlang::cli
