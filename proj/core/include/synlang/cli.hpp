#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace synlang::cli {

// Exit status contract: 0 = success / no error diagnostics,
// 1 = error-severity diagnostics (or a failed check / simulation),
// 2 = usage or IO error.
constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitUsage = 2;

// Subcommands: parse, lint, fmt, export, simulate, authority.
// Results go to `out`; diagnostics and errors go to `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace synlang::cli
