#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "geoconvex/report.hpp"
#include "geoconvex/theorems.hpp"

namespace geoconvex::cli {

inline constexpr int kExitHolds = 0;
inline constexpr int kExitViolated = 1;
inline constexpr int kExitPremiseOrDomain = 2;
inline constexpr int kExitConfig = 3;

/// Exit code for a top-level verdict.
int exit_code(Verdict v);

nlohmann::json to_json(const Report& r);
nlohmann::json to_json(const TheoremReport& t);

/// Compact JSON with sorted keys and shortest round-trip floats, followed by
/// a newline.
std::string dump(const nlohmann::json& j);

/// Human-readable catalog: manifolds, diffeomorphisms, theorems, grammar.
std::string catalog();

/// Runs the command line `args` (without the program name). Reports go to
/// `out` (or --out), errors as JSON to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geoconvex::cli
