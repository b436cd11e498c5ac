#pragma once

// Command-line front end. `run` is the whole program minus process setup so
// the tests can drive it in-process.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "hsolve/errors.hpp"
#include "hsolve/verify.hpp"

namespace hsolve::cli {

enum ExitCode : int { kOk = 0, kNotConverged = 1, kFailure = 2 };

/// args excludes the program name. JSON goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

nlohmann::json error_to_json(const std::exception& e);
nlohmann::json to_json(const SolverConfig& c);
nlohmann::json to_json(const LevelStats& s);
nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const ScalingReport& r);

/// One value per whitespace-separated token; `%` starts a comment line.
Vector load_vector(const std::string& path);

}  // namespace hsolve::cli
