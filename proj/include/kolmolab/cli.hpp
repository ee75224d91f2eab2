#pragma once

// Command-line front end. `dispatch` is the whole program minus process
// plumbing, so tests drive it in-process.
//
// Exit codes: 0 success, 1 invariant or claim violation, 2 usage or input
// error.

#include <iosfwd>
#include <string>
#include <vector>

#include "kolmolab/trace.hpp"

namespace kolmolab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// Everything a `sim` run depends on. A trace carries the same two fields,
/// so either file re-runs the simulation.
struct RunConfig {
  std::string construction;  // complex-set | gap | hard-instances | icc
  Json params = Json::object();

  Json to_json() const { return {{"construction", construction}, {"params", params}}; }
  static RunConfig from_json(const Json& j);
  static RunConfig load_file(const std::string& path);
};

/// Runs a simulation from its configuration. Throws kParse on a malformed
/// configuration.
StageTrace run_sim(const RunConfig& config);

/// Re-derives the checks of any trace, by construction name.
std::vector<CheckResult> check_trace(const StageTrace& trace);

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kolmolab
