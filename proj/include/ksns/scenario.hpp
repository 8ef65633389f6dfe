#pragma once

// Scenario orchestration behind the command-line subcommands. Each scenario
// returns a list of verdicts; non-gating verdicts are recorded but do not
// decide the exit code.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ksns/config.hpp"
#include "ksns/integrator.hpp"

namespace ksns {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
  bool gating = true;
};

struct ScenarioReport {
  std::vector<Check> checks;
  std::vector<std::string> notes;

  void add(std::string name, bool pass, std::string detail, bool gating = true) {
    checks.push_back({std::move(name), pass, std::move(detail), gating});
  }
  bool passed() const;
};

/// "PASS name: detail" / "FAIL name: detail"; non-gating lines are tagged
/// "(recorded)". Notes are printed with a "NOTE" prefix.
void print_report(std::ostream& os, const ScenarioReport& report);

GivenData make_data(const Grid& grid, const RunConfig& cfg);
RunOptions run_options(const RunConfig& cfg);

/// Writes diagnostics.csv and snapshots/<field>_<index>.csv under dir.
void write_run_outputs(const std::filesystem::path& dir, const RunResult& result);

/// Scenarios. `out` is created if missing. RunAborted propagates.
ScenarioReport scenario_run(const RunConfig& cfg, const std::filesystem::path& out);
ScenarioReport scenario_eigen(const RunConfig& cfg, std::ostream& csv);
ScenarioReport scenario_decay(const RunConfig& cfg, const std::filesystem::path& out);
ScenarioReport scenario_lipschitz(const RunConfig& cfg, const std::filesystem::path& out, int threads);
ScenarioReport scenario_nonneg(const RunConfig& cfg, const std::filesystem::path& out);

}  // namespace ksns
