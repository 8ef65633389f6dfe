#pragma once

// Run configuration: `key = value` lines, `#` comments, `[section]` headers.
// A key outside any section is matched by its bare name when that name is
// unique across sections. Unknown keys, repeated keys and out-of-range
// values are errors naming the key as `section.key`.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "ksns/diagnostics.hpp"
#include "ksns/grid.hpp"
#include "ksns/presets.hpp"

namespace ksns {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  DomainSpec domain{1.0, 1.0, 32, 32};
  double dt = 1e-3;
  double T = 1.0;
  double theta = 1.0;

  double tol = 1e-10;
  int max_iter = 20000;
  double eigen_tol = 1e-8;

  bool picard = false;
  int picard_k_max = 5;
  double picard_tol = 1e-9;

  DataSelector data;
  SensitivitySelector sensitivity;
  PotentialSelector potential;
  ForcingSelector forcing;

  DiagnosticsConfig diagnostics;
  double window_start = 1.0 / 3.0;  // decay fit window [window_start*T, T]

  std::string out_dir;  // empty: --out or KSNS_OUT decide
  int snapshot_stride = 0;
  double blowup_ceiling = 1e6;

  double lipschitz_delta = 1e-3;
  double lipschitz_delta_small = 1e-4;
  double lipschitz_ratio_ceiling = 1e3;
};

/// Closed-form eigenvalues of the discrete 5-point operators on the grid;
/// used to validate lambda1/lambda2 before any solver state exists.
double discrete_lambda_neumann(const DomainSpec& d);
double discrete_lambda_dirichlet(const DomainSpec& d);

RunConfig parse_config(std::istream& is, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Cross-field checks; parse_config calls it. Throws ConfigError.
void validate(RunConfig& cfg, bool lambda1_given);

/// The resolved configuration in the input syntax.
std::string echo(const RunConfig& cfg);

}  // namespace ksns
