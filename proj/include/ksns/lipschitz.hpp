#pragma once

// Lipschitz experiment: run two data sets, compare the shifted trajectories
// in the weighted solution norm against the smallness functional of the
// data difference.

#include "ksns/diagnostics.hpp"
#include "ksns/integrator.hpp"

namespace ksns {

struct LipschitzResult {
  double ratio = 0.0;      // diff_norm / data_gap, 0 when degenerate
  double data_gap = 0.0;   // smallness functional of the data difference
  double diff_norm = 0.0;  // weighted norm of the trajectory difference
  bool degenerate = false; // data_gap == 0
};

/// Both runs use `opts` (snapshot_stride must be > 0 for a meaningful norm).
/// threads >= 2 runs them concurrently; the result does not depend on it.
/// Blow-up in either run propagates as RunAborted.
LipschitzResult lipschitz_experiment(const Grid& grid, const GivenData& base, const GivenData& perturbed,
                                     const DiagnosticsConfig& cfg, const RunOptions& opts, int threads = 1);

}  // namespace ksns
