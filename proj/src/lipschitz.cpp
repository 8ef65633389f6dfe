#include "ksns/lipschitz.hpp"

#include <exception>
#include <thread>

#include "ksns/presets.hpp"

namespace ksns {

LipschitzResult lipschitz_experiment(const Grid& grid, const GivenData& base, const GivenData& perturbed,
                                     const DiagnosticsConfig& cfg, const RunOptions& opts, int threads) {
  LipschitzResult out;
  out.data_gap = smallness_functional(grid, data_difference(perturbed, base), cfg, opts.T, opts.dt);

  RunResult a, b;
  if (threads >= 2) {
    std::exception_ptr err;
    std::thread worker([&] {
      try {
        b = run(grid, perturbed, opts);
      } catch (...) {
        err = std::current_exception();
      }
    });
    try {
      a = run(grid, base, opts);
    } catch (...) {
      worker.join();
      throw;
    }
    worker.join();
    if (err) std::rethrow_exception(err);
  } else {
    a = run(grid, base, opts);
    b = run(grid, perturbed, opts);
  }

  out.diff_norm = weighted_solution_norm(grid, difference(shifted(b.trajectory), shifted(a.trajectory)), cfg);
  if (out.data_gap == 0.0) {
    out.degenerate = true;
    out.ratio = 0.0;
  } else {
    out.ratio = out.diff_norm / out.data_gap;
  }
  return out;
}

}  // namespace ksns
