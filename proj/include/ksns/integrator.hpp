#pragma once

// Coupled IMEX integrator for the chemotaxis-fluid system.
//
// One step advances (n, c, u) in the order n -> c -> u:
//   n: zero-mean Neumann heat step for n - n_bar0 whose boundary flux and
//      divergence forcing are the chemotactic flux n S grad c, with the
//      upwind advection -div(u (n - n_bar0)) as volume forcing;
//   c: shifted heat step (1 - Lap) with right-hand side n - div(u c);
//   u: Stokes step with force -(u.grad)u + (n' - n_bar0) grad(phi) + f,
//      using the freshly updated n'.
// Diffusion is implicit, transport and chemotaxis explicit (frozen at the
// coefficient iterate). Picard iteration re-freezes the explicit terms at
// the latest iterate until the step map reaches its fixed point.

#include <stdexcept>
#include <string>
#include <vector>

#include "ksns/diagnostics.hpp"
#include "ksns/linstep.hpp"
#include "ksns/model.hpp"

namespace ksns {

struct ShiftedState {
  double t = 0.0;
  ScalarField n_tilde;  // n - n_bar0
  ScalarField c_tilde;  // c - (1 - e^{-t}) n_bar0
  VectorField u;
  double n_bar0 = 0.0;
};

ShiftedState shift_transform(const SimState& state);
SimState unshift(const ShiftedState& shifted);

/// n S(t) grad c on cells, plus upwinded face values on every face. On
/// boundary faces the value is n (extrapolated to the face) times
/// S grad c . e with the one-sided face gradient of c; these are the
/// fluxes handed to the n-equation's boundary condition.
VectorField chemotactic_flux(const Grid& grid, const ScalarField& n, const ScalarField& c,
                             const SensitivitySpec& S, double t);

/// First-order upwind div(U phi) for face velocities U.
ScalarField upwind_transport(const Grid& grid, const FaceFlux& velocity, const ScalarField& phi);

struct StepOptions {
  LinearStepOptions linear;
  double blowup_ceiling = 1e6;
};

/// Abort of a step or a run: non-finite values, the sup-norm ceiling, or an
/// inner solver failure. Carries the last valid state.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, SimState last_valid)
      : std::runtime_error(what), last_valid_(std::move(last_valid)) {}
  const SimState& last_valid() const { return last_valid_; }

 private:
  SimState last_valid_;
};

/// One IMEX step from state with all explicit terms frozen at state.
SimState step(const Grid& grid, const SimState& state, const GivenData& data, double dt,
              const StepOptions& opts = {});

/// One IMEX step from `state` with the explicit terms frozen at `frozen`.
SimState step_frozen(const Grid& grid, const SimState& state, const SimState& frozen, const GivenData& data,
                     double dt, const StepOptions& opts = {});

struct PicardResult {
  SimState state;
  int iterations = 0;
  double contraction = 0.0;  // last increment / previous increment (0 if < 2 increments)
  double increment = 0.0;    // last relative increment
  bool converged = false;
};

/// Iterates step_frozen until the relative L2 increment (max over n, c, u)
/// drops below tol or k_max iterates are taken. The first increment is the
/// change from the old state. k_max = 1
/// reproduces step(). Non-contraction is reported, not thrown.
PicardResult picard_step(const Grid& grid, const SimState& state, const GivenData& data, double dt, int k_max,
                         double tol, const StepOptions& opts = {});

struct RunOptions {
  double T = 1.0;
  double dt = 1e-3;
  StepOptions step;
  bool picard = false;
  int picard_k_max = 5;
  double picard_tol = 1e-9;
  int snapshot_stride = 0;  // 0: keep only the initial and final state
};

struct RunResult {
  Trajectory trajectory;
  DiagnosticsSeries series;
  SimState final_state;
};

/// Run aborted; carries what was computed up to the last valid state.
class RunAborted : public BlowUpError {
 public:
  RunAborted(const std::string& what, SimState last_valid, RunResult partial)
      : BlowUpError(what, std::move(last_valid)), partial_(std::move(partial)) {}
  const RunResult& partial() const { return partial_; }

 private:
  RunResult partial_;
};

/// Advances the initial data to time T. The initial velocity is projected
/// once so that the state carries divergence-free face values. One
/// diagnostics row per step; snapshots at t = 0, every snapshot_stride
/// steps and at T.
RunResult run(const Grid& grid, const GivenData& data, const RunOptions& opts);

}  // namespace ksns
