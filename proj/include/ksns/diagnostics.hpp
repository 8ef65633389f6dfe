#pragma once

// Quantitative checks on runs: mass identities, decay-rate fits, the
// smallness functional of the data and the weighted solution norm (both as
// integer-order discrete Sobolev proxies), sign monitors, boundary and
// compatibility residuals.

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ksns/grid.hpp"
#include "ksns/model.hpp"

namespace ksns {

struct DiagnosticsConfig {
  double r = 4.0;
  double q = 4.0;
  double lambda1 = 0.5;
  double lambda2 = 0.0;
};

class DiagnosticsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exponent checks: r > 2, q > 2 and 1/r + 2/q != 1.
void validate_exponents(const DiagnosticsConfig& cfg);
/// Exponents plus 0 < lambda1 < min{1, lambda_n/q} and
/// 0 <= lambda2 <= lambda1, lambda2 < lambda_d/q.
void validate(const DiagnosticsConfig& cfg, double lambda_n, double lambda_d);
/// Largest admissible rates scaled by `fraction` in (0, 1).
double default_lambda1(double lambda_n, double q, double fraction = 0.5);

struct DiagnosticsRow {
  double t = 0.0;
  double mass_n = 0.0;
  double mass_c = 0.0;
  double sup_n_dev = 0.0;  // sup |n - n_bar0|
  double sup_c_dev = 0.0;  // sup |c - (1 - e^{-t}) n_bar0|
  double sup_u = 0.0;
  double min_n = 0.0;
  double min_c = 0.0;
  double bc_residual = 0.0;
  double neg_energy_n = 0.0;
  double neg_energy_c = 0.0;
  int picard_iters = 0;
  double contraction = 0.0;
};

struct DiagnosticsSeries {
  std::vector<DiagnosticsRow> rows;

  bool empty() const { return rows.empty(); }
  std::size_t size() const { return rows.size(); }
};

struct Trajectory {
  double spacing = 0.0;  // nominal time between snapshots
  std::vector<SimState> snapshots;
};

/// Row for one state (picard fields left at their defaults).
DiagnosticsRow measure(const Grid& grid, const SimState& state);

/// Diagnostics CSV: one header line, one row per step, 17 significant digits.
void write_diagnostics_csv(std::ostream& os, const DiagnosticsSeries& series);
extern const char* const kDiagnosticsHeader;

struct MassResiduals {
  double n = 0.0;  // max |mass_n - M_n0|
  double c = 0.0;  // max |mass_c - (e^{-t} M_c0 + (1 - e^{-t}) M_n0)|
};

/// Throws DiagnosticsError for an empty series.
MassResiduals mass_identity_residuals(const DiagnosticsSeries& series, double mass_n0, double mass_c0);

/// Max deviation from the discrete theta-scheme recursion
///   (1 + theta dt) M_c^{k+1} = (1 - (1-theta) dt) M_c^k + dt M_n^k
/// over consecutive rows (the first row is compared with M_c0).
double c_mass_recursion_residual(const DiagnosticsSeries& series, double mass_c0, double mass_n0, double dt,
                                 double theta);

struct DecayFit {
  double rate = 0.0;
  double amplitude = 0.0;
  double residual = 0.0;  // RMS of log-residuals
  std::size_t samples = 0;
  bool truncated = false;  // window cut at the first non-positive value
};

/// Least squares fit of log(value) = log(amplitude) - rate * t over samples
/// with t in [t_a, t_b]. Needs at least 5 positive samples; the window is
/// cut at the first non-positive value. Throws DiagnosticsError otherwise.
DecayFit fit_decay_rate(std::span<const std::pair<double, double>> samples, double t_a, double t_b);

/// Discrete proxy of the data functional:
///   ||n0||_{W^{2,r}} + ||c0||_{W^{3,r}} + ||u0||_{W^{2,r}}
///   + (sum_k dt (e^{lambda2 t_k} ||f(t_k)||_{L^r})^q)^{1/q}
/// with left Riemann sums over [0, t_quad].
double smallness_functional(const Grid& grid, const GivenData& data, const DiagnosticsConfig& cfg,
                            double t_quad, double dt_quad);

struct ShiftedTrajectory {
  double spacing = 0.0;
  std::vector<double> t;
  std::vector<ScalarField> n_tilde;
  std::vector<ScalarField> c_tilde;
  std::vector<VectorField> u;
};

ShiftedTrajectory shifted(const Trajectory& traj);
/// a - b snapshot by snapshot; the time grids must match.
ShiftedTrajectory difference(const ShiftedTrajectory& a, const ShiftedTrajectory& b);

/// Discrete proxy of the solution norm with exponential weights w1 = e^{lambda1 t}
/// (n, c) and w2 = e^{lambda2 t} (u):
///   ||w1 n||_{L^q W^{2,r}} + ||d/dt(w1 n)||_{L^q L^r}
/// + ||w1 c||_{L^q W^{3,r}} + ||d/dt(w1 c)||_{L^q W^{1,r}}
/// + ||w2 u||_{L^q W^{2,r}} + ||d/dt(w2 u)||_{L^q L^r}
/// Time integrals are left Riemann sums with weight t_{k+1} - t_k (the
/// nominal spacing for the last snapshot); time derivatives are forward
/// differences between snapshots.
double weighted_solution_norm(const Grid& grid, const ShiftedTrajectory& traj, const DiagnosticsConfig& cfg);
double weighted_solution_norm(const Grid& grid, const Trajectory& traj, const DiagnosticsConfig& cfg);

/// Integral of min{0, f}^2.
double negative_energy(const Grid& grid, const ScalarField& f);

struct NegativityReport {
  double min_n = 0.0;
  double min_c = 0.0;
  double neg_energy_n = 0.0;  // max over snapshots
  double neg_energy_c = 0.0;
};
NegativityReport negativity_report(const Grid& grid, const Trajectory& traj);

/// max over boundary faces |diffusive flux of n - chemotactic flux|. For a
/// stepped state the two recorded flux arrays are compared; for a state
/// that has not been stepped the diffusive flux is the one-sided normal
/// derivative of n and the chemotactic flux is recomputed from (n, c, S).
double boundary_residual(const Grid& grid, const SimState& state, const GivenData& data);

/// max over boundary faces |grad n0 . nu - n0 S(0) grad c0 . nu| with
/// one-sided normal derivatives and the face-extrapolated n0.
double compatibility_check(const Grid& grid, const ScalarField& n0, const ScalarField& c0,
                           const SensitivitySpec& S);

}  // namespace ksns
