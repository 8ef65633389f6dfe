#include "ksns/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "ksns/integrator.hpp"
#include "ksns/simd.hpp"

namespace ksns {

const char* const kDiagnosticsHeader =
    "t,mass_n,mass_c,sup_n_dev,sup_c_dev,sup_u,min_n,min_c,bc_residual,neg_energy_n,neg_energy_c,"
    "picard_iters,contraction";

void validate_exponents(const DiagnosticsConfig& cfg) {
  if (!(cfg.r > 2.0)) throw DiagnosticsError("diagnostics.r must be > 2");
  if (!(cfg.q > 2.0)) throw DiagnosticsError("diagnostics.q must be > 2");
  if (std::fabs(1.0 / cfg.r + 2.0 / cfg.q - 1.0) < 1e-12) {
    throw DiagnosticsError("diagnostics.r, diagnostics.q: 1/r + 2/q must differ from 1");
  }
}

void validate(const DiagnosticsConfig& cfg, double lambda_n, double lambda_d) {
  validate_exponents(cfg);
  const double cap1 = std::min(1.0, lambda_n / cfg.q);
  if (!(cfg.lambda1 > 0.0 && cfg.lambda1 < cap1)) {
    throw DiagnosticsError("diagnostics.lambda1 must lie in (0, min{1, lambda_N/q}) = (0, " +
                           std::to_string(cap1) + ")");
  }
  if (!(cfg.lambda2 >= 0.0 && cfg.lambda2 <= cfg.lambda1)) {
    throw DiagnosticsError("diagnostics.lambda2 must lie in [0, lambda1]");
  }
  if (!(cfg.lambda2 < lambda_d / cfg.q)) {
    throw DiagnosticsError("diagnostics.lambda2 must be < lambda_D/q = " + std::to_string(lambda_d / cfg.q));
  }
}

double default_lambda1(double lambda_n, double q, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw DiagnosticsError("fraction must lie in (0, 1)");
  if (!(lambda_n > 0.0) || !(q > 0.0)) throw DiagnosticsError("lambda_N and q must be positive");
  return fraction * std::min(1.0, lambda_n / q);
}

double negative_energy(const Grid& grid, const ScalarField& f) {
  require_same_grid(grid, f);
  double s = 0.0;
  for (double v : f.values())
    if (v < 0.0) s += v * v;
  return s * grid.cell_volume();
}

namespace {

double min_value(const ScalarField& f) {
  double m = std::numeric_limits<double>::infinity();
  for (double v : f.values()) m = std::min(m, v);
  return m;
}

double sup_dev(const ScalarField& f, double ref) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::fabs(v - ref));
  return m;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a[k] - b[k]));
  return m;
}

double lq_time(const std::vector<double>& values, const std::vector<double>& weights, double q) {
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) s += weights[k] * std::pow(values[k], q);
  return std::pow(s, 1.0 / q);
}

}  // namespace

DiagnosticsRow measure(const Grid& grid, const SimState& state) {
  DiagnosticsRow row;
  row.t = state.t;
  row.mass_n = integrate(grid, state.n);
  row.mass_c = integrate(grid, state.c);
  row.sup_n_dev = sup_dev(state.n, state.n_bar0);
  row.sup_c_dev = sup_dev(state.c, (1.0 - std::exp(-state.t)) * state.n_bar0);
  row.sup_u = discrete_norm(grid, state.u, Norm::sup());
  row.min_n = min_value(state.n);
  row.min_c = min_value(state.c);
  if (!state.bc_diffusive.empty()) row.bc_residual = max_abs_diff(state.bc_diffusive, state.bc_chemotactic);
  row.neg_energy_n = negative_energy(grid, state.n);
  row.neg_energy_c = negative_energy(grid, state.c);
  return row;
}

void write_diagnostics_csv(std::ostream& os, const DiagnosticsSeries& series) {
  os << kDiagnosticsHeader << '\n';
  os << std::setprecision(17);
  for (const auto& r : series.rows) {
    os << r.t << ',' << r.mass_n << ',' << r.mass_c << ',' << r.sup_n_dev << ',' << r.sup_c_dev << ','
       << r.sup_u << ',' << r.min_n << ',' << r.min_c << ',' << r.bc_residual << ',' << r.neg_energy_n << ','
       << r.neg_energy_c << ',' << r.picard_iters << ',' << r.contraction << '\n';
  }
}

MassResiduals mass_identity_residuals(const DiagnosticsSeries& series, double mass_n0, double mass_c0) {
  if (series.empty()) throw DiagnosticsError("mass_identity_residuals: empty series");
  MassResiduals res;
  for (const auto& r : series.rows) {
    res.n = std::max(res.n, std::fabs(r.mass_n - mass_n0));
    const double e = std::exp(-r.t);
    res.c = std::max(res.c, std::fabs(r.mass_c - (e * mass_c0 + (1.0 - e) * mass_n0)));
  }
  return res;
}

double c_mass_recursion_residual(const DiagnosticsSeries& series, double mass_c0, double mass_n0, double dt,
                                 double theta) {
  if (series.empty()) throw DiagnosticsError("c_mass_recursion_residual: empty series");
  double worst = 0.0;
  double mc = mass_c0;
  double mn = mass_n0;
  double t_prev = series.rows.front().t - dt;
  for (const auto& r : series.rows) {
    const double h = r.t - t_prev;
    const double predicted = ((1.0 - (1.0 - theta) * h) * mc + h * mn) / (1.0 + theta * h);
    worst = std::max(worst, std::fabs(r.mass_c - predicted));
    mc = r.mass_c;
    mn = r.mass_n;
    t_prev = r.t;
  }
  return worst;
}

DecayFit fit_decay_rate(std::span<const std::pair<double, double>> samples, double t_a, double t_b) {
  if (!(t_b > t_a)) throw DiagnosticsError("fit_decay_rate: empty time window");
  DecayFit fit;
  std::vector<double> ts;
  std::vector<double> ls;
  for (const auto& [t, v] : samples) {
    if (t < t_a || t > t_b) continue;
    if (!(v > 0.0) || !std::isfinite(v)) {
      fit.truncated = true;
      break;
    }
    ts.push_back(t);
    ls.push_back(std::log(v));
  }
  if (ts.size() < 5) throw DiagnosticsError("fit_decay_rate: fewer than 5 positive samples in the window");
  const double n = static_cast<double>(ts.size());
  double st = 0.0, sl = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    st += ts[k];
    sl += ls[k];
  }
  const double tm = st / n;
  const double lm = sl / n;
  double stt = 0.0, stl = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    stt += (ts[k] - tm) * (ts[k] - tm);
    stl += (ts[k] - tm) * (ls[k] - lm);
  }
  const double slope = stl / stt;
  double rss = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double e = ls[k] - (lm + slope * (ts[k] - tm));
    rss += e * e;
  }
  fit.rate = -slope;
  fit.amplitude = std::exp(lm - slope * tm);
  fit.residual = std::sqrt(rss / n);
  fit.samples = ts.size();
  return fit;
}

double smallness_functional(const Grid& grid, const GivenData& data, const DiagnosticsConfig& cfg, double t_quad,
                            double dt_quad) {
  validate_exponents(cfg);
  if (!(t_quad > 0.0) || !(dt_quad > 0.0)) throw DiagnosticsError("smallness_functional: bad quadrature");
  double value = discrete_norm(grid, data.n0, Norm::w(2, cfg.r)) + discrete_norm(grid, data.c0, Norm::w(3, cfg.r)) +
                 discrete_norm(grid, data.u0, Norm::w(2, cfg.r));
  if (data.f) {
    const long steps = std::lround(t_quad / dt_quad);
    double s = 0.0;
    for (long k = 0; k < steps; ++k) {
      const double t = k * dt_quad;
      const double a = std::exp(cfg.lambda2 * t) * discrete_norm(grid, data.f(grid, t), Norm::lr(cfg.r));
      s += dt_quad * std::pow(a, cfg.q);
    }
    value += std::pow(s, 1.0 / cfg.q);
  }
  return value;
}

ShiftedTrajectory shifted(const Trajectory& traj) {
  ShiftedTrajectory out;
  out.spacing = traj.spacing;
  for (const auto& s : traj.snapshots) {
    ShiftedState sh = shift_transform(s);
    out.t.push_back(sh.t);
    out.n_tilde.push_back(std::move(sh.n_tilde));
    out.c_tilde.push_back(std::move(sh.c_tilde));
    out.u.push_back(std::move(sh.u));
  }
  return out;
}

ShiftedTrajectory difference(const ShiftedTrajectory& a, const ShiftedTrajectory& b) {
  if (a.t.size() != b.t.size()) throw DiagnosticsError("difference: snapshot counts differ");
  ShiftedTrajectory out;
  out.spacing = a.spacing;
  for (std::size_t k = 0; k < a.t.size(); ++k) {
    if (std::fabs(a.t[k] - b.t[k]) > 1e-12 * std::max(1.0, std::fabs(a.t[k]))) {
      throw DiagnosticsError("difference: snapshot times differ");
    }
    out.t.push_back(a.t[k]);
    out.n_tilde.push_back(a.n_tilde[k] - b.n_tilde[k]);
    out.c_tilde.push_back(a.c_tilde[k] - b.c_tilde[k]);
    out.u.push_back(VectorField(a.u[k].x() - b.u[k].x(), a.u[k].y() - b.u[k].y()));
  }
  return out;
}

double weighted_solution_norm(const Grid& grid, const ShiftedTrajectory& traj, const DiagnosticsConfig& cfg) {
  validate_exponents(cfg);
  const std::size_t m = traj.t.size();
  if (m == 0) throw DiagnosticsError("weighted_solution_norm: empty trajectory");
  const double r = cfg.r;
  const double q = cfg.q;

  std::vector<double> w(m);
  for (std::size_t k = 0; k + 1 < m; ++k) w[k] = traj.t[k + 1] - traj.t[k];
  w[m - 1] = traj.spacing;

  std::vector<double> n_sp(m), c_sp(m), u_sp(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double w1 = std::exp(cfg.lambda1 * traj.t[k]);
    const double w2 = std::exp(cfg.lambda2 * traj.t[k]);
    n_sp[k] = w1 * discrete_norm(grid, traj.n_tilde[k], Norm::w(2, r));
    c_sp[k] = w1 * discrete_norm(grid, traj.c_tilde[k], Norm::w(3, r));
    u_sp[k] = w2 * discrete_norm(grid, traj.u[k], Norm::w(2, r));
  }
  double total = lq_time(n_sp, w, q) + lq_time(c_sp, w, q) + lq_time(u_sp, w, q);

  if (m >= 2) {
    std::vector<double> dn(m - 1), dc(m - 1), du(m - 1), wd(m - 1);
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const double h = traj.t[k + 1] - traj.t[k];
      const double a1 = std::exp(cfg.lambda1 * traj.t[k]);
      const double b1 = std::exp(cfg.lambda1 * traj.t[k + 1]);
      const double a2 = std::exp(cfg.lambda2 * traj.t[k]);
      const double b2 = std::exp(cfg.lambda2 * traj.t[k + 1]);
      ScalarField fn = b1 * traj.n_tilde[k + 1] - a1 * traj.n_tilde[k];
      ScalarField fc = b1 * traj.c_tilde[k + 1] - a1 * traj.c_tilde[k];
      VectorField fu(b2 * traj.u[k + 1].x() - a2 * traj.u[k].x(), b2 * traj.u[k + 1].y() - a2 * traj.u[k].y());
      dn[k] = discrete_norm(grid, fn, Norm::lr(r)) / h;
      dc[k] = discrete_norm(grid, fc, Norm::w(1, r)) / h;
      du[k] = discrete_norm(grid, fu, Norm::lr(r)) / h;
      wd[k] = h;
    }
    total += lq_time(dn, wd, q) + lq_time(dc, wd, q) + lq_time(du, wd, q);
  }
  return total;
}

double weighted_solution_norm(const Grid& grid, const Trajectory& traj, const DiagnosticsConfig& cfg) {
  return weighted_solution_norm(grid, shifted(traj), cfg);
}

NegativityReport negativity_report(const Grid& grid, const Trajectory& traj) {
  if (traj.snapshots.empty()) throw DiagnosticsError("negativity_report: empty trajectory");
  NegativityReport rep;
  rep.min_n = rep.min_c = std::numeric_limits<double>::infinity();
  for (const auto& s : traj.snapshots) {
    rep.min_n = std::min(rep.min_n, min_value(s.n));
    rep.min_c = std::min(rep.min_c, min_value(s.c));
    rep.neg_energy_n = std::max(rep.neg_energy_n, negative_energy(grid, s.n));
    rep.neg_energy_c = std::max(rep.neg_energy_c, negative_energy(grid, s.c));
  }
  return rep;
}

double boundary_residual(const Grid& grid, const SimState& state, const GivenData& data) {
  if (!state.bc_diffusive.empty()) return max_abs_diff(state.bc_diffusive, state.bc_chemotactic);
  return max_abs_diff(boundary_normal_derivative(grid, state.n),
                      boundary_chemotactic_flux(grid, state.n, state.c, data.S, state.t));
}

double compatibility_check(const Grid& grid, const ScalarField& n0, const ScalarField& c0,
                           const SensitivitySpec& S) {
  return max_abs_diff(boundary_normal_derivative(grid, n0), boundary_chemotactic_flux(grid, n0, c0, S, 0.0));
}

}  // namespace ksns
