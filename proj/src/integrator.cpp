#include "ksns/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "ksns/simd.hpp"

namespace ksns {

ShiftedState shift_transform(const SimState& state) {
  ShiftedState s;
  s.t = state.t;
  s.n_bar0 = state.n_bar0;
  s.n_tilde = state.n;
  s.n_tilde += -state.n_bar0;
  s.c_tilde = state.c;
  s.c_tilde += -(1.0 - std::exp(-state.t)) * state.n_bar0;
  s.u = state.u;
  return s;
}

SimState unshift(const ShiftedState& shifted) {
  SimState s;
  s.t = shifted.t;
  s.n_bar0 = shifted.n_bar0;
  s.n = shifted.n_tilde;
  s.n += shifted.n_bar0;
  s.c = shifted.c_tilde;
  s.c += (1.0 - std::exp(-shifted.t)) * shifted.n_bar0;
  s.u = shifted.u;
  return s;
}

VectorField chemotactic_flux(const Grid& grid, const ScalarField& n, const ScalarField& c,
                             const SensitivitySpec& S, double t) {
  require_same_grid(grid, n);
  require_same_grid(grid, c);
  const int nx = grid.nx();
  const int ny = grid.ny();
  const ScalarField cx = derivative(grid, c, Axis::x);
  const ScalarField cy = derivative(grid, c, Axis::y);

  VectorField out(grid);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Gradient2 w = S(t, grid.xc(i), grid.yc(j)).apply({cx.at(i, j), cy.at(i, j)});
      out.x().at(i, j) = n.at(i, j) * w.x;
      out.y().at(i, j) = n.at(i, j) * w.y;
    }
  }

  FaceFlux faces{std::vector<double>(grid.x_face_count()), std::vector<double>(grid.y_face_count())};
  const double ihx = 1.0 / grid.hx();
  const double ihy = 1.0 / grid.hy();
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      const Gradient2 g{(c.at(i, j) - c.at(i - 1, j)) * ihx, 0.5 * (cy.at(i - 1, j) + cy.at(i, j))};
      const double w = S(t, i * grid.hx(), grid.yc(j)).apply(g).x;
      faces.x[grid.x_face(i, j)] = w * (w >= 0.0 ? n.at(i - 1, j) : n.at(i, j));
    }
  }
  for (int j = 1; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Gradient2 g{0.5 * (cx.at(i, j - 1) + cx.at(i, j)), (c.at(i, j) - c.at(i, j - 1)) * ihy};
      const double w = S(t, grid.xc(i), j * grid.hy()).apply(g).y;
      faces.y[grid.y_face(i, j)] = w * (w >= 0.0 ? n.at(i, j - 1) : n.at(i, j));
    }
  }
  const auto boundary = boundary_chemotactic_flux(grid, n, c, S, t);
  const auto bfaces = grid.boundary_faces();
  for (std::size_t k = 0; k < bfaces.size(); ++k) {
    const auto& f = bfaces[k];
    switch (f.side) {
      case Side::west: faces.x[grid.x_face(0, f.j)] = -boundary[k]; break;
      case Side::east: faces.x[grid.x_face(nx, f.j)] = boundary[k]; break;
      case Side::south: faces.y[grid.y_face(f.i, 0)] = -boundary[k]; break;
      case Side::north: faces.y[grid.y_face(f.i, ny)] = boundary[k]; break;
    }
  }
  out.set_faces(std::move(faces));
  return out;
}

ScalarField upwind_transport(const Grid& grid, const FaceFlux& velocity, const ScalarField& phi) {
  require_same_grid(grid, phi);
  const int nx = grid.nx();
  const int ny = grid.ny();
  const double ihx = 1.0 / grid.hx();
  const double ihy = 1.0 / grid.hy();
  ScalarField out(grid);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double U = velocity.x[grid.x_face(i, j)];
      if (U == 0.0) continue;
      const int up = (i == 0) ? 0 : (i == nx) ? nx - 1 : (U >= 0.0 ? i - 1 : i);
      const double flux = U * phi.at(up, j) * ihx;
      if (i > 0) out.at(i - 1, j) += flux;
      if (i < nx) out.at(i, j) -= flux;
    }
  }
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double U = velocity.y[grid.y_face(i, j)];
      if (U == 0.0) continue;
      const int up = (j == 0) ? 0 : (j == ny) ? ny - 1 : (U >= 0.0 ? j - 1 : j);
      const double flux = U * phi.at(i, up) * ihy;
      if (j > 0) out.at(i, j - 1) += flux;
      if (j < ny) out.at(i, j) -= flux;
    }
  }
  return out;
}

namespace {

// Face velocities of u; fields without projected faces get the averaged
// interior faces and a no-slip wall.
FaceFlux wall_velocity(const Grid& grid, const VectorField& u) {
  if (u.has_faces()) return u.faces();
  FaceFlux f = face_values(grid, u);
  for (int j = 0; j < grid.ny(); ++j) {
    f.x[grid.x_face(0, j)] = 0.0;
    f.x[grid.x_face(grid.nx(), j)] = 0.0;
  }
  for (int i = 0; i < grid.nx(); ++i) {
    f.y[grid.y_face(i, 0)] = 0.0;
    f.y[grid.y_face(i, grid.ny())] = 0.0;
  }
  return f;
}

double sup_abs(const SimState& s) {
  return std::max({simd::max_abs(s.n.values()), simd::max_abs(s.c.values()), simd::max_abs(s.u.x().values()),
                   simd::max_abs(s.u.y().values())});
}

double l2(const ScalarField& f) { return std::sqrt(simd::dot(f.values(), f.values())); }

double l2_diff(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

// Relative L2 change, max over n, c and u. The unshifted fields are used on
// purpose: n - n_bar0 inherits the rounding of n, so relative changes of the
// shifted field stall near eps*n_bar0/|n - n_bar0| once the state decays.
double relative_increment(const SimState& a, const SimState& b) {
  const double floor = 1e-12 * (l2(a.n) + l2(a.c) + 1e-300);
  auto rel = [floor](double diff, double na, double nb) { return diff / std::max({na, nb, floor}); };
  const double dn = rel(l2_diff(a.n, b.n), l2(a.n), l2(b.n));
  const double dc = rel(l2_diff(a.c, b.c), l2(a.c), l2(b.c));
  const double du_x = l2_diff(a.u.x(), b.u.x());
  const double du_y = l2_diff(a.u.y(), b.u.y());
  const double nua = std::hypot(l2(a.u.x()), l2(a.u.y()));
  const double nub = std::hypot(l2(b.u.x()), l2(b.u.y()));
  const double du = rel(std::hypot(du_x, du_y), nua, nub);
  return std::max({dn, dc, du});
}

}  // namespace

SimState step_frozen(const Grid& grid, const SimState& state, const SimState& frozen, const GivenData& data,
                     double dt, const StepOptions& opts) {
  const double t = state.t;
  const double n_bar = state.n_bar0;
  const LinearStepOptions& lin = opts.linear;

  try {
    const FaceFlux velocity = wall_velocity(grid, frozen.u);

    // n: zero-mean heat step for n - n_bar with the chemotactic flux as both
    // boundary flux and divergence forcing.
    const VectorField chemo = chemotactic_flux(grid, frozen.n, frozen.c, data.S, t);
    ScalarField n_tilde = state.n;
    n_tilde += -n_bar;
    ScalarField frozen_n_tilde = frozen.n;
    frozen_n_tilde += -n_bar;
    ScalarField advect_n = upwind_transport(grid, velocity, frozen_n_tilde);
    advect_n *= -1.0;
    std::vector<double> imposed;
    ScalarField n_tilde_new =
        step_neumann_heat(grid, n_tilde, chemo.faces(), advect_n, dt, lin, nullptr, &imposed);

    // c: (1 - Lap) step with source n - div(u c).
    ScalarField rhs_c = frozen.n;
    rhs_c -= upwind_transport(grid, velocity, frozen.c);
    ScalarField c_new = step_shifted_heat(grid, state.c, rhs_c, dt, lin);

    // u: Stokes step; buoyancy uses the updated n - n_bar.
    VectorField force = data.forcing(grid, t);
    force.clear_faces();
    const ScalarField adv_x = upwind_transport(grid, velocity, frozen.u.x());
    const ScalarField adv_y = upwind_transport(grid, velocity, frozen.u.y());
    for (std::size_t k = 0; k < grid.cell_count(); ++k) {
      force.x()[k] += -adv_x[k] + n_tilde_new[k] * data.phi_grad.x()[k];
      force.y()[k] += -adv_y[k] + n_tilde_new[k] * data.phi_grad.y()[k];
    }
    VectorField u_new = step_stokes(grid, state.u, force, dt, lin);

    SimState out;
    out.t = t + dt;
    out.n_bar0 = n_bar;
    out.n = std::move(n_tilde_new);
    out.n += n_bar;
    out.c = std::move(c_new);
    out.u = std::move(u_new);
    out.bc_diffusive = std::move(imposed);
    out.bc_chemotactic = boundary_normal_flux(grid, chemo.faces());
    return out;
  } catch (const SolverError& e) {
    throw BlowUpError(std::string("inner linear solver failed at t=") + std::to_string(t) + ": " + e.what(),
                      state);
  }
}

SimState step(const Grid& grid, const SimState& state, const GivenData& data, double dt, const StepOptions& opts) {
  SimState out = step_frozen(grid, state, state, data, dt, opts);
  if (!out.all_finite()) {
    throw BlowUpError("non-finite values after step at t=" + std::to_string(state.t), state);
  }
  if (sup_abs(out) > opts.blowup_ceiling) {
    throw BlowUpError("sup-norm above the blow-up ceiling after step at t=" + std::to_string(state.t), state);
  }
  return out;
}

PicardResult picard_step(const Grid& grid, const SimState& state, const GivenData& data, double dt, int k_max,
                         double tol, const StepOptions& opts) {
  if (k_max < 1) throw std::invalid_argument("picard_step: k_max must be >= 1");
  PicardResult result;
  SimState previous = state;
  double last = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    SimState next = step_frozen(grid, state, previous, data, dt, opts);
    if (!next.all_finite()) {
      throw BlowUpError("non-finite Picard iterate at t=" + std::to_string(state.t), state);
    }
    if (sup_abs(next) > opts.blowup_ceiling) {
      throw BlowUpError("Picard iterate above the blow-up ceiling at t=" + std::to_string(state.t), state);
    }
    const double inc = relative_increment(next, previous);
    result.iterations = k;
    result.increment = inc;
    if (k >= 2) result.contraction = (last > 0.0) ? inc / last : 0.0;
    last = inc;
    previous = std::move(next);
    if (inc < tol) {
      result.converged = true;
      break;
    }
  }
  result.state = std::move(previous);
  return result;
}

RunResult run(const Grid& grid, const GivenData& data, const RunOptions& opts) {
  if (!(opts.T > 0.0)) throw std::invalid_argument("run: T must be positive");
  if (!(opts.dt > 0.0)) throw std::invalid_argument("run: dt must be positive");
  if (opts.dt > opts.T) throw std::invalid_argument("run: dt must not exceed T");

  SimState state = initial_state(grid, data);
  if (!state.u.has_faces()) state.u = helmholtz_project(grid, state.u, opts.step.linear);

  const long steps = static_cast<long>(std::ceil(opts.T / opts.dt - 1e-9));
  RunResult result;
  result.trajectory.spacing = opts.snapshot_stride > 0 ? opts.snapshot_stride * opts.dt : opts.T;
  result.trajectory.snapshots.push_back(state);
  result.series.rows.reserve(static_cast<std::size_t>(steps));

  for (long k = 1; k <= steps; ++k) {
    const double dt = (k == steps) ? opts.T - state.t : opts.dt;
    int iters = 1;
    double contraction = 0.0;
    try {
      if (opts.picard) {
        PicardResult pr = picard_step(grid, state, data, dt, opts.picard_k_max, opts.picard_tol, opts.step);
        iters = pr.iterations;
        contraction = pr.contraction;
        state = std::move(pr.state);
      } else {
        state = step(grid, state, data, dt, opts.step);
      }
    } catch (const BlowUpError& e) {
      result.final_state = e.last_valid();
      throw RunAborted(e.what(), e.last_valid(), std::move(result));
    }
    DiagnosticsRow row = measure(grid, state);
    row.picard_iters = iters;
    row.contraction = contraction;
    result.series.rows.push_back(row);
    const bool on_stride = opts.snapshot_stride > 0 && k % opts.snapshot_stride == 0;
    if (on_stride || k == steps) {
      if (result.trajectory.snapshots.back().t != state.t) result.trajectory.snapshots.push_back(state);
    }
  }
  result.final_state = state;
  return result;
}

}  // namespace ksns
