#include "ksns/linstep.hpp"

#include <cmath>

#include "ksns/simd.hpp"

namespace ksns {

namespace {

simd::StencilCoeffs neg_laplacian(const Grid& grid, double scale, double diag, bool dirichlet) {
  return {grid.nx(), grid.ny(), diag, scale / (grid.hx() * grid.hx()), scale / (grid.hy() * grid.hy()),
          dirichlet};
}

void check_step(double dt, const LinearStepOptions& opts) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("time step must be positive");
  if (!(opts.theta >= 0.5 && opts.theta <= 1.0)) throw PreconditionError("theta must lie in [1/2, 1]");
}

// Solves (diag*I - scale*Lap) x = b from the initial guess in x, then makes
// the constant mode exact: the operator maps constants to diag*constants, so
// adding mean(residual)/diag removes the residual's mean.
void solve_with_exact_mean(const simd::StencilCoeffs& op, std::span<const double> b, std::span<double> x,
                           const LinearStepOptions& opts, LinearSolveReport* report) {
  auto rep = conjugate_gradient(op, b, x, opts.solver());
  if (!op.dirichlet && op.diag > 0.0) {
    std::vector<double> ax(x.size());
    simd::apply_stencil(op, x, ax);
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += b[k] - ax[k];
    const double shift = s / static_cast<double>(x.size()) / op.diag;
    for (double& v : x) v += shift;
  }
  if (report) *report = rep;
}

}  // namespace

ScalarField neumann_laplacian(const Grid& grid, const ScalarField& f) {
  require_same_grid(grid, f);
  ScalarField out(grid);
  simd::apply_stencil(neg_laplacian(grid, 1.0, 0.0, false), f.values(), out.values());
  return out *= -1.0;
}

ScalarField dirichlet_laplacian(const Grid& grid, const ScalarField& f) {
  require_same_grid(grid, f);
  ScalarField out(grid);
  simd::apply_stencil(neg_laplacian(grid, 1.0, 0.0, true), f.values(), out.values());
  return out *= -1.0;
}

ScalarField step_neumann_heat(const Grid& grid, const ScalarField& U, const VectorField& F_B,
                              const ScalarField& F_E, double dt, const LinearStepOptions& opts,
                              LinearSolveReport* report) {
  require_same_grid(grid, F_B);
  return step_neumann_heat(grid, U, face_values(grid, F_B), F_E, dt, opts, report);
}

ScalarField step_neumann_heat(const Grid& grid, const ScalarField& U, const FaceFlux& F_B,
                              const ScalarField& F_E, double dt, const LinearStepOptions& opts,
                              LinearSolveReport* report, std::vector<double>* imposed_flux) {
  require_same_grid(grid, U);
  require_same_grid(grid, F_E);
  check_step(dt, opts);
  if (!U.all_finite()) throw PreconditionError("step_neumann_heat: U has non-finite entries");

  double l1 = 0.0;
  for (double v : F_E.values()) l1 += std::fabs(v);
  l1 *= grid.cell_volume();
  if (std::fabs(integrate(grid, F_E)) > 1e-8 * l1) {
    throw PreconditionError("step_neumann_heat: F_E must have zero mean");
  }

  const auto boundary_flux = boundary_normal_flux(grid, F_B);
  // B(b) - div F_B: the boundary parts cancel cell by cell, leaving the
  // interior divergence; both are kept explicit so the imposed flux is the
  // one the Laplacian sees.
  ScalarField forcing = laplacian_with_flux(grid, ScalarField(grid), boundary_flux);
  forcing -= divergence(grid, F_B);
  forcing += F_E;

  ScalarField rhs = U;
  if (opts.theta < 1.0) {
    const ScalarField lap = neumann_laplacian(grid, U);
    simd::axpy((1.0 - opts.theta) * dt, lap.values(), rhs.values());
  }
  simd::axpy(dt, forcing.values(), rhs.values());

  ScalarField out = U;
  solve_with_exact_mean(neg_laplacian(grid, opts.theta * dt, 1.0, false), rhs.values(), out.values(), opts,
                        report);
  if (imposed_flux) *imposed_flux = boundary_flux;
  return out;
}

ScalarField step_shifted_heat(const Grid& grid, const ScalarField& c, const ScalarField& rhs, double dt,
                              const LinearStepOptions& opts, LinearSolveReport* report) {
  require_same_grid(grid, c);
  require_same_grid(grid, rhs);
  check_step(dt, opts);

  ScalarField b = c;
  if (opts.theta < 1.0) {
    const double w = (1.0 - opts.theta) * dt;
    ScalarField lap = neumann_laplacian(grid, c);
    simd::axpy(w, lap.values(), b.values());
    simd::axpy(-w, c.values(), b.values());
  }
  simd::axpy(dt, rhs.values(), b.values());

  ScalarField out = c;
  solve_with_exact_mean(neg_laplacian(grid, opts.theta * dt, 1.0 + opts.theta * dt, false), b.values(),
                        out.values(), opts, report);
  return out;
}

Projection helmholtz_decompose(const Grid& grid, const VectorField& v, const LinearStepOptions& opts) {
  require_same_grid(grid, v);
  const int nx = grid.nx();
  const int ny = grid.ny();
  FaceFlux faces = face_values(grid, v);

  // Interior part of the face divergence: the boundary faces are matched by
  // the prescribed pressure flux and drop out.
  FaceFlux interior = faces;
  for (int j = 0; j < ny; ++j) {
    interior.x[grid.x_face(0, j)] = 0.0;
    interior.x[grid.x_face(nx, j)] = 0.0;
  }
  for (int i = 0; i < nx; ++i) {
    interior.y[grid.y_face(i, 0)] = 0.0;
    interior.y[grid.y_face(i, ny)] = 0.0;
  }
  ScalarField rhs = divergence(grid, interior);
  rhs *= -1.0;  // -Lap_0 p = -div_int

  ScalarField p(grid);
  LinearSolveReport rep =
      conjugate_gradient(neg_laplacian(grid, 1.0, 0.0, false), rhs.values(), p.values(), opts.solver(), true);

  // Face gradient of p, with the boundary value prescribed to v . nu.
  FaceFlux grad = faces;
  const double ihx = 1.0 / grid.hx();
  const double ihy = 1.0 / grid.hy();
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) grad.x[grid.x_face(i, j)] = (p.at(i, j) - p.at(i - 1, j)) * ihx;
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) grad.y[grid.y_face(i, j)] = (p.at(i, j) - p.at(i, j - 1)) * ihy;

  VectorField out(grid);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double gx = 0.5 * (grad.x[grid.x_face(i, j)] + grad.x[grid.x_face(i + 1, j)]);
      const double gy = 0.5 * (grad.y[grid.y_face(i, j)] + grad.y[grid.y_face(i, j + 1)]);
      out.x().at(i, j) = v.x().at(i, j) - gx;
      out.y().at(i, j) = v.y().at(i, j) - gy;
    }
  }
  FaceFlux corrected = faces;
  for (std::size_t k = 0; k < corrected.x.size(); ++k) corrected.x[k] -= grad.x[k];
  for (std::size_t k = 0; k < corrected.y.size(); ++k) corrected.y[k] -= grad.y[k];
  // Exactly zero normal trace.
  for (int j = 0; j < ny; ++j) {
    corrected.x[grid.x_face(0, j)] = 0.0;
    corrected.x[grid.x_face(nx, j)] = 0.0;
  }
  for (int i = 0; i < nx; ++i) {
    corrected.y[grid.y_face(i, 0)] = 0.0;
    corrected.y[grid.y_face(i, ny)] = 0.0;
  }
  out.set_faces(std::move(corrected));
  return {std::move(out), std::move(p), rep};
}

VectorField helmholtz_project(const Grid& grid, const VectorField& v, const LinearStepOptions& opts) {
  return helmholtz_decompose(grid, v, opts).field;
}

VectorField step_stokes(const Grid& grid, const VectorField& u, const VectorField& force, double dt,
                        const LinearStepOptions& opts, LinearSolveReport* report) {
  require_same_grid(grid, u);
  require_same_grid(grid, force);
  check_step(dt, opts);

  const auto op = neg_laplacian(grid, opts.theta * dt, 1.0, true);
  auto tentative = [&](const ScalarField& comp, const ScalarField& f) {
    ScalarField b = comp;
    if (opts.theta < 1.0) {
      const ScalarField lap = dirichlet_laplacian(grid, comp);
      simd::axpy((1.0 - opts.theta) * dt, lap.values(), b.values());
    }
    simd::axpy(dt, f.values(), b.values());
    ScalarField x = comp;
    auto rep = conjugate_gradient(op, b.values(), x.values(), opts.solver());
    if (report) report->iterations += rep.iterations;
    return x;
  };
  if (report) *report = {};

  VectorField star(tentative(u.x(), force.x()), tentative(u.y(), force.y()));
  FaceFlux faces = face_values(grid, VectorField(star.x(), star.y()));
  for (int j = 0; j < grid.ny(); ++j) {
    faces.x[grid.x_face(0, j)] = 0.0;
    faces.x[grid.x_face(grid.nx(), j)] = 0.0;
  }
  for (int i = 0; i < grid.nx(); ++i) {
    faces.y[grid.y_face(i, 0)] = 0.0;
    faces.y[grid.y_face(i, grid.ny())] = 0.0;
  }
  star.set_faces(std::move(faces));

  Projection proj = helmholtz_decompose(grid, star, opts);
  if (report) {
    report->iterations += proj.report.iterations;
    report->final_residual = proj.report.final_residual;
  }
  return std::move(proj.field);
}

double inner_product(const Grid& grid, const VectorField& a, const VectorField& b) {
  require_same_grid(grid, a);
  require_same_grid(grid, b);
  return (simd::dot(a.x().values(), b.x().values()) + simd::dot(a.y().values(), b.y().values())) *
         grid.cell_volume();
}

}  // namespace ksns
