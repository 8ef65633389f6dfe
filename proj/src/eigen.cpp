#include "ksns/eigen.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ksns/linalg.hpp"
#include "ksns/simd.hpp"

namespace ksns {

namespace {

simd::StencilCoeffs negative_laplacian(const Grid& grid, bool dirichlet) {
  return {grid.nx(), grid.ny(), 0.0, 1.0 / (grid.hx() * grid.hx()), 1.0 / (grid.hy() * grid.hy()), dirichlet};
}

void remove_mean(std::span<double> v) {
  const double m = simd::sum(v) / static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

void normalize(std::span<double> v) {
  const double s = 1.0 / std::sqrt(simd::dot(v, v));
  for (double& x : v) x *= s;
}

EigenResult inverse_iteration(const Grid& grid, double tol, const EigenOptions& opts, bool dirichlet) {
  if (!(tol > 0.0) || tol > 1e-3) throw std::invalid_argument("eigen: tol must lie in (0, 1e-3]");
  const auto op = negative_laplacian(grid, dirichlet);
  const bool deflate = !dirichlet;
  const std::size_t n = grid.cell_count();

  // Deterministic start with a nonzero component on every low mode.
  ScalarField start = ScalarField::sample(grid, [&](double x, double y) {
    const double sx = x / grid.lx();
    const double sy = y / grid.ly();
    return 1.0 + (sx - 0.5) + 0.61 * (sy - 0.5) + 0.07 * std::sin(11.3 * sx + 5.7 * sy);
  });
  std::vector<double> v(start.values().begin(), start.values().end());
  if (deflate) remove_mean(v);
  normalize(v);

  std::vector<double> w(n, 0.0), av(n);
  SolverOptions inner{opts.inner_tol, 100000};
  EigenResult result;
  double lambda_prev = 0.0;

  for (int it = 1; it <= opts.max_iterations; ++it) {
    // w <- A^{-1} v, warm-started from the previous iterate scaled by 1/lambda.
    for (std::size_t k = 0; k < n; ++k) w[k] = (lambda_prev > 0.0) ? v[k] / lambda_prev : 0.0;
    const auto rep = conjugate_gradient(op, v, w, inner, deflate);
    result.inner_iterations += rep.iterations;
    if (deflate) remove_mean(w);
    normalize(w);
    v.swap(w);

    simd::apply_stencil(op, v, av);
    const double lambda = simd::dot(v, av);  // v has unit norm
    double res2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = av[k] - lambda * v[k];
      res2 += d * d;
    }
    const double residual = std::sqrt(res2);
    result.iterations = it;
    result.lambda = lambda;
    result.residual = residual;
    const bool settled = it > 1 && std::fabs(lambda - lambda_prev) <= tol * lambda;
    if (residual <= tol && settled) break;
    if (it == opts.max_iterations) {
      LinearSolveReport rep_out{it, residual, "inverse-power"};
      throw SolverError("eigen: inverse power iteration did not converge", rep_out);
    }
    lambda_prev = lambda;
  }

  // Report the eigenfield with unit L2(Omega) norm.
  const double scale = 1.0 / std::sqrt(grid.cell_volume());
  for (double& x : v) x *= scale;
  result.eigenfield = ScalarField(grid.spec(), std::move(v));
  return result;
}

}  // namespace

EigenResult lambda_neumann(const Grid& grid, double tol, const EigenOptions& opts) {
  return inverse_iteration(grid, tol, opts, false);
}

EigenResult lambda_dirichlet(const Grid& grid, double tol, const EigenOptions& opts) {
  return inverse_iteration(grid, tol, opts, true);
}

double rayleigh_quotient(const Grid& grid, const ScalarField& f, bool dirichlet) {
  require_same_grid(grid, f);
  std::vector<double> af(grid.cell_count());
  simd::apply_stencil(negative_laplacian(grid, dirichlet), f.values(), af);
  return simd::dot(f.values(), af) / simd::dot(f.values(), f.values());
}

}  // namespace ksns
