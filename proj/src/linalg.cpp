#include "ksns/linalg.hpp"

#include <cmath>
#include <vector>

namespace ksns {

namespace {

void remove_mean(std::span<double> v) {
  if (v.empty()) return;
  const double m = simd::sum(v) / static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

}  // namespace

void stencil_diagonal(const simd::StencilCoeffs& op, std::span<double> diag) {
  const double wall = op.dirichlet ? 2.0 : 0.0;
  for (int j = 0; j < op.ny; ++j) {
    const double ay = (j > 0 ? 1.0 : wall) + (j < op.ny - 1 ? 1.0 : wall);
    for (int i = 0; i < op.nx; ++i) {
      const double ax = (i > 0 ? 1.0 : wall) + (i < op.nx - 1 ? 1.0 : wall);
      diag[static_cast<std::size_t>(j) * op.nx + i] = op.diag + op.cx * ax + op.cy * ay;
    }
  }
}

LinearSolveReport conjugate_gradient(const simd::StencilCoeffs& op, std::span<const double> b_in,
                                     std::span<double> x, const SolverOptions& opts, bool project_constant) {
  const std::size_t n = x.size();
  LinearSolveReport report;

  std::vector<double> b(b_in.begin(), b_in.end());
  if (project_constant) {
    remove_mean(b);
    remove_mean(x);
  }
  const double bnorm = std::sqrt(simd::dot(b, b));
  if (bnorm == 0.0) {
    for (double& v : x) v = 0.0;
    return report;
  }

  std::vector<double> inv_diag(n);
  stencil_diagonal(op, inv_diag);
  for (double& d : inv_diag) d = (d != 0.0) ? 1.0 / d : 1.0;

  std::vector<double> r(n), z(n), p(n), ap(n);
  simd::apply_stencil(op, x, r);
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - r[k];
  if (project_constant) remove_mean(r);

  double rnorm = std::sqrt(simd::dot(r, r));
  report.final_residual = rnorm / bnorm;
  if (report.final_residual <= opts.rel_tol) return report;

  simd::mul(inv_diag, r, z);
  if (project_constant) remove_mean(z);
  p = z;
  double rz = simd::dot(r, z);

  for (int it = 1; it <= opts.max_iter; ++it) {
    simd::apply_stencil(op, p, ap);
    const double pap = simd::dot(p, ap);
    if (!(pap > 0.0)) {
      report.iterations = it;
      throw SolverError("conjugate gradient breakdown (operator not positive definite?)", report);
    }
    const double alpha = rz / pap;
    simd::axpy(alpha, p, x);
    simd::axpy(-alpha, ap, r);
    if (project_constant) remove_mean(r);

    rnorm = std::sqrt(simd::dot(r, r));
    report.iterations = it;
    report.final_residual = rnorm / bnorm;
    if (!std::isfinite(rnorm)) throw SolverError("conjugate gradient produced a non-finite residual", report);
    if (report.final_residual <= opts.rel_tol) {
      if (project_constant) remove_mean(x);
      return report;
    }

    simd::mul(inv_diag, r, z);
    if (project_constant) remove_mean(z);
    const double rz_new = simd::dot(r, z);
    simd::xpay(z, rz_new / rz, p);
    rz = rz_new;
  }
  throw SolverError("conjugate gradient did not converge within " + std::to_string(opts.max_iter) +
                        " iterations (relative residual " + std::to_string(report.final_residual) + ")",
                    report);
}

}  // namespace ksns
