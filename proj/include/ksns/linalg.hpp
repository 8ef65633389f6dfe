#pragma once

// Preconditioned conjugate gradient on the five-point cell operators.

#include <span>
#include <stdexcept>
#include <string>

#include "ksns/simd.hpp"

namespace ksns {

struct LinearSolveReport {
  int iterations = 0;
  double final_residual = 0.0;  // ||r||_2 / ||b||_2
  std::string solver = "pcg-jacobi";
};

struct SolverOptions {
  double rel_tol = 1e-10;
  int max_iter = 20000;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, LinearSolveReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const LinearSolveReport& report() const { return report_; }

 private:
  LinearSolveReport report_;
};

/// Jacobi-preconditioned CG for op * x = b, starting from the contents of x.
///
/// With project_constant the operator is treated as singular with the
/// constant vector as its null space: b, residuals and search directions are
/// kept mean-zero and the returned x has zero mean.
///
/// Throws SolverError if ||r|| <= rel_tol * ||b|| is not reached within
/// max_iter iterations.
LinearSolveReport conjugate_gradient(const simd::StencilCoeffs& op, std::span<const double> b,
                                     std::span<double> x, const SolverOptions& opts,
                                     bool project_constant = false);

/// Diagonal of the stencil operator.
void stencil_diagonal(const simd::StencilCoeffs& op, std::span<double> diag);

}  // namespace ksns
