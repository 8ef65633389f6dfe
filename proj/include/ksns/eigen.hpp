#pragma once

// Poincare constants of a rectangle: the smallest nonzero eigenvalue of the
// zero-flux Laplacian and the smallest eigenvalue of the Dirichlet Laplacian,
// both for the discrete five-point operator. They set the reference decay
// rates for the heat, chemotaxis and Stokes steps.

#include "ksns/grid.hpp"

namespace ksns {

struct EigenResult {
  double lambda = 0.0;
  ScalarField eigenfield;  // unit L2 norm
  int iterations = 0;      // outer inverse-power iterations
  int inner_iterations = 0;
  double residual = 0.0;   // ||A psi - lambda psi|| / ||psi||
};

struct EigenOptions {
  int max_iterations = 1000;
  double inner_tol = 1e-13;
};

/// Smallest eigenvalue of -Laplacian with zero boundary flux on the
/// mean-zero subspace. Inverse power iteration; every solve runs on the
/// deflated (constant-free) subspace. tol must lie in (0, 1e-3].
/// Throws SolverError if the iteration cap is reached.
EigenResult lambda_neumann(const Grid& grid, double tol, const EigenOptions& opts = {});

/// Smallest eigenvalue of -Laplacian with homogeneous Dirichlet data
/// (ghost value = -interior value).
EigenResult lambda_dirichlet(const Grid& grid, double tol, const EigenOptions& opts = {});

/// Rayleigh quotient of f for the zero-flux (dirichlet=false) or Dirichlet
/// operator.
double rayleigh_quotient(const Grid& grid, const ScalarField& f, bool dirichlet);

}  // namespace ksns
