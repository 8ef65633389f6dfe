#pragma once

// Implicit linear steps: zero-mean Neumann heat with boundary flux and
// divergence-form forcing, the shifted heat operator (1 - Laplacian), the
// Helmholtz projection and a projection-method Stokes step.
//
// All steps use the theta scheme (theta = 1 implicit Euler, theta = 1/2
// Crank-Nicolson) for the diffusion operator. Forcing terms and prescribed
// boundary fluxes are treated as constant over the step.

#include <stdexcept>
#include <vector>

#include "ksns/grid.hpp"
#include "ksns/linalg.hpp"

namespace ksns {

struct LinearStepOptions {
  double theta = 1.0;
  double tol = 1e-10;  // relative residual of every inner solve
  int max_iter = 20000;

  SolverOptions solver() const { return {tol, max_iter}; }
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Solves
///   (U' - U)/dt = theta*Lap U' + (1-theta)*Lap U - div F_B + F_E
/// with grad U' . nu = F_B . nu on every boundary face. The boundary flux and
/// the divergence use the same face values of F_B, so the step changes the
/// mean of U by dt*mean(F_E) only. F_E must integrate to zero (relative to
/// its L1 norm, 1e-8); otherwise PreconditionError.
ScalarField step_neumann_heat(const Grid& grid, const ScalarField& U, const VectorField& F_B,
                              const ScalarField& F_E, double dt, const LinearStepOptions& opts,
                              LinearSolveReport* report = nullptr);

/// Lower-level form: face values of F_B given directly, boundary fluxes read
/// from them. imposed_flux receives the outward normal derivative prescribed
/// on each boundary face.
ScalarField step_neumann_heat(const Grid& grid, const ScalarField& U, const FaceFlux& F_B,
                              const ScalarField& F_E, double dt, const LinearStepOptions& opts,
                              LinearSolveReport* report = nullptr,
                              std::vector<double>* imposed_flux = nullptr);

/// (c' - c)/dt + theta*(1 - Lap)c' + (1-theta)*(1 - Lap)c = rhs, zero flux.
ScalarField step_shifted_heat(const Grid& grid, const ScalarField& c, const ScalarField& rhs, double dt,
                              const LinearStepOptions& opts, LinearSolveReport* report = nullptr);

struct Projection {
  VectorField field;     // v - grad p, carries divergence-free face values
  ScalarField pressure;  // mean zero
  LinearSolveReport report;
};

/// Helmholtz decomposition v = Pv + grad p on the compact face stencil:
/// face values of v (face_values) are corrected by the face gradient of p,
/// where div_h(grad_h p) = div_h v with grad p . nu = v . nu on the boundary.
/// The corrected faces are divergence-free to the solver tolerance and have
/// zero normal component on the boundary; cell values are corrected by the
/// average of the two face gradients.
Projection helmholtz_decompose(const Grid& grid, const VectorField& v, const LinearStepOptions& opts);
VectorField helmholtz_project(const Grid& grid, const VectorField& v, const LinearStepOptions& opts);

/// Projection-method Stokes step:
///   (u* - u)/dt = theta*Lap u* + (1-theta)*Lap u + force,  u* = 0 on the wall
///   u' = P u*
/// The tentative velocity gets zero normal face values on the wall before
/// projecting.
VectorField step_stokes(const Grid& grid, const VectorField& u, const VectorField& force, double dt,
                        const LinearStepOptions& opts, LinearSolveReport* report = nullptr);

/// Dirichlet (no-slip) Laplacian of a cell field: ghost value = -interior.
ScalarField dirichlet_laplacian(const Grid& grid, const ScalarField& f);

/// Zero-flux Laplacian (same as laplacian_with_flux with a zero flux).
ScalarField neumann_laplacian(const Grid& grid, const ScalarField& f);

/// L2 inner product of two vector fields over the cells.
double inner_product(const Grid& grid, const VectorField& a, const VectorField& b);

}  // namespace ksns
