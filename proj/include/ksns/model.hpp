#pragma once

// State and data of the chemotaxis-fluid system
//   n_t = Lap n - div(n S grad c) - u.grad n
//   c_t = Lap c - c + n - u.grad c
//   u_t + (u.grad)u = Lap u - grad p + n grad(phi) + f,  div u = 0
// with grad n.nu = n S grad c.nu, grad c.nu = 0 and u = 0 on the wall.

#include <functional>
#include <string>
#include <vector>

#include "ksns/grid.hpp"

namespace ksns {

struct Mat2 {
  double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;

  Gradient2 apply(Gradient2 g) const { return {xx * g.x + xy * g.y, yx * g.x + yy * g.y}; }
  double norm() const;  // Frobenius
};

/// Chemotactic sensitivity S(t, x) and its time derivative.
class SensitivitySpec {
 public:
  enum class Kind { identity, scaled_identity, rotation, custom };
  using Evaluator = std::function<Mat2(double t, double x, double y)>;

  static SensitivitySpec identity();
  static SensitivitySpec scaled(double a);
  /// a*I + b*J with J the rotation by +90 degrees, [[0,-1],[1,0]].
  static SensitivitySpec rotation(double a, double b);
  static SensitivitySpec custom(Evaluator s, Evaluator ds_dt, std::string tag);

  Mat2 operator()(double t, double x, double y) const { return eval_(t, x, y); }
  Mat2 time_derivative(double t, double x, double y) const { return deriv_(t, x, y); }

  Kind kind() const { return kind_; }
  const std::string& tag() const { return tag_; }

  /// max over cell centers and boundary face centers of |S(t, .)|.
  double sup_norm(const Grid& grid, double t) const;

 private:
  SensitivitySpec(Kind k, Evaluator s, Evaluator ds, std::string tag)
      : kind_(k), eval_(std::move(s)), deriv_(std::move(ds)), tag_(std::move(tag)) {}

  Kind kind_;
  Evaluator eval_;
  Evaluator deriv_;
  std::string tag_;
};

/// Time-dependent external force f(t, .) sampled on the grid; empty = zero.
using ForcingFn = std::function<VectorField(const Grid& grid, double t)>;

struct GivenData {
  ScalarField n0;
  ScalarField c0;
  VectorField u0;
  VectorField phi_grad;  // grad(phi), time independent
  ForcingFn f;
  SensitivitySpec S = SensitivitySpec::identity();

  VectorField forcing(const Grid& grid, double t) const;
};

/// Residuals of the hypotheses on the initial data: grad c0.nu = 0,
/// div u0 = 0, u0 = 0 on the wall.
struct DataHypotheses {
  double c0_normal_flux = 0.0;  // max |grad c0 . nu| over boundary faces
  double u0_divergence = 0.0;   // L2 norm of div u0
  double u0_wall = 0.0;         // max |u0| extrapolated to the wall
};
DataHypotheses check_hypotheses(const Grid& grid, const GivenData& data);

struct SimState {
  double t = 0.0;
  ScalarField n;
  ScalarField c;
  VectorField u;  // carries divergence-free face values after the first step
  double n_bar0 = 0.0;

  // Outward boundary fluxes of the last step, one per boundary face: the
  // normal derivative imposed on n and the chemotactic flux n S grad c . nu.
  // Empty before the first step.
  std::vector<double> bc_diffusive;
  std::vector<double> bc_chemotactic;

  bool all_finite() const { return n.all_finite() && c.all_finite() && u.all_finite(); }
};

/// Outward chemotactic flux n S(t) grad c . nu on every boundary face: n
/// extrapolated to the face, grad c from boundary_gradient().
std::vector<double> boundary_chemotactic_flux(const Grid& grid, const ScalarField& n, const ScalarField& c,
                                              const SensitivitySpec& S, double t);

/// Initial state: n0, c0, u0 with n_bar0 = mean(n0).
SimState initial_state(const Grid& grid, const GivenData& data);

}  // namespace ksns
