#include "ksns/model.hpp"

#include <algorithm>
#include <cmath>

namespace ksns {

double Mat2::norm() const { return std::sqrt(xx * xx + xy * xy + yx * yx + yy * yy); }

SensitivitySpec SensitivitySpec::identity() {
  return {Kind::identity, [](double, double, double) { return Mat2{1.0, 0.0, 0.0, 1.0}; },
          [](double, double, double) { return Mat2{}; }, "identity"};
}

SensitivitySpec SensitivitySpec::scaled(double a) {
  return {Kind::scaled_identity, [a](double, double, double) { return Mat2{a, 0.0, 0.0, a}; },
          [](double, double, double) { return Mat2{}; }, "scaled(" + std::to_string(a) + ")"};
}

SensitivitySpec SensitivitySpec::rotation(double a, double b) {
  return {Kind::rotation, [a, b](double, double, double) { return Mat2{a, -b, b, a}; },
          [](double, double, double) { return Mat2{}; },
          "rotation(" + std::to_string(a) + "," + std::to_string(b) + ")"};
}

SensitivitySpec SensitivitySpec::custom(Evaluator s, Evaluator ds_dt, std::string tag) {
  if (!ds_dt) ds_dt = [](double, double, double) { return Mat2{}; };
  return {Kind::custom, std::move(s), std::move(ds_dt), std::move(tag)};
}

double SensitivitySpec::sup_norm(const Grid& grid, double t) const {
  double m = 0.0;
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) m = std::max(m, eval_(t, grid.xc(i), grid.yc(j)).norm());
  for (const auto& f : grid.boundary_faces()) m = std::max(m, eval_(t, f.x, f.y).norm());
  return m;
}

VectorField GivenData::forcing(const Grid& grid, double t) const {
  if (!f) return VectorField(grid);
  return f(grid, t);
}

DataHypotheses check_hypotheses(const Grid& grid, const GivenData& data) {
  DataHypotheses h;
  for (double v : boundary_normal_derivative(grid, data.c0)) h.c0_normal_flux = std::max(h.c0_normal_flux, std::fabs(v));
  h.u0_divergence = discrete_norm(grid, divergence(grid, data.u0), Norm::lr(2.0));
  for (const auto& face : grid.boundary_faces()) {
    const double ux = boundary_value(grid, data.u0.x(), face);
    const double uy = boundary_value(grid, data.u0.y(), face);
    h.u0_wall = std::max(h.u0_wall, std::hypot(ux, uy));
  }
  return h;
}

std::vector<double> boundary_chemotactic_flux(const Grid& grid, const ScalarField& n, const ScalarField& c,
                                              const SensitivitySpec& S, double t) {
  require_same_grid(grid, n);
  require_same_grid(grid, c);
  std::vector<double> out;
  out.reserve(grid.boundary_face_count());
  for (const auto& face : grid.boundary_faces()) {
    const Gradient2 w = S(t, face.x, face.y).apply(boundary_gradient(grid, c, face));
    out.push_back(boundary_value(grid, n, face) * (w.x * face.normal_x + w.y * face.normal_y));
  }
  return out;
}

SimState initial_state(const Grid& grid, const GivenData& data) {
  require_same_grid(grid, data.n0);
  require_same_grid(grid, data.c0);
  require_same_grid(grid, data.u0);
  SimState s;
  s.t = 0.0;
  s.n = data.n0;
  s.c = data.c0;
  s.u = data.u0;
  s.n_bar0 = mean(grid, data.n0);
  return s;
}

}  // namespace ksns
