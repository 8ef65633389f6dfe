#include <cmath>
#include <random>

#include "doctest.h"
#include "ksns/linstep.hpp"
#include "ksns/presets.hpp"
#include "test_util.hpp"

using namespace ksns;
using testutil::pi;

namespace {
LinearStepOptions opts(double tol = 1e-12) {
  LinearStepOptions o;
  o.tol = tol;
  return o;
}
}  // namespace

TEST_CASE("Neumann heat: one implicit step on cos(pi x)") {
  const Grid g = testutil::unit_grid(64);
  const double dt = 0.01;
  const auto U = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
  const ScalarField out = step_neumann_heat(g, U, VectorField(g), ScalarField(g), dt, opts());
  const auto exact = ScalarField::sample(g, [&](double x, double) { return std::cos(pi * x) / (1 + dt * pi * pi); });
  CHECK(testutil::sup_diff(out, exact) <= 5e-5);
  // discrete eigenvalue: exact up to the solver
  const double h = 1.0 / 64, s = std::sin(pi * h / 2), lam = 4 / (h * h) * s * s;
  CHECK(testutil::sup_diff(out, (1.0 / (1 + dt * lam)) * U) <= 1e-10);
}

TEST_CASE("Neumann heat: zero data stays zero") {
  const Grid g = testutil::unit_grid(16);
  const ScalarField out = step_neumann_heat(g, ScalarField(g), VectorField(g), ScalarField(g), 0.1, opts());
  CHECK(testutil::sup(out) == 0.0);
}

TEST_CASE("Neumann heat: steady state for F_B = (1, 0)") {
  const Grid g = testutil::unit_grid(32);
  const VectorField FB = VectorField::sample(g, [](double, double) { return std::pair{1.0, 0.0}; });
  ScalarField U(g);
  const double dt = 0.01;
  for (int k = 0; k < 500; ++k) U = step_neumann_heat(g, U, FB, ScalarField(g), dt, opts());
  const auto target = ScalarField::sample(g, [](double x, double) { return x - 0.5; });
  CHECK(testutil::sup_diff(U, target) <= 1e-2);
  CHECK(std::fabs(mean(g, U)) <= 1e-10);
}

TEST_CASE("Neumann heat: mean preserved with zero-mean F_E and random flux") {
  const Grid g({1.5, 1.0, 24, 16});
  std::mt19937_64 rng(21);
  const auto U = testutil::random_field(g, rng);
  const VectorField FB(testutil::random_field(g, rng), testutil::random_field(g, rng));
  ScalarField FE = testutil::random_field(g, rng);
  FE += -mean(g, FE);
  for (double theta : {1.0, 0.5}) {
    LinearStepOptions o = opts();
    o.theta = theta;
    std::vector<double> imposed;
    const ScalarField out = step_neumann_heat(g, U, face_values(g, FB), FE, 0.02, o, nullptr, &imposed);
    CHECK(std::fabs(mean(g, out) - mean(g, U)) <= 1e-13);
    CHECK(imposed == boundary_normal_flux(g, face_values(g, FB)));
  }
}

TEST_CASE("Neumann heat: preconditions") {
  const Grid g = testutil::unit_grid(8);
  CHECK_THROWS_AS(step_neumann_heat(g, ScalarField(g), VectorField(g), ScalarField(g, 1.0), 0.1, opts()),
                  PreconditionError);
  CHECK_THROWS_AS(step_neumann_heat(g, ScalarField(g), VectorField(g), ScalarField(g), -0.1, opts()),
                  PreconditionError);
  LinearStepOptions o = opts();
  o.theta = 0.3;
  CHECK_THROWS_AS(step_neumann_heat(g, ScalarField(g), VectorField(g), ScalarField(g), 0.1, o), PreconditionError);
}

TEST_CASE("shifted heat: examples") {
  const Grid g = testutil::unit_grid(64);
  const double dt = 0.05;
  const ScalarField one = step_shifted_heat(g, ScalarField(g, 1.0), ScalarField(g, 1.0), dt, opts());
  CHECK(testutil::sup_diff(one, ScalarField(g, 1.0)) <= 1e-14);
  const ScalarField two = step_shifted_heat(g, ScalarField(g, 2.0), ScalarField(g), dt, opts());
  CHECK(testutil::sup_diff(two, ScalarField(g, 2.0 / (1 + dt))) <= 1e-13);
  const auto c = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
  const ScalarField m = step_shifted_heat(g, c, ScalarField(g), dt, opts());
  const auto exact =
      ScalarField::sample(g, [&](double x, double) { return std::cos(pi * x) / (1 + dt * (1 + pi * pi)); });
  CHECK(testutil::sup_diff(m, exact) <= 1e-4);
}

TEST_CASE("Helmholtz projection: gradients, solenoidal fields, zero") {
  const Grid g = testutil::unit_grid(64);
  const auto o = opts(1e-12);
  const VectorField grad = VectorField::sample(g, [](double x, double y) { return std::pair{x, y}; });
  CHECK(discrete_norm(g, helmholtz_project(g, grad, o), Norm::lr(2)) <= 1e-3);

  const VectorField sol = VectorField::sample(g, [](double x, double y) {
    return std::pair{-pi * std::sin(pi * x) * std::cos(pi * y), pi * std::cos(pi * x) * std::sin(pi * y)};
  });
  const VectorField p = helmholtz_project(g, sol, o);
  const VectorField diff(p.x() - sol.x(), p.y() - sol.y());
  CHECK(discrete_norm(g, diff, Norm::lr(2)) <= 5e-3);

  const VectorField z = helmholtz_project(g, VectorField(g), o);
  CHECK(discrete_norm(g, z, Norm::sup()) == 0.0);
}

TEST_CASE("Helmholtz projection: divergence-free faces, zero normal trace, idempotent") {
  const Grid g({1.0, 2.0, 20, 40});
  std::mt19937_64 rng(4);
  const VectorField v(testutil::random_field(g, rng), testutil::random_field(g, rng));
  const auto o = opts(1e-12);
  const Projection pr = helmholtz_decompose(g, v, o);
  REQUIRE(pr.field.has_faces());
  const ScalarField div = divergence(g, pr.field.faces());
  CHECK(discrete_norm(g, div, Norm::lr(2)) <= 1e-8 * discrete_norm(g, divergence(g, v), Norm::lr(2)));
  for (double b : boundary_normal_flux(g, pr.field.faces())) CHECK(b == 0.0);
  CHECK(std::fabs(mean(g, pr.pressure)) <= 1e-12);

  const VectorField twice = helmholtz_project(g, pr.field, o);
  const VectorField d(twice.x() - pr.field.x(), twice.y() - pr.field.y());
  CHECK(discrete_norm(g, d, Norm::lr(2)) <= 1e-9 * discrete_norm(g, pr.field, Norm::lr(2)));
}

TEST_CASE("Helmholtz projection: orthogonality on the faces") {
  // <v - Pv, Pv> over face values (the space the projection acts on).
  const Grid g = testutil::unit_grid(24);
  std::mt19937_64 rng(8);
  const VectorField v(testutil::random_field(g, rng), testutil::random_field(g, rng));
  const Projection pr = helmholtz_decompose(g, v, opts(1e-13));
  const FaceFlux fv = face_values(g, v);
  const FaceFlux& fp = pr.field.faces();
  double cross = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < fp.x.size(); ++k) {
    cross += (fv.x[k] - fp.x[k]) * fp.x[k];
    norm += fp.x[k] * fp.x[k];
  }
  for (std::size_t k = 0; k < fp.y.size(); ++k) {
    cross += (fv.y[k] - fp.y[k]) * fp.y[k];
    norm += fp.y[k] * fp.y[k];
  }
  CHECK(std::fabs(cross) <= 1e-9 * norm);
}

TEST_CASE("Stokes step: zero, divergence-free output, energy decay") {
  const Grid g = testutil::unit_grid(32);
  const auto o = opts(1e-12);
  const VectorField z = step_stokes(g, VectorField(g), VectorField(g), 0.01, o);
  CHECK(discrete_norm(g, z, Norm::sup()) == 0.0);

  VectorField u = helmholtz_project(g, stream_velocity(g, 0.1), o);
  double energy = inner_product(g, u, u);
  for (int k = 0; k < 50; ++k) {
    u = step_stokes(g, u, VectorField(g), 0.005, o);
    const double e = inner_product(g, u, u);
    CHECK(e <= energy);
    energy = e;
    REQUIRE(u.has_faces());
  }
  CHECK(discrete_norm(g, divergence(g, u.faces()), Norm::lr(2)) <= 1e-9);
  for (double b : boundary_normal_flux(g, u.faces())) CHECK(b == 0.0);
}
