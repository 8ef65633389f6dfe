#include <cmath>

#include "doctest.h"
#include "ksns/eigen.hpp"
#include "ksns/linalg.hpp"
#include "test_util.hpp"

using namespace ksns;
using testutil::pi;

namespace {
// Exact eigenvalue of the 1D three-point operator's lowest nontrivial mode.
double mode(double h, double l) {
  const double s = std::sin(pi * h / (2.0 * l));
  return 4.0 / (h * h) * s * s;
}
}  // namespace

TEST_CASE("unit square, h = 1/64") {
  const Grid g = testutil::unit_grid(64);
  const double tol = 1e-8;
  const EigenResult n = lambda_neumann(g, tol);
  const EigenResult d = lambda_dirichlet(g, tol);
  CHECK(std::fabs(n.lambda - pi * pi) <= 0.05);
  CHECK(std::fabs(d.lambda - 2 * pi * pi) <= 0.1);
  CHECK(n.residual <= tol);
  CHECK(d.residual <= tol);
  CHECK(std::fabs(mean(g, n.eigenfield)) <= 1e-10);
  CHECK(std::fabs(rayleigh_quotient(g, n.eigenfield, false) - n.lambda) <= 10 * n.residual);
  CHECK(std::fabs(rayleigh_quotient(g, d.eigenfield, true) - d.lambda) <= 10 * d.residual);
  // discrete closed form
  const double h = 1.0 / 64;
  CHECK(n.lambda == doctest::Approx(mode(h, 1.0)).epsilon(1e-7));
  CHECK(d.lambda == doctest::Approx(2 * mode(h, 1.0)).epsilon(1e-7));
  CHECK(d.lambda > n.lambda);
  CHECK(discrete_norm(g, n.eigenfield, Norm::lr(2)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("2x1 rectangle, h = 1/64") {
  const Grid g({2.0, 1.0, 128, 64});
  const EigenResult n = lambda_neumann(g, 1e-8);
  const EigenResult d = lambda_dirichlet(g, 1e-8);
  CHECK(std::fabs(n.lambda - pi * pi / 4) <= 0.02);
  CHECK(std::fabs(d.lambda - pi * pi * 1.25) <= 0.1);
  CHECK(d.lambda > n.lambda);
  const EigenResult du = lambda_dirichlet(testutil::unit_grid(64), 1e-8);
  CHECK(du.lambda > d.lambda);  // domain monotonicity
}

TEST_CASE("refinement changes lambda by O(h^2)") {
  double l[3], m[3];
  int k = 0;
  for (int n : {8, 16, 32}) {
    const Grid g = testutil::unit_grid(n);
    l[k] = lambda_neumann(g, 1e-10).lambda;
    m[k] = lambda_dirichlet(g, 1e-10).lambda;
    ++k;
  }
  CHECK(std::fabs(l[0] - l[1]) <= 4 * std::fabs(l[1] - l[2]) + 1e-6);
  CHECK(std::fabs(m[0] - m[1]) <= 4 * std::fabs(m[1] - m[2]) + 1e-6);
}

TEST_CASE("preconditions and iteration cap") {
  const Grid g = testutil::unit_grid(16);
  CHECK_THROWS_AS(lambda_neumann(g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lambda_dirichlet(g, 1e-2), std::invalid_argument);
  EigenOptions o;
  o.max_iterations = 1;
  CHECK_THROWS_AS(lambda_neumann(g, 1e-10, o), SolverError);
}
