#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "ksns/integrator.hpp"
#include "ksns/presets.hpp"
#include "test_util.hpp"

using namespace ksns;
using testutil::pi;

namespace {

StepOptions tight() {
  StepOptions o;
  o.linear.tol = 1e-12;
  return o;
}

GivenData small_data(const Grid& g, double amp, SensitivitySelector S = {}) {
  return make_data(g, {DataPreset::small, amp, 2.0, 2.0}, S, {}, {});
}

}  // namespace

TEST_CASE("shift transform") {
  const Grid g = testutil::unit_grid(16);
  std::mt19937_64 rng(2);
  SimState s;
  s.t = 0.37;
  s.n = testutil::random_field(g, rng, 0.0, 3.0);
  s.c = testutil::random_field(g, rng, 0.0, 3.0);
  s.u = VectorField(testutil::random_field(g, rng), testutil::random_field(g, rng));
  s.n_bar0 = 1.3;
  const SimState back = unshift(shift_transform(s));
  for (std::size_t k = 0; k < s.n.size(); ++k) {
    CHECK(back.n[k] == doctest::Approx(s.n[k]).epsilon(2.3e-16));
    CHECK(back.c[k] == doctest::Approx(s.c[k]).epsilon(2.3e-16));
  }
  CHECK(back.t == s.t);

  s.n = ScalarField(g, 1.3);
  CHECK(testutil::sup(shift_transform(s).n_tilde) == 0.0);

  const Grid h = testutil::unit_grid(64);
  const auto n0 = ScalarField::sample(h, [](double x, double) { return 2.0 + 0.1 * std::cos(pi * x); });
  SimState s0;
  s0.n = n0;
  s0.c = n0;
  s0.u = VectorField(h);
  s0.n_bar0 = mean(h, n0);
  CHECK(s0.n_bar0 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::fabs(mean(h, shift_transform(s0).n_tilde)) <= 1e-12);
}

TEST_CASE("chemotactic flux: examples") {
  const Grid g = testutil::unit_grid(64);
  const auto c = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
  const VectorField J = chemotactic_flux(g, ScalarField(g, 2.0), c, SensitivitySpec::identity(), 0.0);
  const auto ex = ScalarField::sample(g, [](double x, double) { return -2.0 * pi * std::sin(pi * x); });
  CHECK(testutil::sup_diff(J.x(), ex) <= 0.02);
  CHECK(testutil::sup(J.y()) <= 1e-12);  // one-sided stencils cancel only to rounding
  REQUIRE(J.has_faces());
  for (double b : boundary_normal_flux(g, J.faces())) CHECK(std::fabs(b) <= 2e-3);

  const VectorField Z = chemotactic_flux(g, ScalarField(g, 2.0), ScalarField(g, 5.0), SensitivitySpec::rotation(1, 2), 0.0);
  CHECK(testutil::sup(Z.x()) == 0.0);
  for (double v : Z.faces().x) CHECK(v == 0.0);
  for (double v : Z.faces().y) CHECK(v == 0.0);

  // rotation(0,1): S grad c = (0, -pi sin(pi x)) on the north face
  const VectorField R = chemotactic_flux(g, ScalarField(g, 1.0), c, SensitivitySpec::rotation(0, 1), 0.0);
  const auto bn = boundary_normal_flux(g, R.faces());
  const auto faces = g.boundary_faces();
  double worst = 0.0;
  for (std::size_t k = 0; k < faces.size(); ++k) {
    if (faces[k].side != Side::north) continue;
    worst = std::max(worst, std::fabs(bn[k] + pi * std::sin(pi * faces[k].x)));
  }
  CHECK(worst <= 5e-3);
}

TEST_CASE("upwind transport conserves with wall velocities") {
  const Grid g = testutil::unit_grid(32);
  const VectorField u = helmholtz_project(g, stream_velocity(g, 1.0), LinearStepOptions{});
  std::mt19937_64 rng(12);
  const auto phi = testutil::random_field(g, rng);
  CHECK(std::fabs(integrate(g, upwind_transport(g, u.faces(), phi))) <= 1e-13);
  // constant phi: div(U) times the constant
  CHECK(testutil::sup(upwind_transport(g, u.faces(), ScalarField(g, 3.0))) <= 1e-8);
}

TEST_CASE("step: constant state is a fixed point for every S") {
  const Grid g = testutil::unit_grid(16);
  for (SensitivitySelector S : {SensitivitySelector{}, SensitivitySelector{SensitivitySpec::Kind::scaled_identity, 3.0, 0.0},
                                SensitivitySelector{SensitivitySpec::Kind::rotation, 1.0, -2.0}}) {
    GivenData d = make_data(g, {DataPreset::constant, 0.0, 1.5, 0.0}, S,
                            {PotentialSelector::Kind::linear_gravity, 9.81}, {});
    SimState s = initial_state(g, d);
    for (int k = 0; k < 20; ++k) s = step(g, s, d, 0.01, tight());
    CHECK(testutil::sup_diff(s.n, ScalarField(g, 1.5)) <= 1e-12);
    CHECK(testutil::sup_diff(s.c, ScalarField(g, 1.5)) <= 1e-12);
    CHECK(discrete_norm(g, s.u, Norm::sup()) <= 1e-12);
  }
}

TEST_CASE("step: S = 0 decouples to the heat step") {
  const Grid g = testutil::unit_grid(64);
  GivenData d = make_data(g, {DataPreset::small, 1.0, 2.0, 2.0},
                          {SensitivitySpec::Kind::scaled_identity, 0.0, 0.0}, {}, {});
  const double dt = 0.01;
  const SimState s = step(g, initial_state(g, d), d, dt, tight());
  ScalarField nt = s.n;
  nt += -2.0;
  const auto ex = ScalarField::sample(g, [&](double x, double) { return std::cos(pi * x) / (1 + dt * pi * pi); });
  CHECK(testutil::sup_diff(nt, ex) <= 5e-5);
}

TEST_CASE("step: mass, boundary identity and c-mass recursion on random data") {
  const Grid g({1.0, 1.0, 20, 20});
  std::mt19937_64 rng(31);
  GivenData d = make_data(g, {DataPreset::mixed, 0.05, 2.0, 1.0}, {SensitivitySpec::Kind::rotation, 1.0, 0.5},
                          {PotentialSelector::Kind::linear_gravity, 1.0}, {ForcingSelector::Kind::decaying, 0.1, 1.0});
  d.n0 = testutil::random_field(g, rng, 0.5, 1.5);
  d.c0 = testutil::random_field(g, rng, 0.5, 1.5);
  SimState s = initial_state(g, d);
  const double m0 = integrate(g, s.n);
  const double dt = 1e-3;
  for (int k = 0; k < 100; ++k) {
    const double mc = integrate(g, s.c), mn = integrate(g, s.n);
    s = step(g, s, d, dt, tight());
    CHECK(std::fabs(integrate(g, s.c) - (mc + dt * mn) / (1 + dt)) <= 1e-13);
    REQUIRE(s.bc_diffusive.size() == g.boundary_face_count());
    CHECK(s.bc_diffusive == s.bc_chemotactic);
  }
  CHECK(std::fabs(integrate(g, s.n) - m0) / m0 <= 1e-10);
  CHECK(s.t == doctest::Approx(0.1));
  CHECK(discrete_norm(g, divergence(g, s.u.faces()), Norm::lr(2)) <= 1e-9);
}

TEST_CASE("Picard: constant state, k_max = 1, small data") {
  const Grid g = testutil::unit_grid(16);
  const GivenData c = make_data(g, {DataPreset::constant, 0.0, 2.0, 0.0}, {}, {}, {});
  const PicardResult pc = picard_step(g, initial_state(g, c), c, 1e-2, 5, 1e-9, tight());
  CHECK(pc.iterations == 1);
  CHECK(pc.increment == 0.0);
  CHECK(pc.converged);

  const GivenData d = small_data(g, 0.01, {SensitivitySpec::Kind::rotation, 1.0, 0.5});
  const SimState s0 = initial_state(g, d);
  const PicardResult one = picard_step(g, s0, d, 1e-3, 1, 1e-9, tight());
  const SimState ref = step(g, s0, d, 1e-3, tight());
  CHECK(testutil::sup_diff(one.state.n, ref.n) == 0.0);
  CHECK(testutil::sup_diff(one.state.c, ref.c) == 0.0);

  const PicardResult many = picard_step(g, s0, d, 1e-3, 10, 1e-10, tight());
  CHECK(many.converged);
  CHECK(many.iterations >= 2);
  CHECK(many.contraction < 1.0);
  CHECK_THROWS_AS(picard_step(g, s0, d, 1e-3, 0, 1e-9), std::invalid_argument);
}

TEST_CASE("run: records, snapshots and preconditions") {
  const Grid g = testutil::unit_grid(8);
  const GivenData d = make_data(g, {DataPreset::constant, 0.0, 1.0, 0.0}, {}, {}, {});
  RunOptions o;
  o.dt = 0.01;
  o.T = 0.1;
  o.snapshot_stride = 3;
  const RunResult r = run(g, d, o);
  CHECK(r.series.size() == 10);
  for (const auto& row : r.series.rows) {
    CHECK(row.sup_n_dev <= 1e-10);
    CHECK(row.sup_u == 0.0);
  }
  // t = 0, 0.03, 0.06, 0.09, 0.1
  CHECK(r.trajectory.snapshots.size() == 5);
  CHECK(r.trajectory.snapshots.back().t == doctest::Approx(0.1).epsilon(1e-14));
  for (std::size_t k = 1; k < r.series.size(); ++k) CHECK(r.series.rows[k].t > r.series.rows[k - 1].t);

  o.T = 0.105;  // last step shortened
  const RunResult r2 = run(g, d, o);
  CHECK(r2.series.size() == 11);
  CHECK(r2.final_state.t == doctest::Approx(0.105).epsilon(1e-14));

  o.T = 0.005;
  CHECK_THROWS_AS(run(g, d, o), std::invalid_argument);
}

TEST_CASE("run: blow-up aborts with the last valid state") {
  const Grid g = testutil::unit_grid(8);
  const GivenData d = small_data(g, 0.5);
  RunOptions o;
  o.dt = 0.01;
  o.T = 0.1;
  o.step.blowup_ceiling = 2.4;  // n0 reaches 2.5 after extrapolation-free sampling
  try {
    run(g, d, o);
    FAIL("expected RunAborted");
  } catch (const RunAborted& e) {
    CHECK(e.last_valid().all_finite());
    CHECK(e.partial().series.size() == 0);
  }

  SimState bad = initial_state(g, d);
  bad.c[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(step(g, bad, d, 0.01), BlowUpError);
}
