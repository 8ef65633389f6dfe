#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ksns/diagnostics.hpp"
#include "ksns/integrator.hpp"
#include "ksns/lipschitz.hpp"
#include "ksns/presets.hpp"
#include "test_util.hpp"

using namespace ksns;
using testutil::pi;

TEST_CASE("exponent and rate validation") {
  DiagnosticsConfig c;
  CHECK_NOTHROW(validate_exponents(c));
  c.r = 3;
  c.q = 3;  // 1/3 + 2/3 = 1
  CHECK_THROWS_AS(validate_exponents(c), DiagnosticsError);
  c = {};
  c.r = 2;
  CHECK_THROWS_AS(validate_exponents(c), DiagnosticsError);
  c = {};
  c.q = 2;
  CHECK_THROWS_AS(validate_exponents(c), DiagnosticsError);

  const double ln = pi * pi, ld = 2 * pi * pi;
  c = {};
  c.lambda1 = default_lambda1(ln, c.q);
  CHECK(c.lambda1 == doctest::Approx(0.5));
  CHECK_NOTHROW(validate(c, ln, ld));
  c.lambda1 = 1.0;
  CHECK_THROWS_AS(validate(c, ln, ld), DiagnosticsError);
  c.lambda1 = 0.5;
  c.lambda2 = 0.6;
  CHECK_THROWS_AS(validate(c, ln, ld), DiagnosticsError);
  c.lambda2 = 0.4;
  CHECK_NOTHROW(validate(c, ln, ld));
  CHECK_THROWS_AS(validate(c, ln, 1.0), DiagnosticsError);  // lambda2 >= lambda_D/q
}

TEST_CASE("mass identity residuals") {
  CHECK_THROWS_AS(mass_identity_residuals(DiagnosticsSeries{}, 1, 1), DiagnosticsError);

  // n0 = 2, c0 = 0: M_c(1) = 2(1 - 1/e)
  const Grid g = testutil::unit_grid(8);
  GivenData d = make_data(g, {DataPreset::constant, 0.0, 2.0, 0.0}, {}, {}, {});
  d.c0 = ScalarField(g, 0.0);
  RunOptions o;
  o.dt = 1e-3;
  o.T = 1.0;
  const RunResult r = run(g, d, o);
  CHECK(r.series.rows.back().mass_c == doctest::Approx(2 * (1 - std::exp(-1.0))).epsilon(5e-3));
  const MassResiduals m = mass_identity_residuals(r.series, 2.0, 0.0);
  CHECK(m.n <= 1e-10);
  CHECK(m.c <= 5e-3);
  CHECK(c_mass_recursion_residual(r.series, 0.0, 2.0, o.dt, 1.0) <= 1e-13);

  o.step.linear.theta = 0.5;
  const RunResult cn = run(g, d, o);
  CHECK(c_mass_recursion_residual(cn.series, 0.0, 2.0, o.dt, 0.5) <= 1e-13);
  CHECK(mass_identity_residuals(cn.series, 2.0, 0.0).c <= 5e-6);
}

TEST_CASE("fit_decay_rate") {
  std::vector<std::pair<double, double>> s;
  for (int k = 0; k <= 100; ++k) s.emplace_back(0.01 * k, 5.0 * std::exp(-2.0 * 0.01 * k));
  const DecayFit f = fit_decay_rate(s, 0.0, 1.0);
  CHECK(f.rate == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.amplitude == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(f.residual < 1e-10);
  CHECK(f.samples == 101);

  for (auto& p : s) p.second = 3.0;
  CHECK(std::fabs(fit_decay_rate(s, 0.0, 1.0).rate) <= 1e-14);

  for (int k = 0; k <= 100; ++k) s[k].second = k < 50 ? std::exp(-0.01 * k) : 0.0;
  const DecayFit t = fit_decay_rate(s, 0.0, 1.0);
  CHECK(t.truncated);
  CHECK(t.samples == 50);
  CHECK(t.rate == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_decay_rate(s, 0.7, 1.0), DiagnosticsError);
}

TEST_CASE("decay fit of a pure heat run recovers lambda_N") {
  const Grid g = testutil::unit_grid(32);
  ScalarField U = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
  LinearStepOptions o;
  o.tol = 1e-12;
  std::vector<std::pair<double, double>> s;
  const double dt = 1e-3;
  for (int k = 1; k <= 1000; ++k) {
    U = step_neumann_heat(g, U, VectorField(g), ScalarField(g), dt, o);
    s.emplace_back(k * dt, discrete_norm(g, U, Norm::sup()));
  }
  CHECK(std::fabs(fit_decay_rate(s, 1.0 / 3, 1.0).rate - pi * pi) <= 0.05 * pi * pi);
}

TEST_CASE("smallness functional") {
  const Grid g = testutil::unit_grid(32);
  DiagnosticsConfig cfg;
  GivenData zero = make_data(g, {DataPreset::constant, 0.0, 0.0, 0.0}, {}, {}, {});
  CHECK(smallness_functional(g, zero, cfg, 1.0, 0.01) == 0.0);

  GivenData d = make_data(g, {DataPreset::mixed, 0.3, 1.0, 2.0}, {}, {}, {ForcingSelector::Kind::decaying, 0.2, 2.0});
  const double base = smallness_functional(g, d, cfg, 1.0, 0.01);
  GivenData s = d;
  s.n0 *= 2.5;
  s.c0 *= 2.5;
  s.u0 *= 2.5;
  s.f = make_forcing({ForcingSelector::Kind::decaying, 0.5, 2.0});
  CHECK(smallness_functional(g, s, cfg, 1.0, 0.01) == doctest::Approx(2.5 * base).epsilon(1e-12));

  // n0 = cos(pi x), r = 2: the W^{2,2} proxy alone
  DiagnosticsConfig c2;
  c2.r = 2.5;
  GivenData one = zero;
  one.n0 = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
  CHECK(smallness_functional(g, one, c2, 1.0, 0.01) == doctest::Approx(testutil::w2_oracle(one.n0, 32, 2.5)).epsilon(1e-12));

  // forcing term alone: (sum dt (e^{l2 t} ||f||_r)^q)^{1/q}
  GivenData fo = zero;
  fo.f = make_forcing({ForcingSelector::Kind::decaying, 1.0, 3.0});
  const double fr = discrete_norm(g, fo.f(g, 0.0), Norm::lr(4));
  double sum = 0.0;
  for (int k = 0; k < 100; ++k) sum += 0.01 * std::pow(std::exp(-3.0 * 0.01 * k) * fr, 4);
  CHECK(smallness_functional(g, fo, cfg, 1.0, 0.01) == doctest::Approx(std::pow(sum, 0.25)).epsilon(1e-12));
}

TEST_CASE("weighted solution norm") {
  const Grid g = testutil::unit_grid(16);
  DiagnosticsConfig cfg;
  ShiftedTrajectory z;
  z.spacing = 0.1;
  for (int k = 0; k < 3; ++k) {
    z.t.push_back(0.1 * k);
    z.n_tilde.emplace_back(g);
    z.c_tilde.emplace_back(g);
    z.u.emplace_back(g);
  }
  CHECK(weighted_solution_norm(g, z, cfg) == 0.0);

  std::mt19937_64 rng(17);
  ShiftedTrajectory a = z;
  for (int k = 0; k < 3; ++k) {
    a.n_tilde[k] = testutil::random_field(g, rng);
    a.c_tilde[k] = testutil::random_field(g, rng);
    a.u[k] = VectorField(testutil::random_field(g, rng), testutil::random_field(g, rng));
  }
  ShiftedTrajectory b = a;
  for (int k = 0; k < 3; ++k) {
    b.n_tilde[k] *= 3.0;
    b.c_tilde[k] *= 3.0;
    b.u[k] *= 3.0;
  }
  CHECK(weighted_solution_norm(g, b, cfg) == doctest::Approx(3.0 * weighted_solution_norm(g, a, cfg)).epsilon(1e-12));

  // single snapshot: (spacing * W2r(n)^q)^{1/q}
  ShiftedTrajectory one;
  one.spacing = 0.5;
  one.t = {0.0};
  one.n_tilde = {ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); })};
  one.c_tilde = {ScalarField(g)};
  one.u = {VectorField(g)};
  const double w = testutil::w2_oracle(one.n_tilde[0], 16, cfg.r);
  CHECK(weighted_solution_norm(g, one, cfg) == doctest::Approx(std::pow(0.5 * std::pow(w, cfg.q), 1.0 / cfg.q)).epsilon(1e-12));

  ShiftedTrajectory shorter = a;
  shorter.t.pop_back();
  shorter.n_tilde.pop_back();
  shorter.c_tilde.pop_back();
  shorter.u.pop_back();
  CHECK_THROWS_AS(difference(a, shorter), DiagnosticsError);
}

TEST_CASE("negativity") {
  const Grid g = testutil::unit_grid(16);
  CHECK(negative_energy(g, ScalarField(g, -1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(negative_energy(g, ScalarField(g, 1.0)) == 0.0);
  std::mt19937_64 rng(5);
  const auto f = testutil::random_field(g, rng);
  double min = 0.0;
  for (double v : f.values()) min = std::min(min, v);
  CHECK(negative_energy(g, f) > 0.0);
  CHECK(min < 0.0);

  Trajectory t;
  SimState s;
  s.n = ScalarField(g, 1.0);
  s.c = ScalarField(g, -1.0);
  s.u = VectorField(g);
  t.snapshots = {s};
  const NegativityReport r = negativity_report(g, t);
  CHECK(r.min_n == 1.0);
  CHECK(r.min_c == -1.0);
  CHECK(r.neg_energy_n == 0.0);
  CHECK(r.neg_energy_c == doctest::Approx(1.0));
}

TEST_CASE("boundary residual and compatibility detector") {
  const Grid g = testutil::unit_grid(64);
  const auto c = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x); });
  GivenData d = make_data(g, {DataPreset::constant, 0.0, 1.0, 0.0}, {}, {}, {});
  SimState s;
  s.n = ScalarField(g, 1.0);
  s.c = c;
  s.u = VectorField(g);
  CHECK(boundary_residual(g, s, d) <= 2e-3);  // S = I, grad c.nu = O(h^2)
  d.S = SensitivitySpec::rotation(0, 1);
  CHECK(std::fabs(boundary_residual(g, s, d) - pi) <= 0.05);

  CHECK(compatibility_check(g, ScalarField(g, 1.0), c, SensitivitySpec::identity()) <= 2e-3);
  CHECK(std::fabs(compatibility_check(g, ScalarField(g, 1.0), c, SensitivitySpec::rotation(0, 1)) - pi) <= 0.05);
  CHECK(compatibility_check(g, ScalarField(g, 2.0), ScalarField(g, 2.0), SensitivitySpec::rotation(1, 3)) == 0.0);

  GivenData m = make_data(g, {DataPreset::small, 0.1, 1.0, 1.0}, {SensitivitySpec::Kind::rotation, 1.0, 1.0}, {}, {});
  const SimState stepped = step(g, initial_state(g, m), m, 1e-3);
  CHECK(boundary_residual(g, stepped, m) <= 1e-12);
}

TEST_CASE("diagnostics CSV") {
  DiagnosticsSeries s;
  DiagnosticsRow r;
  r.t = 0.1;
  r.mass_n = 1.0 / 3.0;
  r.picard_iters = 2;
  s.rows.push_back(r);
  std::ostringstream os;
  write_diagnostics_csv(os, s);
  const std::string out = os.str();
  CHECK(out.rfind(std::string(kDiagnosticsHeader) + "\n", 0) == 0);
  CHECK(out.find("0.33333333333333331") != std::string::npos);
  const std::string row = out.substr(out.find('\n') + 1);
  CHECK(std::count(row.begin(), row.end(), ',') == 12);
}

TEST_CASE("Lipschitz experiment: identical data is degenerate") {
  const Grid g = testutil::unit_grid(8);
  const GivenData d = make_data(g, {DataPreset::small, 0.01, 2.0, 2.0}, {}, {}, {});
  RunOptions o;
  o.dt = 0.01;
  o.T = 0.1;
  o.snapshot_stride = 2;
  const LipschitzResult r = lipschitz_experiment(g, d, d, DiagnosticsConfig{}, o);
  CHECK(r.degenerate);
  CHECK(r.ratio == 0.0);
  CHECK(r.diff_norm == 0.0);

  const LipschitzResult p1 = lipschitz_experiment(g, d, perturb_n0(g, d, 1e-3), DiagnosticsConfig{}, o, 1);
  const LipschitzResult p2 = lipschitz_experiment(g, d, perturb_n0(g, d, 1e-3), DiagnosticsConfig{}, o, 2);
  CHECK(p1.ratio > 0.0);
  CHECK(p1.ratio == p2.ratio);  // thread count does not change results
}
