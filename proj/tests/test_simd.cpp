#include <stdexcept>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ksns/eigen.hpp"
#include "ksns/simd.hpp"
#include "test_util.hpp"

using namespace ksns;

namespace {

std::vector<double> randv(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

struct IsaGuard {
  simd::Isa saved = simd::active_isa();
  ~IsaGuard() { simd::set_active_isa(saved); }
};

}  // namespace

TEST_CASE("scalar kernels against naive loops") {
  std::mt19937_64 rng(1);
  const auto& t = simd::scalar_table();
  for (std::size_t n : {0u, 1u, 3u, 17u, 100u}) {
    auto a = randv(n, rng), b = randv(n, rng);
    double d = 0.0, s = 0.0, m = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      d += a[k] * b[k];
      s += a[k];
      m = std::max(m, std::fabs(a[k]));
    }
    CHECK(t.dot(a.data(), b.data(), n) == doctest::Approx(d).epsilon(1e-14));
    CHECK(t.sum(a.data(), n) == doctest::Approx(s).epsilon(1e-14));
    CHECK(t.max_abs(a.data(), n) == m);
  }
}

TEST_CASE("scalar stencil is the five-point operator") {
  // Neumann: constants map to diag*constant. Dirichlet: 2x at each wall face.
  simd::StencilCoeffs s{5, 4, 0.5, 2.0, 3.0, false};
  std::vector<double> x(20, 1.0), y(20);
  simd::scalar_table().stencil(s, x.data(), y.data());
  for (double v : y) CHECK(v == doctest::Approx(0.5));
  s.dirichlet = true;
  simd::scalar_table().stencil(s, x.data(), y.data());
  // corner (0,0): one west and one south wall face
  CHECK(y[0] == doctest::Approx(0.5 + 2.0 * 2.0 + 3.0 * 2.0));
  // interior (2,1): no wall faces
  CHECK(y[1 * 5 + 2] == doctest::Approx(0.5));
}

TEST_CASE("vector kernels match the scalar reference") {
  if (!simd::supported(simd::Isa::avx2)) {
    MESSAGE("AVX2 not available; equivalence test skipped");
    return;
  }
  const auto& ref = simd::scalar_table();
  const auto& vec = simd::table(simd::Isa::avx2);
  CHECK(vec.isa == simd::Isa::avx2);
  std::mt19937_64 rng(7);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 31u, 64u, 1001u, 4096u}) {
    auto a = randv(n, rng), b = randv(n, rng);
    CHECK(rel(vec.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n)) <= 1e-13);
    CHECK(rel(vec.sum(a.data(), n), ref.sum(a.data(), n)) <= 1e-13);
    CHECK(vec.max_abs(a.data(), n) == ref.max_abs(a.data(), n));

    auto y1 = b, y2 = b;
    ref.axpy(0.37, a.data(), y1.data(), n);
    vec.axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::fabs(y1[k] - y2[k]) <= 4e-16);
    y1 = b, y2 = b;
    ref.xpay(a.data(), -1.3, y1.data(), n);
    vec.xpay(a.data(), -1.3, y2.data(), n);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::fabs(y1[k] - y2[k]) <= 8e-16);
    std::vector<double> o1(n), o2(n);
    ref.mul(a.data(), b.data(), o1.data(), n);
    vec.mul(a.data(), b.data(), o2.data(), n);
    CHECK(o1 == o2);
  }
}

TEST_CASE("vector stencil matches the scalar reference") {
  if (!simd::supported(simd::Isa::avx2)) return;
  const auto& ref = simd::scalar_table();
  const auto& vec = simd::table(simd::Isa::avx2);
  std::mt19937_64 rng(11);
  for (int nx : {4, 5, 6, 7, 8, 9, 13, 33}) {
    for (int ny : {4, 5, 9}) {
      for (bool dir : {false, true}) {
        const simd::StencilCoeffs s{nx, ny, 1.25, 40.0, 17.0, dir};
        auto x = randv(static_cast<std::size_t>(nx) * ny, rng);
        std::vector<double> y1(x.size()), y2(x.size());
        ref.stencil(s, x.data(), y1.data());
        vec.stencil(s, x.data(), y2.data());
        double worst = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) worst = std::max(worst, std::fabs(y1[k] - y2[k]));
        CHECK_MESSAGE(worst <= 1e-12, "nx=" << nx << " ny=" << ny << " dirichlet=" << dir);
      }
    }
  }
}

TEST_CASE("dispatch: switching the active kernel set") {
  IsaGuard guard;
  simd::set_active_isa(simd::Isa::scalar);
  CHECK(simd::active_isa() == simd::Isa::scalar);
  CHECK(simd::to_string(simd::Isa::scalar) == "scalar");
  if (!simd::supported(simd::Isa::avx2)) {
    CHECK_THROWS_AS(simd::set_active_isa(simd::Isa::avx2), std::invalid_argument);
  }
}

TEST_CASE("solver results agree across kernel sets") {
  if (!simd::supported(simd::Isa::avx2)) return;
  IsaGuard guard;
  const Grid g = testutil::unit_grid(32);
  simd::set_active_isa(simd::Isa::scalar);
  const double ls = lambda_neumann(g, 1e-9).lambda;
  simd::set_active_isa(simd::Isa::avx2);
  const double lv = lambda_neumann(g, 1e-9).lambda;
  CHECK(std::fabs(ls - lv) <= 1e-8 * ls);
}
