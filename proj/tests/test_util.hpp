#pragma once

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "ksns/grid.hpp"

namespace testutil {

inline constexpr double pi = std::numbers::pi;

inline ksns::Grid unit_grid(int n) { return ksns::Grid({1.0, 1.0, n, n}); }

inline ksns::ScalarField random_field(const ksns::Grid& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  ksns::ScalarField f(g);
  for (double& v : f.values()) v = d(rng);
  return f;
}

inline double sup_diff(const ksns::ScalarField& a, const ksns::ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a[k] - b[k]));
  return m;
}

inline double sup(const ksns::ScalarField& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::fabs(v));
  return m;
}

// Independent difference operators for norm oracles: central inside,
// one-sided second order at the first/last cell.
inline std::vector<double> d_oracle(const std::vector<double>& f, int n, double h, bool along_x) {
  std::vector<double> out(f.size());
  auto at = [&](int i, int j) { return f[static_cast<std::size_t>(j) * n + i]; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int p = along_x ? i : j;
      auto val = [&](int q) { return along_x ? at(q, j) : at(i, q); };
      double d;
      if (p == 0) d = (-3 * val(0) + 4 * val(1) - val(2)) / (2 * h);
      else if (p == n - 1) d = (3 * val(n - 1) - 4 * val(n - 2) + val(n - 3)) / (2 * h);
      else d = (val(p + 1) - val(p - 1)) / (2 * h);
      out[static_cast<std::size_t>(j) * n + i] = d;
    }
  }
  return out;
}

/// W^{2,r} norm on the n-by-n unit grid by direct summation over f, f_x,
/// f_y, f_xx, f_xy, f_yy.
inline double w2_oracle(const ksns::ScalarField& field, int n, double r) {
  std::vector<double> f(field.values().begin(), field.values().end());
  const double h = 1.0 / n, vol = h * h;
  const auto fx = d_oracle(f, n, h, true), fy = d_oracle(f, n, h, false);
  const auto fxx = d_oracle(fx, n, h, true), fxy = d_oracle(fx, n, h, false), fyy = d_oracle(fy, n, h, false);
  double s = 0.0;
  for (const std::vector<double>* v : std::initializer_list<const std::vector<double>*>{&f, &fx, &fy, &fxx, &fxy, &fyy})
    for (double x : *v) s += std::pow(std::fabs(x), r) * vol;
  return std::pow(s, 1.0 / r);
}

}  // namespace testutil
