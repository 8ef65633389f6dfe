#include "ksns/simd.hpp"

#include <cmath>

namespace ksns::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

double max_abs_scalar(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(a[i]));
  return m;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpay_scalar(const double* x, double alpha, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + alpha * y[i];
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void stencil_scalar(const StencilCoeffs& s, const double* x, double* y) {
  const int nx = s.nx;
  const int ny = s.ny;
  const double wall = s.dirichlet ? 2.0 : 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * nx + i;
      const double xc = x[k];
      double ax = 0.0;
      ax += (i > 0) ? xc - x[k - 1] : wall * xc;
      ax += (i < nx - 1) ? xc - x[k + 1] : wall * xc;
      double ay = 0.0;
      ay += (j > 0) ? xc - x[k - nx] : wall * xc;
      ay += (j < ny - 1) ? xc - x[k + nx] : wall * xc;
      y[k] = s.diag * xc + s.cx * ax + s.cy * ay;
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{Isa::scalar, dot_scalar,  sum_scalar, max_abs_scalar,
                             axpy_scalar, xpay_scalar, mul_scalar, stencil_scalar};
  return t;
}

}  // namespace ksns::simd
