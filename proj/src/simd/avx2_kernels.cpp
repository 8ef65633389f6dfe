#include "ksns/simd.hpp"

#include <immintrin.h>

#include <cmath>

namespace ksns::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i];
  return s;
}

double max_abs_avx2(const double* a, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(a + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::fmax(r, std::fabs(a[i]));
  return r;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void xpay_avx2(const double* x, double alpha, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) y[i] = x[i] + alpha * y[i];
}

void mul_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void stencil_avx2(const StencilCoeffs& s, const double* x, double* y) {
  const int nx = s.nx;
  const int ny = s.ny;
  const double wall = s.dirichlet ? 2.0 : 0.0;
  const __m256d vdiag = _mm256_set1_pd(s.diag);
  const __m256d vcx = _mm256_set1_pd(s.cx);
  const __m256d vcy = _mm256_set1_pd(s.cy);
  const __m256d vwall = _mm256_set1_pd(wall);

  auto cell = [&](int i, int j) {
    const std::size_t k = static_cast<std::size_t>(j) * nx + i;
    const double xc = x[k];
    double ax = 0.0;
    ax += (i > 0) ? xc - x[k - 1] : wall * xc;
    ax += (i < nx - 1) ? xc - x[k + 1] : wall * xc;
    double ay = 0.0;
    ay += (j > 0) ? xc - x[k - nx] : wall * xc;
    ay += (j < ny - 1) ? xc - x[k + nx] : wall * xc;
    y[k] = s.diag * xc + s.cx * ax + s.cy * ay;
  };

  for (int j = 0; j < ny; ++j) {
    const bool south = j > 0;
    const bool north = j < ny - 1;
    const double* row = x + static_cast<std::size_t>(j) * nx;
    double* out = y + static_cast<std::size_t>(j) * nx;
    cell(0, j);
    int i = 1;
    for (; i + 4 <= nx - 1; i += 4) {
      const __m256d xc = _mm256_loadu_pd(row + i);
      const __m256d ax = _mm256_add_pd(_mm256_sub_pd(xc, _mm256_loadu_pd(row + i - 1)),
                                       _mm256_sub_pd(xc, _mm256_loadu_pd(row + i + 1)));
      const __m256d ys = south ? _mm256_sub_pd(xc, _mm256_loadu_pd(row + i - nx))
                               : _mm256_mul_pd(vwall, xc);
      const __m256d yn = north ? _mm256_sub_pd(xc, _mm256_loadu_pd(row + i + nx))
                               : _mm256_mul_pd(vwall, xc);
      const __m256d ay = _mm256_add_pd(ys, yn);
      __m256d r = _mm256_mul_pd(vdiag, xc);
      r = _mm256_fmadd_pd(vcx, ax, r);
      r = _mm256_fmadd_pd(vcy, ay, r);
      _mm256_storeu_pd(out + i, r);
    }
    for (; i < nx; ++i) cell(i, j);
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t{Isa::avx2, dot_avx2,  sum_avx2, max_abs_avx2,
                             axpy_avx2, xpay_avx2, mul_avx2, stencil_avx2};
  return t;
}

}  // namespace ksns::simd
