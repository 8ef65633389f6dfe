#pragma once

// Data-parallel inner loops used by the linear solvers and norms.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The variant is picked once at startup from the CPU
// feature bits; KSNS_SIMD=scalar|avx2 in the environment overrides it.
// Reductions in the vector variants use a different summation order, so
// results agree with the scalar path to rounding, not bitwise.

#include <cstddef>
#include <span>
#include <string_view>

namespace ksns::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// Five-point operator on an nx-by-ny cell grid (row-major, x fastest):
///   y_i = diag*x_i + cx*sum_{x-faces}(x_i - x_nb) + cy*sum_{y-faces}(x_i - x_nb)
/// Boundary faces contribute nothing for Neumann and 2*x_i (ghost value -x_i)
/// for Dirichlet.
struct StencilCoeffs {
  int nx = 0;
  int ny = 0;
  double diag = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  bool dirichlet = false;
};

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*xpay)(const double* x, double alpha, double* y, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  void (*stencil)(const StencilCoeffs& s, const double* x, double* y);
};

const KernelTable& scalar_table();
#if defined(KSNS_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

bool supported(Isa isa);
Isa active_isa();
/// Throws std::invalid_argument if the ISA is not available on this build/CPU.
void set_active_isa(Isa isa);
const KernelTable& table(Isa isa);
const KernelTable& active();

// Span front-ends over the active table.
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double max_abs(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpay(std::span<const double> x, double alpha, std::span<double> y);
void mul(std::span<const double> a, std::span<const double> b, std::span<double> out);
void apply_stencil(const StencilCoeffs& s, std::span<const double> x, std::span<double> y);

}  // namespace ksns::simd
