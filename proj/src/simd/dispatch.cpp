#include "ksns/simd.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ksns::simd {
namespace {

bool cpu_has_avx2() {
#if defined(KSNS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  Isa isa = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  if (const char* env = std::getenv("KSNS_SIMD")) {
    const std::string v(env);
    if (v == "scalar") isa = Isa::scalar;
    else if (v == "avx2" && cpu_has_avx2()) isa = Isa::avx2;
  }
  return isa;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> t{&table(initial_isa())};
  return t;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool supported(Isa isa) {
  return isa == Isa::scalar || (isa == Isa::avx2 && cpu_has_avx2());
}

const KernelTable& table(Isa isa) {
#if defined(KSNS_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2_table();
#endif
  if (isa != Isa::scalar) throw std::invalid_argument("kernel ISA not built");
  return scalar_table();
}

Isa active_isa() { return current().load()->isa; }

void set_active_isa(Isa isa) {
  if (!supported(isa)) {
    throw std::invalid_argument("kernel ISA not supported: " + std::string(to_string(isa)));
  }
  current().store(&table(isa));
}

const KernelTable& active() { return *current().load(); }

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

double max_abs(std::span<const double> a) { return active().max_abs(a.data(), a.size()); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void xpay(std::span<const double> x, double alpha, std::span<double> y) {
  assert(x.size() == y.size());
  active().xpay(x.data(), alpha, y.data(), x.size());
}

void mul(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  active().mul(a.data(), b.data(), out.data(), a.size());
}

void apply_stencil(const StencilCoeffs& s, std::span<const double> x, std::span<double> y) {
  assert(x.size() == static_cast<std::size_t>(s.nx) * s.ny && y.size() == x.size());
  active().stencil(s, x.data(), y.data());
}

}  // namespace ksns::simd
