#include <atomic>
#include <cstdlib>
#include <string>

#include "lrdecon/error.hpp"
#include "lrdecon/simd/kernels.hpp"

namespace lrdecon::simd {
namespace {

const KernelTable* detect() {
  if (const char* env = std::getenv("LRDECON_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_kernels();
#if defined(LRDECON_HAVE_AVX2)
    if (want == "avx2" && cpu_has_avx2()) return &avx2_kernels();
#endif
  }
#if defined(LRDECON_HAVE_AVX2)
  if (cpu_has_avx2()) return &avx2_kernels();
#endif
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_active(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      slot().store(&scalar_kernels(), std::memory_order_release);
      return;
    case Isa::avx2:
#if defined(LRDECON_HAVE_AVX2)
      if (cpu_has_avx2()) {
        slot().store(&avx2_kernels(), std::memory_order_release);
        return;
      }
#endif
      throw InvalidInput("AVX2 kernels are not available on this build or CPU");
  }
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

void complex_multiply(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  if (a.size() != b.size() || a.size() != out.size()) {
    throw InvalidInput("complex_multiply: length mismatch");
  }
  active().complex_multiply(a.data(), b.data(), out.data(), a.size());
}

void complex_multiply_conj(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  if (a.size() != b.size() || a.size() != out.size()) {
    throw InvalidInput("complex_multiply_conj: length mismatch");
  }
  active().complex_multiply_conj(a.data(), b.data(), out.data(), a.size());
}

double sum_abs2(std::span<const cplx> a) { return active().sum_abs2(a.data(), a.size()); }

std::size_t hard_threshold(std::span<cplx> a, double lambda) {
  return active().hard_threshold(a.data(), lambda, a.size());
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("sum_squared_diff: length mismatch");
  return active().sum_squared_diff(a.data(), b.data(), a.size());
}

}  // namespace lrdecon::simd
