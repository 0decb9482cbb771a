#pragma once

// Inner loops shared by the Fourier, wavelet and estimator modules. Each
// kernel has a scalar reference and, where the CPU supports it, an AVX2
// variant chosen once at runtime. Elementwise kernels are bit-identical
// across variants; reductions agree to rounding (summation order differs).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace lrdecon::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // out[i] = a[i] * b[i]
  void (*complex_multiply)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
  // out[i] = a[i] * conj(b[i])
  void (*complex_multiply_conj)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
  // num[i] += w[i] * conj(g[i]) * y[i];  den[i] += w[i] * |g[i]|^2
  void (*weighted_conj_accumulate)(const double* w, const cplx* g, const cplx* y, cplx* num,
                                   double* den, std::size_t n);
  // out[i] = |a[i]|^2
  void (*abs2)(const cplx* a, double* out, std::size_t n);
  // sum |a[i]|^2
  double (*sum_abs2)(const cplx* a, std::size_t n);
  // sum |a[i]|^2 over mask[i] != 0
  double (*sum_abs2_masked)(const cplx* a, const std::uint8_t* mask, std::size_t n);
  // zero every entry with |a[i]| <= lambda; returns the number kept
  std::size_t (*hard_threshold)(cplx* a, double lambda, std::size_t n);
  // sum (a[i] - b[i])^2
  double (*sum_squared_diff)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels();
#if defined(LRDECON_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

bool cpu_has_avx2();

/// Table used by the library. Chosen on first use from the CPU, unless the
/// LRDECON_SIMD environment variable names "scalar" or "avx2".
const KernelTable& active();

/// Pins the active table (tests and benchmarks). Throws InvalidInput if the
/// requested ISA is unavailable on this build or CPU.
void set_active(Isa isa);

std::string_view isa_name(Isa isa);

// Span conveniences over the active table.
void complex_multiply(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
void complex_multiply_conj(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out);
double sum_abs2(std::span<const cplx> a);
std::size_t hard_threshold(std::span<cplx> a, double lambda);
double sum_squared_diff(std::span<const double> a, std::span<const double> b);

}  // namespace lrdecon::simd
