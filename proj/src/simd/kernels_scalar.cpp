#include "lrdecon/simd/kernels.hpp"

#include <cmath>

namespace lrdecon::simd {
namespace {

// Complex arithmetic is spelled out on the real and imaginary parts so the
// scalar path matches the vector path operation for operation.

void complex_multiply_ref(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
  }
}

void complex_multiply_conj_ref(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cplx(ar * br + ai * bi, ai * br - ar * bi);
  }
}

void weighted_conj_accumulate_ref(const double* w, const cplx* g, const cplx* y, cplx* num,
                                  double* den, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double gr = g[i].real(), gi = g[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    const double pr = gr * yr + gi * yi;
    const double pi = gr * yi - gi * yr;
    num[i] = cplx(num[i].real() + w[i] * pr, num[i].imag() + w[i] * pi);
    den[i] += w[i] * (gr * gr + gi * gi);
  }
}

void abs2_ref(const cplx* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double r = a[i].real(), im = a[i].imag();
    out[i] = r * r + im * im;
  }
}

double sum_abs2_ref(const cplx* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = a[i].real(), im = a[i].imag();
    s += r * r + im * im;
  }
  return s;
}

double sum_abs2_masked_ref(const cplx* a, const std::uint8_t* mask, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i] != 0) {
      const double r = a[i].real(), im = a[i].imag();
      s += r * r + im * im;
    }
  }
  return s;
}

std::size_t hard_threshold_ref(cplx* a, double lambda, std::size_t n) {
  const double l2 = lambda * lambda;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = a[i].real(), im = a[i].imag();
    if (r * r + im * im > l2) {
      ++kept;
    } else {
      a[i] = cplx(0.0, 0.0);
    }
  }
  return kept;
}

double sum_squared_diff_ref(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      Isa::scalar,
      complex_multiply_ref,
      complex_multiply_conj_ref,
      weighted_conj_accumulate_ref,
      abs2_ref,
      sum_abs2_ref,
      sum_abs2_masked_ref,
      hard_threshold_ref,
      sum_squared_diff_ref,
  };
  return table;
}

}  // namespace lrdecon::simd
