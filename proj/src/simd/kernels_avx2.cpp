#include "lrdecon/simd/kernels.hpp"

#include <immintrin.h>

namespace lrdecon::simd {
namespace {

// Two interleaved complex doubles per __m256d: [re0, im0, re1, im1].

inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

// [|a0|^2, |a1|^2, |a2|^2, |a3|^2] for a0..a1 in lo and a2..a3 in hi
inline __m256d norms4(__m256d lo, __m256d hi) {
  const __m256d s = _mm256_hadd_pd(_mm256_mul_pd(lo, lo), _mm256_mul_pd(hi, hi));
  return _mm256_permute4x64_pd(s, 0b11011000);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void complex_multiply_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = load2(a + i);
    const __m256d vb = load2(b + i);
    const __m256d b_re = _mm256_movedup_pd(vb);
    const __m256d b_im = _mm256_permute_pd(vb, 0xF);
    const __m256d a_sw = _mm256_permute_pd(va, 0x5);
    store2(out + i, _mm256_addsub_pd(_mm256_mul_pd(va, b_re), _mm256_mul_pd(a_sw, b_im)));
  }
  scalar_kernels().complex_multiply(a + i, b + i, out + i, n - i);
}

void complex_multiply_conj_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = load2(a + i);
    const __m256d vb = load2(b + i);
    const __m256d b_re = _mm256_movedup_pd(vb);
    const __m256d b_im = _mm256_permute_pd(vb, 0xF);
    const __m256d a_sw = _mm256_permute_pd(va, 0x5);
    const __m256d t2 = _mm256_xor_pd(_mm256_mul_pd(a_sw, b_im), sign);
    store2(out + i, _mm256_addsub_pd(_mm256_mul_pd(va, b_re), t2));
  }
  scalar_kernels().complex_multiply_conj(a + i, b + i, out + i, n - i);
}

inline __m256d conj_product(__m256d vy, __m256d vg, __m256d sign) {
  // y * conj(g)
  const __m256d g_re = _mm256_movedup_pd(vg);
  const __m256d g_im = _mm256_permute_pd(vg, 0xF);
  const __m256d y_sw = _mm256_permute_pd(vy, 0x5);
  const __m256d t2 = _mm256_xor_pd(_mm256_mul_pd(y_sw, g_im), sign);
  return _mm256_addsub_pd(_mm256_mul_pd(vy, g_re), t2);
}

void weighted_conj_accumulate_avx2(const double* w, const cplx* g, const cplx* y, cplx* num,
                                   double* den, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g0 = load2(g + i);
    const __m256d g1 = load2(g + i + 2);
    const __m256d p0 = conj_product(load2(y + i), g0, sign);
    const __m256d p1 = conj_product(load2(y + i + 2), g1, sign);
    const __m256d w0 = _mm256_setr_pd(w[i], w[i], w[i + 1], w[i + 1]);
    const __m256d w1 = _mm256_setr_pd(w[i + 2], w[i + 2], w[i + 3], w[i + 3]);
    store2(num + i, _mm256_add_pd(load2(num + i), _mm256_mul_pd(w0, p0)));
    store2(num + i + 2, _mm256_add_pd(load2(num + i + 2), _mm256_mul_pd(w1, p1)));
    const __m256d wv = _mm256_loadu_pd(w + i);
    const __m256d d = _mm256_loadu_pd(den + i);
    _mm256_storeu_pd(den + i, _mm256_add_pd(d, _mm256_mul_pd(wv, norms4(g0, g1))));
  }
  scalar_kernels().weighted_conj_accumulate(w + i, g + i, y + i, num + i, den + i, n - i);
}

void abs2_avx2(const cplx* a, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, norms4(load2(a + i), load2(a + i + 2)));
  }
  scalar_kernels().abs2(a + i, out + i, n - i);
}

double sum_abs2_avx2(const cplx* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = load2(a + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  return hsum(acc) + scalar_kernels().sum_abs2(a + i, n - i);
}

double sum_abs2_masked_avx2(const cplx* a, const std::uint8_t* mask, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const double m0 = mask[i] != 0 ? 1.0 : 0.0;
    const double m1 = mask[i + 1] != 0 ? 1.0 : 0.0;
    const __m256d mv = _mm256_setr_pd(m0, m0, m1, m1);
    const __m256d v = load2(a + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(mv, _mm256_mul_pd(v, v)));
  }
  return hsum(acc) + scalar_kernels().sum_abs2_masked(a + i, mask + i, n - i);
}

std::size_t hard_threshold_avx2(cplx* a, double lambda, std::size_t n) {
  const __m256d l2 = _mm256_set1_pd(lambda * lambda);
  std::size_t kept = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = load2(a + i);
    const __m256d sq = _mm256_mul_pd(v, v);
    // [|a0|^2, |a0|^2, |a1|^2, |a1|^2]
    const __m256d nrm = _mm256_add_pd(sq, _mm256_permute_pd(sq, 0x5));
    const __m256d keep = _mm256_cmp_pd(nrm, l2, _CMP_GT_OQ);
    store2(a + i, _mm256_and_pd(v, keep));
    const int bits = _mm256_movemask_pd(keep);
    kept += static_cast<std::size_t>((bits & 1) + ((bits >> 2) & 1));
  }
  return kept + scalar_kernels().hard_threshold(a + i, lambda, n - i);
}

double sum_squared_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  return hsum(acc) + scalar_kernels().sum_squared_diff(a + i, b + i, n - i);
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{
      Isa::avx2,
      complex_multiply_avx2,
      complex_multiply_conj_avx2,
      weighted_conj_accumulate_avx2,
      abs2_avx2,
      sum_abs2_avx2,
      sum_abs2_masked_avx2,
      hard_threshold_avx2,
      sum_squared_diff_avx2,
  };
  return table;
}

}  // namespace lrdecon::simd
