#pragma once

// Shared helpers for the test binaries: random inputs and brute-force oracles.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "lrdecon/fourier.hpp"

namespace lrdecon::testing {

inline std::vector<double> random_samples(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> x(n);
  for (auto& v : x) v = z(rng);
  return x;
}

inline PeriodicSignal random_signal(std::size_t n, std::uint64_t seed) {
  return PeriodicSignal(random_samples(n, seed));
}

// Direct O(n^2) evaluation of (1/n) sum_i x_i exp(-2 pi i m i / n).
inline cplx naive_coeff(std::span<const double> x, long m) {
  const double n = static_cast<double>(x.size());
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ang = -2.0 * std::numbers::pi * static_cast<double>(m) * static_cast<double>(i) / n;
    acc += x[i] * cplx(std::cos(ang), std::sin(ang));
  }
  return acc / n;
}

// Riemann-sum convolution (1/n) sum_k f(t_k) g(t_i - t_k).
inline std::vector<double> naive_convolve(std::span<const double> f, std::span<const double> g) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += f[k] * g[(i + n - k) % n];
    out[i] = acc / static_cast<double>(n);
  }
  return out;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline double rel_l2(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace lrdecon::testing
