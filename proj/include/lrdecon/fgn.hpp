#pragma once

// Exact fractional Gaussian noise by circulant embedding (Davies-Harte).
//
// Unit-variance discrete fGn: gamma(h) = (|h+1|^{2H} - 2|h|^{2H} + |h-1|^{2H}) / 2.
// Model parameterization: alpha = 2 - 2H, with H in [1/2, 1), alpha in (0, 1].

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace lrdecon {

struct FgnParams {
  double hurst = 0.5;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  static FgnParams from_alpha(double alpha, std::size_t n, std::uint64_t seed);
  double alpha() const noexcept { return 2.0 - 2.0 * hurst; }
  /// Throws InvalidInput for H outside [1/2, 1) or n not a power of two.
  void validate() const;
};

double fgn_autocovariance(double hurst, long lag) noexcept;

/// Precomputed embedding for one (H, n); immutable and shareable. Sampling
/// draws from a caller-owned engine.
class CirculantFgn {
 public:
  CirculantFgn(double hurst, std::size_t n);

  double hurst() const noexcept { return hurst_; }
  std::size_t size() const noexcept { return n_; }
  /// Smallest eigenvalue of the embedding before clipping rounding-level negatives.
  double min_eigenvalue() const noexcept { return min_eig_; }

  std::vector<double> sample(std::mt19937_64& rng) const;

 private:
  double hurst_;
  std::size_t n_;
  double min_eig_;
  std::vector<double> sqrt_eig_;  // length 2n, sqrt(lambda_k / 2n)
};

std::vector<double> sample_fgn(const FgnParams& params);

/// Monte Carlo covariance of noise Fourier coefficients, on the calibration
/// used by the observation model (paths scaled by n^{alpha/2}, forward DFT
/// with 1/n).
struct FourierCovarianceReport {
  double hurst = 0.5;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::size_t max_freq = 0;
  /// E|Z(m)|^2 for m = 1..max_freq (index m-1).
  std::vector<double> variance;
  /// OLS slope of log variance on log m; the continuous model gives 1 - 2H.
  double variance_slope = 0.0;
  double variance_slope_r2 = 0.0;
  /// max over 1 <= m, m' <= max_freq of |Cov|^2 / (2 |m m'|^{1-2H}).
  double max_ratio = 0.0;
  long max_ratio_m = 0;
  long max_ratio_mp = 0;
  /// Monte Carlo relative standard error of a variance estimate, ~ 1/sqrt(reps).
  double relative_se = 0.0;
  /// Set when reps < 1000; the report is still produced.
  bool wide_error_bars = false;
};

FourierCovarianceReport noise_fourier_diagnostic(const FgnParams& params, std::size_t reps,
                                                 std::size_t max_freq = 32);

}  // namespace lrdecon
