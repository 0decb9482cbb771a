#pragma once

// Adaptive hard-thresholding wavelet estimator for multichannel blind
// deconvolution under fractional Gaussian noise.
//
// Pipeline: stabilized weighted Fourier estimate of f~(m) across channels,
// Meyer analysis, level-dependent hard thresholds calibrated by the observed
// kernels, data-driven (m0, J), synthesis.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lrdecon/fourier.hpp"
#include "lrdecon/meyer.hpp"

namespace lrdecon {

/// One channel in the Fourier domain: observed convolution and observed kernel.
struct ChannelData {
  FourierSeries y_tilde;
  FourierSeries g_obs;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double eps = 0.0;
  double delta = 0.0;
};

struct EstimatorConfig {
  double k_trunc = 1.0;
  double rho1 = 1.0;
  double rho2 = 1.0;
  double A = 1.0;
  std::optional<int> m0_override;
  std::optional<int> J_override;
  /// Denominators at or below this are treated as a truncated frequency.
  double noise_floor_guard = 1e-300;

  void validate() const;
};

/// Throws InvalidInput unless all channels share grid size, eps and delta, and
/// alphas lie in (0, 1], eps and delta in [0, 1).
void validate_channels(std::span<const ChannelData> channels);

struct LevelTrace {
  int j = 0;
  /// S_j per channel over the surviving frequencies of W_j.
  std::vector<double> S;
  std::size_t l1 = 0;
  std::size_t l2 = 0;
  double lambda = 0.0;
  std::size_t kept = 0;
  std::size_t killed = 0;
  bool dead = false;
};

struct EstimateTrace {
  std::size_t n = 0;
  int m0 = 0;
  int J = 0;
  int J1 = 0;
  int J2 = 0;
  /// Largest J the grid allows.
  int J_cap = 0;
  /// J hit the grid cap rather than the level criterion.
  bool J_capped = false;
  bool noise_free = false;
  /// eps = delta = 0: weights replaced by ones.
  bool uniform_weights = false;
  /// Surviving-frequency flags in FFT order (index m mod n).
  std::vector<std::uint8_t> survived;
  /// Wavelet levels m0 .. J-1.
  std::vector<LevelTrace> levels;
  std::size_t scaling_coeffs = 0;
  std::size_t kept_total = 0;
  std::size_t killed_total = 0;
  std::size_t coefficient_total = 0;

  bool survives(long m) const;
};

struct Estimate {
  PeriodicSignal signal;
  EstimateTrace trace;
  WaveletCoeffs beta_tilde;
  WaveletCoeffs beta_hat;
};

/// omega_l(m) = (eps^{2 a1} |m|^{a1-1} + delta^{2 a2} |m|^{a2-1})^{-1}, with |m|
/// read as max(|m|, 1). eps = delta = 0 gives ones and sets *uniform.
std::vector<double> compute_weights(long m, std::span<const ChannelData> channels,
                                    bool* uniform = nullptr);

struct FourierCoeffEstimate {
  cplx value;
  bool survived;
};

/// Weighted estimate of f~(m). A frequency survives when the kernel test
/// min_l |g_l(m)|^2 > k^2 delta^{2 a2*} |m|^{a2*-1} |ln delta| passes at m and,
/// when it is on the grid, at -m. delta = 0 skips the test.
FourierCoeffEstimate estimate_fourier_coeff(long m, std::span<const ChannelData> channels,
                                            const EstimatorConfig& config);

/// The same estimate over the whole grid; survival flags in FFT order.
FourierSeries estimate_fourier_series(std::span<const ChannelData> channels,
                                      const EstimatorConfig& config,
                                      std::vector<std::uint8_t>& survived,
                                      bool* uniform_weights = nullptr);

/// Surviving-frequency flags only.
std::vector<std::uint8_t> surviving_frequencies(std::span<const ChannelData> channels,
                                                const EstimatorConfig& config);

/// Wavelet band |m| in [lo, hi] for level j (independent of m0).
BandLimits wavelet_band(int j);

/// Per-channel S_j over surviving frequencies of W_j; all zeros when none survive.
std::vector<double> compute_Sj(int j, std::span<const ChannelData> channels,
                               std::span<const std::uint8_t> survived);

/// (l1*, l2*), zero-based, ties to the smaller index.
std::pair<std::size_t, std::size_t> select_channels(int j, std::span<const ChannelData> channels,
                                                    std::span<const double> Sj);

/// lambda_j; throws InvalidInput when S_j of a selected channel is not positive.
double threshold_lambda(int j, std::span<const ChannelData> channels, std::span<const double> Sj,
                        const EstimatorConfig& config);

struct LevelSelection {
  int m0 = 2;
  int J = 0;
  int J1 = 0;
  int J2 = 0;
  int J_cap = 0;
  bool J_capped = false;
};

/// m0 from 2^m0 = |ln eps| ^ |ln delta|, J as the first level where the
/// variance criterion fails (per noise source), capped by the grid.
LevelSelection select_levels(std::span<const ChannelData> channels, const EstimatorConfig& config,
                             std::span<const std::uint8_t> survived);
LevelSelection select_levels(std::span<const ChannelData> channels, const EstimatorConfig& config);

Estimate estimate(std::span<const ChannelData> channels, const EstimatorConfig& config);

/// Oracle baseline: observed kernels replaced by the true ones, delta = 0.
Estimate estimate_known_kernel(std::span<const ChannelData> channels,
                               std::span<const FourierSeries> true_kernels,
                               const EstimatorConfig& config);
/// Same, using each channel's g_obs as the known kernel.
Estimate estimate_known_kernel(std::span<const ChannelData> channels, const EstimatorConfig& config);

}  // namespace lrdecon
