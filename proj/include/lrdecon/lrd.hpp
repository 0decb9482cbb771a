#pragma once

// Long-memory parameter estimation and the split-sample plug-in workflow.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrdecon/estimator.hpp"
#include "lrdecon/fourier.hpp"

namespace lrdecon {

struct HurstOptions {
  /// Regression uses the lowest floor(N^bandwidth_exponent) nonzero frequencies.
  double bandwidth_exponent = 0.65;
  /// Lowest nonzero frequencies skipped before the regression window.
  std::size_t low_trim = 0;
};

struct HurstEstimate {
  double H_hat = 0.5;
  double std_error = 0.0;
  /// Periodogram ordinates in the regression.
  std::size_t bandwidth = 0;
};

/// Smallest alpha handed to the estimator by the plug-in.
inline constexpr double kMinPluginAlpha = 0.05;

/// Log-periodogram regression, H_hat = (1 - slope) / 2. Needs length >= 256;
/// a constant series throws EstimationFailure.
HurstEstimate estimate_hurst(std::span<const double> series, const HurstOptions& options = {});

/// Regression on the first difference, mapped back to the undifferenced
/// process (H = H_diff + 1).
HurstEstimate estimate_hurst_differenced(std::span<const double> series,
                                         const HurstOptions& options = {});

/// alpha = 2 - 2 H with H clamped so alpha lies in [kMinPluginAlpha, 1].
double alpha_from_hurst(double hurst) noexcept;

/// Sample-domain streams of one channel: observed convolution and observed kernel.
struct RawChannel {
  std::vector<double> y;
  std::vector<double> g;
};

struct SplitSample {
  std::vector<RawChannel> first;
  std::vector<RawChannel> second;
};

/// Splits 2n-sample streams into first and second halves.
SplitSample split_sample(std::span<const RawChannel> raw);

/// Fourier-domain channels from equal-length sample streams.
std::vector<ChannelData> channels_from_samples(std::span<const RawChannel> raw,
                                               std::span<const double> alpha1,
                                               std::span<const double> alpha2, double eps,
                                               double delta);

/// Series the long-memory estimates are computed from.
///   raw:        first-half stream as observed
///   difference: first difference of the first-half stream
///   replicate:  first-half minus second-half stream; the deterministic part
///               cancels and only the noise difference remains
enum class NoiseProxy { raw, difference, replicate };
NoiseProxy parse_noise_proxy(const std::string& name);
std::string to_string(NoiseProxy proxy);

struct PluginOptions {
  HurstOptions hurst{};
  NoiseProxy proxy = NoiseProxy::difference;
};

struct PluginTruth {
  std::vector<double> alpha1;
  std::vector<double> alpha2;
  std::optional<PeriodicSignal> f;
};

struct PluginResult {
  /// Per channel; left default when the matching noise level is zero.
  std::vector<HurstEstimate> hurst1;
  std::vector<HurstEstimate> hurst2;
  std::vector<double> alpha1_hat;
  std::vector<double> alpha2_hat;
  Estimate estimate;
  std::optional<Estimate> true_alpha_estimate;
  std::optional<double> risk;
  std::optional<double> true_alpha_risk;
};

/// Estimates alpha_1l from the Y streams and alpha_2l from the kernel streams
/// through options.proxy, then runs the estimator on the second half.
/// With truth, also runs the true-alpha estimate and reports both risks.
PluginResult plugin_workflow(const SplitSample& data, double eps, double delta,
                             const EstimatorConfig& config, const PluginOptions& options = {},
                             const PluginTruth* truth = nullptr);

}  // namespace lrdecon
