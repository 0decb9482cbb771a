#include "lrdecon/lrd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lrdecon/error.hpp"
#include "lrdecon/regression.hpp"

namespace lrdecon {

HurstEstimate estimate_hurst(std::span<const double> series, const HurstOptions& options) {
  const std::size_t N = series.size();
  if (N < 256) throw InvalidInput("estimate_hurst: need at least 256 samples, got " + std::to_string(N));
  if (!(options.bandwidth_exponent > 0.0 && options.bandwidth_exponent < 1.0)) {
    throw InvalidInput("estimate_hurst: bandwidth exponent must lie in (0, 1)");
  }
  double mean = 0.0, peak = 0.0;
  for (double v : series) {
    if (!std::isfinite(v)) throw InvalidInput("estimate_hurst: non-finite sample");
    mean += v;
    peak = std::max(peak, std::abs(v));
  }
  mean /= static_cast<double>(N);
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(N));
  if (!(sd > 1e-13 * peak)) throw EstimationFailure("estimate_hurst: series is constant");

  const auto m = std::min(static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(N), options.bandwidth_exponent))),
                          N / 2 - 1);
  if (m < options.low_trim + 8) {
    throw InvalidInput("estimate_hurst: fewer than 8 periodogram ordinates after trimming");
  }

  // Standardizing first makes the result exactly affine invariant up to rounding.
  std::vector<cplx> x(N);
  for (std::size_t i = 0; i < N; ++i) x[i] = (series[i] - mean) / sd;
  detail::dft(x, x, -1);

  const std::size_t bw = m - options.low_trim;
  std::vector<double> lx(bw), ly(bw);
  for (std::size_t i = 0; i < bw; ++i) {
    const std::size_t k = options.low_trim + 1 + i;
    const double I = std::norm(x[k]);
    if (!(I > 0.0)) throw EstimationFailure("estimate_hurst: zero periodogram ordinate");
    lx[i] = std::log(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(N));
    ly[i] = std::log(I);
  }
  const LinearFit fit = ols(lx, ly);
  double sxx = 0.0, lmean = 0.0;
  for (double v : lx) lmean += v;
  lmean /= static_cast<double>(bw);
  for (double v : lx) sxx += (v - lmean) * (v - lmean);

  HurstEstimate est;
  est.H_hat = (1.0 - fit.slope) / 2.0;
  // log-periodogram errors have variance pi^2/6
  est.std_error = 0.5 * std::numbers::pi / std::sqrt(6.0 * sxx);
  est.bandwidth = bw;
  return est;
}

HurstEstimate estimate_hurst_differenced(std::span<const double> series, const HurstOptions& options) {
  if (series.size() < 257) throw InvalidInput("estimate_hurst_differenced: need at least 257 samples");
  std::vector<double> d(series.size() - 1);
  for (std::size_t i = 0; i + 1 < series.size(); ++i) d[i] = series[i + 1] - series[i];
  HurstEstimate est = estimate_hurst(d, options);
  est.H_hat += 1.0;
  return est;
}

double alpha_from_hurst(double hurst) noexcept {
  const double h = std::clamp(hurst, 0.5, 1.0 - kMinPluginAlpha / 2.0);
  return 2.0 - 2.0 * h;
}

SplitSample split_sample(std::span<const RawChannel> raw) {
  if (raw.empty()) throw InvalidInput("split_sample: no channels");
  SplitSample out;
  for (const auto& ch : raw) {
    if (ch.y.size() != ch.g.size() || ch.y.size() % 2 != 0 || ch.y.size() != raw.front().y.size()) {
      throw InvalidInput("split_sample: every stream must hold the same even number of samples");
    }
    const auto half = static_cast<std::ptrdiff_t>(ch.y.size() / 2);
    out.first.push_back({{ch.y.begin(), ch.y.begin() + half}, {ch.g.begin(), ch.g.begin() + half}});
    out.second.push_back({{ch.y.begin() + half, ch.y.end()}, {ch.g.begin() + half, ch.g.end()}});
  }
  return out;
}

std::vector<ChannelData> channels_from_samples(std::span<const RawChannel> raw,
                                               std::span<const double> alpha1,
                                               std::span<const double> alpha2, double eps,
                                               double delta) {
  if (alpha1.size() != raw.size() || alpha2.size() != raw.size()) {
    throw InvalidInput("channels_from_samples: one alpha pair per channel is required");
  }
  std::vector<ChannelData> out;
  out.reserve(raw.size());
  for (std::size_t l = 0; l < raw.size(); ++l) {
    out.push_back({forward(PeriodicSignal(raw[l].y)), forward(PeriodicSignal(raw[l].g)), alpha1[l],
                   alpha2[l], eps, delta});
  }
  validate_channels(out);
  return out;
}

NoiseProxy parse_noise_proxy(const std::string& name) {
  if (name == "raw") return NoiseProxy::raw;
  if (name == "difference") return NoiseProxy::difference;
  if (name == "replicate") return NoiseProxy::replicate;
  throw InvalidInput("unknown noise proxy '" + name + "'");
}

std::string to_string(NoiseProxy proxy) {
  switch (proxy) {
    case NoiseProxy::raw:
      return "raw";
    case NoiseProxy::difference:
      return "difference";
    case NoiseProxy::replicate:
      return "replicate";
  }
  return "difference";
}

PluginResult plugin_workflow(const SplitSample& data, double eps, double delta,
                             const EstimatorConfig& config, const PluginOptions& options,
                             const PluginTruth* truth) {
  const std::size_t M = data.first.size();
  if (M == 0 || data.second.size() != M) {
    throw InvalidInput("plugin_workflow: channel count differs between halves");
  }
  auto hurst = [&](const std::vector<double>& a, const std::vector<double>& b) {
    switch (options.proxy) {
      case NoiseProxy::raw:
        return estimate_hurst(a, options.hurst);
      case NoiseProxy::difference:
        return estimate_hurst_differenced(a, options.hurst);
      case NoiseProxy::replicate: {
        if (a.size() != b.size()) throw InvalidInput("plugin_workflow: halves differ in length");
        std::vector<double> d(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
        return estimate_hurst(d, options.hurst);
      }
    }
    throw InvalidInput("plugin_workflow: unknown noise proxy");
  };

  std::vector<HurstEstimate> h1(M), h2(M);
  std::vector<double> a1(M, 1.0), a2(M, 1.0);
  for (std::size_t l = 0; l < M; ++l) {
    if (eps > 0.0) {
      h1[l] = hurst(data.first[l].y, data.second[l].y);
      a1[l] = alpha_from_hurst(h1[l].H_hat);
    }
    if (delta > 0.0) {
      h2[l] = hurst(data.first[l].g, data.second[l].g);
      a2[l] = alpha_from_hurst(h2[l].H_hat);
    }
  }

  const auto channels = channels_from_samples(data.second, a1, a2, eps, delta);
  PluginResult res{std::move(h1), std::move(h2), std::move(a1), std::move(a2), estimate(channels, config),
                   std::nullopt, std::nullopt, std::nullopt};

  if (truth) {
    const auto truth_channels = channels_from_samples(data.second, truth->alpha1, truth->alpha2, eps, delta);
    res.true_alpha_estimate = estimate(truth_channels, config);
    if (truth->f) {
      res.risk = grid_distance2(res.estimate.signal, *truth->f);
      res.true_alpha_risk = grid_distance2(res.true_alpha_estimate->signal, *truth->f);
    }
  }
  return res;
}

}  // namespace lrdecon
