#include "lrdecon/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lrdecon/error.hpp"
#include "lrdecon/simd/kernels.hpp"

namespace lrdecon {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// x^a with 0^a = 0 for a > 0, the limit used whenever a noise level is zero.
double noise_pow(double x, double a) { return x > 0.0 ? std::pow(x, a) : 0.0; }

// |ln x|, defined as 0 at x = 0 where it always multiplies a vanishing power.
double abs_log(double x) { return x > 0.0 ? std::abs(std::log(x)) : 0.0; }

double freq_mag(long m) { return std::max(std::abs(static_cast<double>(m)), 1.0); }

// eps^{2 a1} |m|^{a1-1} + delta^{2 a2} |m|^{a2-1}
double noise_power(const ChannelData& ch, double am) {
  return noise_pow(ch.eps, 2.0 * ch.alpha1) * std::pow(am, ch.alpha1 - 1.0) +
         noise_pow(ch.delta, 2.0 * ch.alpha2) * std::pow(am, ch.alpha2 - 1.0);
}

double alpha2_star(std::span<const ChannelData> channels) {
  double a = 0.0;
  for (const auto& ch : channels) a = std::max(a, ch.alpha2);
  return a;
}

// Right-hand side of the kernel truncation test at |m| = am.
double truncation_level(std::span<const ChannelData> channels, const EstimatorConfig& config, double am) {
  const double delta = channels.front().delta;
  const double a2 = alpha2_star(channels);
  return config.k_trunc * config.k_trunc * noise_pow(delta, 2.0 * a2) * std::pow(am, a2 - 1.0) *
         abs_log(delta);
}

bool passes_test(long m, std::span<const ChannelData> channels, const EstimatorConfig& config) {
  double min_g2 = kInf;
  for (const auto& ch : channels) min_g2 = std::min(min_g2, std::norm(ch.g_obs.at(m)));
  return min_g2 > truncation_level(channels, config, freq_mag(m));
}

std::size_t fft_index(long m, std::size_t n) {
  const long nl = static_cast<long>(n);
  return static_cast<std::size_t>(((m % nl) + nl) % nl);
}

long freq_of(std::size_t i, std::size_t n) {
  return i < n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
}

}  // namespace

void EstimatorConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  auto nonneg = [](double v) { return v >= 0.0 && std::isfinite(v); };
  if (!positive(k_trunc)) throw InvalidInput("EstimatorConfig: k_trunc must be > 0");
  if (!nonneg(rho1) || !nonneg(rho2)) throw InvalidInput("EstimatorConfig: rho1, rho2 must be >= 0");
  if (!positive(A)) throw InvalidInput("EstimatorConfig: A must be > 0");
  if (!(noise_floor_guard >= 0.0)) throw InvalidInput("EstimatorConfig: noise_floor_guard must be >= 0");
  if (m0_override && *m0_override < 2) throw InvalidInput("EstimatorConfig: m0 override must be >= 2");
}

void validate_channels(std::span<const ChannelData> channels) {
  if (channels.empty()) throw InvalidInput("estimator: at least one channel is required");
  const auto& first = channels.front();
  for (std::size_t l = 0; l < channels.size(); ++l) {
    const auto& ch = channels[l];
    const std::string tag = "channel " + std::to_string(l) + ": ";
    if (ch.y_tilde.size() != first.y_tilde.size() || ch.g_obs.size() != first.y_tilde.size()) {
      throw InvalidInput(tag + "grid size mismatch");
    }
    if (!(ch.alpha1 > 0.0 && ch.alpha1 <= 1.0) || !(ch.alpha2 > 0.0 && ch.alpha2 <= 1.0)) {
      throw InvalidInput(tag + "alpha1, alpha2 must lie in (0, 1]");
    }
    if (!(ch.eps >= 0.0 && ch.eps < 1.0) || !(ch.delta >= 0.0 && ch.delta < 1.0)) {
      throw InvalidInput(tag + "eps, delta must lie in [0, 1)");
    }
    if (ch.eps != first.eps || ch.delta != first.delta) {
      throw InvalidInput(tag + "all channels share the noise levels eps and delta");
    }
  }
}

bool EstimateTrace::survives(long m) const {
  if (survived.empty()) return false;
  return survived[fft_index(m, n)] != 0;
}

std::vector<double> compute_weights(long m, std::span<const ChannelData> channels, bool* uniform) {
  validate_channels(channels);
  const bool flat = channels.front().eps == 0.0 && channels.front().delta == 0.0;
  if (uniform) *uniform = flat;
  std::vector<double> w(channels.size(), 1.0);
  if (flat) return w;
  const double am = freq_mag(m);
  for (std::size_t l = 0; l < channels.size(); ++l) w[l] = 1.0 / noise_power(channels[l], am);
  return w;
}

FourierCoeffEstimate estimate_fourier_coeff(long m, std::span<const ChannelData> channels,
                                            const EstimatorConfig& config) {
  validate_channels(channels);
  const auto& grid = channels.front().y_tilde;
  if (!grid.in_grid(m)) throw InvalidInput("estimate_fourier_coeff: frequency off grid");
  if (channels.front().delta > 0.0) {
    const bool ok = passes_test(m, channels, config) && (!grid.in_grid(-m) || passes_test(-m, channels, config));
    if (!ok) return {{0.0, 0.0}, false};
  }
  const auto w = compute_weights(m, channels);
  double num_r = 0.0, num_i = 0.0, den = 0.0;
  for (std::size_t l = 0; l < channels.size(); ++l) {
    const cplx g = channels[l].g_obs.at(m);
    const cplx y = channels[l].y_tilde.at(m);
    const double gr = g.real(), gi = g.imag(), yr = y.real(), yi = y.imag();
    num_r += w[l] * (gr * yr + gi * yi);
    num_i += w[l] * (gr * yi - gi * yr);
    den += w[l] * (gr * gr + gi * gi);
  }
  if (!(den > config.noise_floor_guard)) return {{0.0, 0.0}, false};
  return {cplx(num_r, num_i) / den, true};
}

std::vector<std::uint8_t> surviving_frequencies(std::span<const ChannelData> channels,
                                                const EstimatorConfig& config) {
  validate_channels(channels);
  const std::size_t n = channels.front().y_tilde.size();
  std::vector<std::uint8_t> pass(n, 1);
  if (channels.front().delta > 0.0) {
    const auto& kt = simd::active();
    std::vector<double> min_g2(n, kInf), g2(n);
    for (const auto& ch : channels) {
      kt.abs2(ch.g_obs.fft_order().data(), g2.data(), n);
      for (std::size_t i = 0; i < n; ++i) min_g2[i] = std::min(min_g2[i], g2[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      pass[i] = min_g2[i] > truncation_level(channels, config, freq_mag(freq_of(i, n))) ? 1 : 0;
    }
  }
  std::vector<std::uint8_t> survived(n);
  for (std::size_t i = 0; i < n; ++i) survived[i] = (pass[i] && pass[(n - i) % n]) ? 1 : 0;
  return survived;
}

FourierSeries estimate_fourier_series(std::span<const ChannelData> channels,
                                      const EstimatorConfig& config,
                                      std::vector<std::uint8_t>& survived, bool* uniform_weights) {
  config.validate();
  survived = surviving_frequencies(channels, config);
  const std::size_t n = channels.front().y_tilde.size();
  const bool flat = channels.front().eps == 0.0 && channels.front().delta == 0.0;
  if (uniform_weights) *uniform_weights = flat;

  const auto& kt = simd::active();
  std::vector<cplx> num(n);
  std::vector<double> den(n), w(n);
  for (const auto& ch : channels) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = flat ? 1.0 : 1.0 / noise_power(ch, freq_mag(freq_of(i, n)));
    }
    kt.weighted_conj_accumulate(w.data(), ch.g_obs.fft_order().data(), ch.y_tilde.fft_order().data(),
                                num.data(), den.data(), n);
  }
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (survived[i] && den[i] > config.noise_floor_guard) {
      out[i] = num[i] / den[i];
    } else {
      survived[i] = 0;
    }
  }
  return FourierSeries::from_fft_order(std::move(out));
}

BandLimits wavelet_band(int j) {
  if (j < 1 || j > 60) throw InvalidInput("wavelet_band: level out of range");
  return {(1L << j) / 3 + 1, (1L << (j + 2)) / 3};
}

std::vector<double> compute_Sj(int j, std::span<const ChannelData> channels,
                               std::span<const std::uint8_t> survived) {
  validate_channels(channels);
  const std::size_t n = channels.front().y_tilde.size();
  if (survived.size() != n) throw InvalidInput("compute_Sj: survival flags do not match the grid");
  if (j > max_meyer_level(n)) {
    throw LevelOverflow("compute_Sj: level " + std::to_string(j) + " exceeds the grid",
                        max_meyer_level(n) + 1);
  }
  const BandLimits b = wavelet_band(j);
  const auto len = static_cast<std::size_t>(b.hi - b.lo + 1);
  const std::size_t pos = static_cast<std::size_t>(b.lo);
  const std::size_t neg = n - static_cast<std::size_t>(b.hi);
  const auto& kt = simd::active();
  std::vector<double> S(channels.size(), 0.0);
  bool any = false;
  for (std::size_t i = 0; i < len && !any; ++i) any = survived[pos + i] || survived[neg + i];
  if (!any) return S;
  for (std::size_t l = 0; l < channels.size(); ++l) {
    const cplx* g = channels[l].g_obs.fft_order().data();
    S[l] = kt.sum_abs2_masked(g + pos, survived.data() + pos, len) +
           kt.sum_abs2_masked(g + neg, survived.data() + neg, len);
  }
  return S;
}

std::pair<std::size_t, std::size_t> select_channels(int j, std::span<const ChannelData> channels,
                                                    std::span<const double> Sj) {
  if (Sj.size() != channels.size()) throw InvalidInput("select_channels: S_j size mismatch");
  auto argmin = [&](auto criterion) {
    std::size_t best = 0;
    double best_v = kInf;
    for (std::size_t l = 0; l < channels.size(); ++l) {
      const double v = Sj[l] > 0.0 ? criterion(channels[l]) / Sj[l] : kInf;
      if (v < best_v) {
        best_v = v;
        best = l;
      }
    }
    return best;
  };
  const double jd = static_cast<double>(j);
  const std::size_t l1 = argmin([&](const ChannelData& ch) {
    return noise_pow(ch.eps, 2.0 * ch.alpha1) * std::exp2(jd * (ch.alpha1 + 1.0));
  });
  const std::size_t l2 = argmin([&](const ChannelData& ch) {
    return noise_pow(ch.delta, 2.0 * ch.alpha2) * std::exp2(jd * (ch.alpha2 + 1.0));
  });
  return {l1, l2};
}

double threshold_lambda(int j, std::span<const ChannelData> channels, std::span<const double> Sj,
                        const EstimatorConfig& config) {
  validate_channels(channels);
  const auto [l1, l2] = select_channels(j, channels, Sj);
  const double jd = static_cast<double>(j);
  const double eps = channels.front().eps;
  const double delta = channels.front().delta;
  double t1 = 0.0, t2 = 0.0;
  if (eps > 0.0) {
    if (!(Sj[l1] > 0.0)) throw InvalidInput("threshold_lambda: S_j of the selected channel is zero");
    const double a = channels[l1].alpha1;
    t1 = config.rho1 / std::sqrt(Sj[l1]) * std::pow(eps, a) * std::sqrt(abs_log(eps)) * std::exp2(jd * a / 2.0);
  }
  if (delta > 0.0) {
    if (!(Sj[l2] > 0.0)) throw InvalidInput("threshold_lambda: S_j of the selected channel is zero");
    const double a = channels[l2].alpha2;
    t2 = config.rho2 / std::sqrt(Sj[l2]) * std::pow(delta, a) * abs_log(delta) * std::exp2(jd * a / 2.0);
  }
  return std::max(t1, t2);
}

LevelSelection select_levels(std::span<const ChannelData> channels, const EstimatorConfig& config,
                             std::span<const std::uint8_t> survived) {
  validate_channels(channels);
  config.validate();
  const std::size_t n = channels.front().y_tilde.size();
  const double eps = channels.front().eps;
  const double delta = channels.front().delta;
  const int max_level = max_meyer_level(n);

  LevelSelection sel;
  sel.J_cap = max_level + 1;

  if (config.m0_override) {
    sel.m0 = *config.m0_override;
  } else {
    const double le = eps > 0.0 ? abs_log(eps) : kInf;
    const double ld = delta > 0.0 ? abs_log(delta) : kInf;
    const double l = std::min(le, ld);
    sel.m0 = std::isinf(l) ? 2 : std::max(2, static_cast<int>(std::floor(std::log2(l))));
  }
  if (sel.m0 > max_level) {
    throw InfeasibleConfiguration("select_levels: m0 = " + std::to_string(sel.m0) +
                                  " leaves no wavelet level on a grid of size " + std::to_string(n));
  }

  if (config.J_override) {
    sel.J = sel.J1 = sel.J2 = *config.J_override;
    if (sel.J > sel.J_cap) {
      throw LevelOverflow("select_levels: J override " + std::to_string(sel.J) + " exceeds the grid cap " +
                              std::to_string(sel.J_cap),
                          sel.J_cap);
    }
  } else {
    const double M = static_cast<double>(channels.size());
    const double a2m = config.A * config.A * M;
    sel.J1 = sel.J2 = sel.J_cap;
    bool found1 = eps == 0.0, found2 = delta == 0.0;
    for (int j = sel.m0; j <= max_level && !(found1 && found2); ++j) {
      const auto S = compute_Sj(j, channels, survived);
      const auto [l1, l2] = select_channels(j, channels, S);
      const double jd = static_cast<double>(j);
      // [S_j 2^{-j(a+1)}]^{-1} <= A^2 M / noise^{2a}
      auto fails = [&](std::size_t l, double a, double noise) {
        if (!(S[l] > 0.0)) return true;
        return std::exp2(jd * (a + 1.0)) / S[l] > a2m / std::pow(noise, 2.0 * a);
      };
      if (!found1 && fails(l1, channels[l1].alpha1, eps)) {
        sel.J1 = j;
        found1 = true;
      }
      if (!found2 && fails(l2, channels[l2].alpha2, delta)) {
        sel.J2 = j;
        found2 = true;
      }
    }
    sel.J = std::min(sel.J1, sel.J2);
    sel.J_capped = sel.J == sel.J_cap;
  }
  if (sel.J <= sel.m0) {
    throw InfeasibleConfiguration("select_levels: J = " + std::to_string(sel.J) + " <= m0 = " +
                                  std::to_string(sel.m0) + "; no wavelet level to estimate");
  }
  return sel;
}

LevelSelection select_levels(std::span<const ChannelData> channels, const EstimatorConfig& config) {
  const auto survived = surviving_frequencies(channels, config);
  return select_levels(channels, config, survived);
}

Estimate estimate(std::span<const ChannelData> channels, const EstimatorConfig& config) {
  validate_channels(channels);
  config.validate();
  const std::size_t n = channels.front().y_tilde.size();

  EstimateTrace trace;
  trace.n = n;
  const FourierSeries fhat = estimate_fourier_series(channels, config, trace.survived, &trace.uniform_weights);
  trace.noise_free = channels.front().eps == 0.0 && channels.front().delta == 0.0;

  const LevelSelection sel = select_levels(channels, config, trace.survived);
  trace.m0 = sel.m0;
  trace.J = sel.J;
  trace.J1 = sel.J1;
  trace.J2 = sel.J2;
  trace.J_cap = sel.J_cap;
  trace.J_capped = sel.J_capped;

  const MeyerBasis basis(n, sel.m0);
  WaveletCoeffs beta_tilde = basis.analyze(fhat, sel.J);
  WaveletCoeffs beta_hat = beta_tilde;

  trace.scaling_coeffs = beta_hat.slots(sel.m0 - 1);
  trace.kept_total = trace.scaling_coeffs;
  for (int j = sel.m0; j < sel.J; ++j) {
    LevelTrace lt;
    lt.j = j;
    lt.S = compute_Sj(j, channels, trace.survived);
    auto level = beta_hat.level(j);
    lt.dead = std::all_of(lt.S.begin(), lt.S.end(), [](double s) { return s == 0.0; });
    if (lt.dead) {
      lt.lambda = kInf;
      std::fill(level.begin(), level.end(), cplx(0.0, 0.0));
      lt.kept = 0;
    } else {
      std::tie(lt.l1, lt.l2) = select_channels(j, channels, lt.S);
      lt.lambda = threshold_lambda(j, channels, lt.S, config);
      lt.kept = simd::hard_threshold(level, lt.lambda);
    }
    lt.killed = level.size() - lt.kept;
    trace.kept_total += lt.kept;
    trace.killed_total += lt.killed;
    trace.levels.push_back(std::move(lt));
  }
  trace.coefficient_total = beta_hat.total_slots();

  PeriodicSignal signal = basis.synthesize(beta_hat);
  return Estimate{std::move(signal), std::move(trace), std::move(beta_tilde), std::move(beta_hat)};
}

Estimate estimate_known_kernel(std::span<const ChannelData> channels,
                               std::span<const FourierSeries> true_kernels,
                               const EstimatorConfig& config) {
  if (true_kernels.size() != channels.size()) {
    throw InvalidInput("estimate_known_kernel: one true kernel per channel is required");
  }
  std::vector<ChannelData> oracle(channels.begin(), channels.end());
  for (std::size_t l = 0; l < oracle.size(); ++l) {
    oracle[l].g_obs = true_kernels[l];
    oracle[l].delta = 0.0;
  }
  return estimate(oracle, config);
}

Estimate estimate_known_kernel(std::span<const ChannelData> channels, const EstimatorConfig& config) {
  std::vector<ChannelData> oracle(channels.begin(), channels.end());
  for (auto& ch : oracle) ch.delta = 0.0;
  return estimate(oracle, config);
}

}  // namespace lrdecon
