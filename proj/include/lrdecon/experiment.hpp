#pragma once

// Monte Carlo laboratory: truth construction, observation simulation,
// rate experiments and the theoretical exponents they are compared with.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrdecon/convolution_kernels.hpp"
#include "lrdecon/estimator.hpp"
#include "lrdecon/fgn.hpp"
#include "lrdecon/fourier.hpp"
#include "lrdecon/lrd.hpp"
#include "lrdecon/meyer.hpp"
#include "lrdecon/scenario.hpp"

namespace lrdecon {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;
/// Seed of the noise path for (replication seed, channel, role); role 0 = Y, 1 = kernel.
std::uint64_t stream_seed(std::uint64_t rep_seed, std::size_t channel, int role) noexcept;

// ---- signals ---------------------------------------------------------------

/// (sum_j 2^{j s* q} (sum_k |beta_jk|^p)^{q/p})^{1/q} over wavelet levels
/// m0 .. J-1, s* = s + 1/2 - 1/p. The scaling slot is not included.
double besov_norm(const WaveletCoeffs& coeffs, double s, double p, double q);

struct BesovSignal {
  PeriodicSignal signal;
  WaveletCoeffs coeffs;
  double norm = 0.0;
};

/// beta_jk = sigma_j r_jk, r = +-1, sigma_j = c 2^{-j s*} 2^{-j/p}, on levels
/// m0 .. J-1 with c chosen so the norm is A (1 - 1e-6). J = 0 means the grid cap.
/// spread > 0 multiplies each r_jk by 2^{spread (U - 1/2)}, U uniform, renormalized
/// per level so sum_k |r_jk|^p = 2^j; the level profile and the norm are unchanged.
BesovSignal build_besov_signal(std::size_t n, double s, double p, double q, double A, int m0, int J,
                               std::uint64_t seed, double spread = 0.0);

/// Sum of periodized bumps (effectively C-infinity).
PeriodicSignal smoothblob_signal(std::size_t n);
/// Smooth bumps plus two jump discontinuities.
PeriodicSignal piecewise_signal(std::size_t n);

/// ||f - P_J f||^2 on the grid, P_J the projection onto levels below J.
double band_tail_energy(const PeriodicSignal& f, int m0, int J);

// ---- observations ----------------------------------------------------------

/// Truth and precomputed pieces shared by every replication of a scenario.
struct Problem {
  std::size_t n = 0;
  PeriodicSignal f = PeriodicSignal::zeros(2);
  FourierSeries f_tilde{2};
  std::optional<double> besov_norm;
  std::vector<ChannelSpec> channels;
  std::vector<KernelSpec> kernels;
  std::vector<FourierSeries> g_tilde;
  /// f~ g~ per channel.
  std::vector<FourierSeries> fg_tilde;
  std::vector<std::vector<double>> conv_samples;
  std::vector<std::vector<double>> kernel_samples;
  std::vector<std::shared_ptr<const CirculantFgn>> gen1;
  std::vector<std::shared_ptr<const CirculantFgn>> gen2;
};

Problem build_problem(const Scenario& scenario);

/// Y~_l = f~ g~_l + forward(eps^{a1} n^{a1/2} Z1), g~^delta_l = g~_l + forward(delta^{a2} n^{a2/2} Z2).
std::vector<ChannelData> simulate_observations(const Problem& problem, double eps, double delta,
                                               std::uint64_t seed);

/// Sample-domain streams of the same model (n samples per stream).
std::vector<RawChannel> simulate_raw(const Problem& problem, double eps, double delta, std::uint64_t seed);

/// Noise paths exactly as added by the simulators, for diagnostics.
std::vector<double> noise_path(const Problem& problem, std::size_t channel, int role, double level,
                               std::uint64_t seed);

// ---- theory ----------------------------------------------------------------

double dense_exponent(double s, double nu, double alpha);
double sparse_exponent(double s_star, double nu, double alpha);

struct ExponentResult {
  std::size_t l1 = 0;
  std::size_t l2 = 0;
  double s = 0.0;
  double p = 2.0;
  double s_star = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double nu1 = 0.0;
  double nu2 = 0.0;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  /// Term i uses the dense branch when s > s_i.
  bool dense1 = true;
  bool dense2 = true;
  /// s = s_i: an extra log factor multiplies term i.
  bool xi1 = false;
  bool xi2 = false;
  /// Exponents on the eps^{2 a1} and delta^{2 a2} scales.
  double exponent_eps = 0.0;
  double exponent_delta = 0.0;
  std::string regime;
};

/// p may be +infinity. Throws InvalidInput unless s >= max(1/p, 1/2), p >= 1.
ExponentResult theoretical_exponent(double s, double p, std::span<const double> nu,
                                    std::span<const double> alpha1, std::span<const double> alpha2);

/// Expected slope of log risk against log eps: 2 a1 e1, or with delta = eps^gamma
/// the smaller of that and gamma 2 a2 e2.
double target_log_eps_slope(const ExponentResult& theory, DeltaCoupling coupling, double gamma);

// ---- experiments -----------------------------------------------------------

struct RiskStats {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
  std::size_t failures = 0;
};

RiskStats summarize_risks(std::span<const double> risks, std::size_t failures);

struct GridPoint {
  double eps = 0.0;
  double delta = 0.0;
  RiskStats blind;
  std::optional<RiskStats> oracle;
  /// Per-replication risks in replication order (NaN for failures).
  std::vector<double> blind_risks;
  std::vector<double> oracle_risks;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
  double target = 0.0;
  /// slope / target (0 when no target).
  double slope_vs_theory = 0.0;
};

struct RiskReport {
  std::string scenario;
  std::size_t n = 0;
  std::size_t M = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::vector<GridPoint> points;
  std::optional<ExponentResult> theory;
  double target_slope = 0.0;
  std::optional<RateFit> fit;
  std::optional<RateFit> oracle_fit;
  /// Not part of any file output; varies run to run.
  double wall_seconds = 0.0;
};

/// Replication r at every grid point uses seed = scenario.seed + r.
RiskReport run_experiment(const Scenario& scenario);

/// OLS of log risk on log eps. Needs >= 4 points, all eps and risks positive.
RateFit fit_rate(std::span<const double> eps, std::span<const double> risk, double target = 0.0);
RateFit fit_rate(const RiskReport& report, bool oracle = false);

/// One estimator-constant setting of a sensitivity sweep.
struct SweepRow {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double A = 0.0;
  RiskReport report;
};

/// Reruns the scenario for every (rho1, A) pair, rho2 following rho1.
std::vector<SweepRow> run_constant_sweep(const Scenario& scenario, std::span<const double> rho1,
                                         std::span<const double> A);

struct PluginComparison {
  double eps = 0.0;
  double delta = 0.0;
  /// plug-in risk / true-alpha risk per seed.
  std::vector<double> ratios;
  double median_ratio = 0.0;
  std::vector<double> alpha1_hat_mean;
  std::vector<double> alpha2_hat_mean;
  std::size_t failures = 0;
};

/// Split-sample plug-in vs true alphas over `seeds` replications at one eps.
PluginComparison run_plugin_comparison(const Scenario& scenario, double eps, std::size_t seeds,
                                       std::uint64_t base_seed);

}  // namespace lrdecon
