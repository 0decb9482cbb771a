#include "lrdecon/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "lrdecon/error.hpp"
#include "lrdecon/parallel.hpp"
#include "lrdecon/regression.hpp"
#include "lrdecon/simd/kernels.hpp"

namespace lrdecon {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median_of(std::vector<double> v) {
  if (v.empty()) return kNaN;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

// Periodic distance on U.
double wrap_dist(double t, double c) {
  const double d = std::abs(t - c);
  return std::min(d, 1.0 - d);
}

std::shared_ptr<const CirculantFgn> generator_for(std::map<double, std::shared_ptr<const CirculantFgn>>& cache,
                                                  double alpha, std::size_t n) {
  const double h = 1.0 - alpha / 2.0;
  auto it = cache.find(h);
  if (it == cache.end()) it = cache.emplace(h, std::make_shared<const CirculantFgn>(h, n)).first;
  return it->second;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t rep_seed, std::size_t channel, int role) noexcept {
  return mix_seed(mix_seed(rep_seed) ^ (2 * static_cast<std::uint64_t>(channel) + static_cast<std::uint64_t>(role) + 1));
}

double besov_norm(const WaveletCoeffs& coeffs, double s, double p, double q) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw InvalidInput("besov_norm: p, q must be >= 1");
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double s_star = s + 0.5 - inv_p;
  double total = 0.0;
  for (int j = coeffs.m0(); j < coeffs.J(); ++j) {
    double inner = 0.0;
    for (const cplx& b : coeffs.level(j)) {
      inner = std::isinf(p) ? std::max(inner, std::abs(b)) : inner + std::pow(std::abs(b), p);
    }
    const double lp = std::isinf(p) ? inner : std::pow(inner, inv_p);
    const double term = std::exp2(static_cast<double>(j) * s_star) * lp;
    total = std::isinf(q) ? std::max(total, term) : total + std::pow(term, q);
  }
  return std::isinf(q) ? total : std::pow(total, 1.0 / q);
}

BesovSignal build_besov_signal(std::size_t n, double s, double p, double q, double A, int m0, int J,
                               std::uint64_t seed, double spread) {
  if (!(spread >= 0.0) || !std::isfinite(spread)) throw InvalidInput("build_besov_signal: spread must be >= 0");
  if (!(p >= 1.0) || !(q >= 1.0)) throw InvalidInput("build_besov_signal: p, q must be >= 1");
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  if (!(s >= std::max(inv_p, 0.5))) throw InvalidInput("build_besov_signal: s must be >= max(1/p, 1/2)");
  if (!(A > 0.0)) throw InvalidInput("build_besov_signal: A must be > 0");
  const MeyerBasis basis(n, m0);
  if (J == 0) J = basis.max_J();
  if (J <= m0 || J > basis.max_J()) {
    throw InvalidInput("build_besov_signal: J must lie in (m0, " + std::to_string(basis.max_J()) + "]");
  }
  const double s_star = s + 0.5 - inv_p;
  const double levels = static_cast<double>(J - m0);
  const double c = A * (1.0 - 1e-6) / (std::isinf(q) ? 1.0 : std::pow(levels, 1.0 / q));

  WaveletCoeffs coeffs(n, m0, J);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int j = m0; j < J; ++j) {
    const double jd = static_cast<double>(j);
    const double sigma = c * std::exp2(-jd * s_star) * std::exp2(-jd * inv_p);
    auto level = coeffs.level(j);
    std::vector<double> u(level.size(), 1.0);
    if (spread > 0.0) {
      double norm_p = 0.0;
      for (double& v : u) {
        v = std::exp2(spread * (unif(rng) - 0.5));
        norm_p = std::isinf(p) ? std::max(norm_p, v) : norm_p + std::pow(v, p);
      }
      const double scale = std::isinf(p) ? 1.0 / norm_p : std::pow(static_cast<double>(u.size()) / norm_p, inv_p);
      for (double& v : u) v *= scale;
    }
    for (std::size_t k = 0; k < level.size(); ++k) level[k] = (coin(rng) ? sigma : -sigma) * u[k];
  }
  PeriodicSignal signal = basis.synthesize(coeffs);
  const double norm = besov_norm(coeffs, s, p, q);
  return BesovSignal{std::move(signal), std::move(coeffs), norm};
}

PeriodicSignal smoothblob_signal(std::size_t n) {
  struct Bump {
    double center, width, height;
  };
  const Bump bumps[] = {{0.2, 0.04, 1.0}, {0.45, 0.07, 0.6}, {0.75, 0.03, -0.8}};
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    for (const auto& b : bumps) {
      const double d = wrap_dist(t, b.center) / b.width;
      x[i] += b.height * std::exp(-0.5 * d * d);
    }
  }
  return PeriodicSignal(std::move(x));
}

PeriodicSignal piecewise_signal(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    const double d = wrap_dist(t, 0.7) / 0.05;
    x[i] = 0.7 * std::exp(-0.5 * d * d);
    if (t >= 0.15 && t < 0.4) x[i] += 0.5;
    if (t >= 0.4 && t < 0.5) x[i] -= 0.3;
  }
  return PeriodicSignal(std::move(x));
}

double band_tail_energy(const PeriodicSignal& f, int m0, int J) {
  const MeyerBasis basis(f.size(), m0);
  const PeriodicSignal proj = basis.synthesize(basis.analyze(forward(f), J));
  return grid_distance2(f, proj);
}

Problem build_problem(const Scenario& scenario) {
  scenario.validate();
  Problem pb;
  pb.n = scenario.n;
  const auto& sig = scenario.signal;
  switch (sig.type) {
    case SignalType::besov: {
      BesovSignal b = build_besov_signal(pb.n, sig.s, sig.p, sig.q, sig.A, sig.m0, 0, sig.seed, sig.spread);
      pb.f = std::move(b.signal);
      pb.besov_norm = b.norm;
      break;
    }
    case SignalType::smoothblob: pb.f = smoothblob_signal(pb.n); break;
    case SignalType::piecewise: pb.f = piecewise_signal(pb.n); break;
  }
  pb.f_tilde = forward(pb.f);
  pb.channels = scenario.channels;

  std::map<double, std::shared_ptr<const CirculantFgn>> cache;
  for (const auto& ch : scenario.channels) {
    KernelSpec k = make_kernel(ch.nu, ch.c, pb.n, ch.family, ch.phase);
    FourierSeries g = kernel_series(k);
    std::vector<cplx> fg(pb.n);
    simd::complex_multiply(pb.f_tilde.fft_order(), g.fft_order(), fg);
    FourierSeries fg_series = FourierSeries::from_fft_order(std::move(fg));
    const PeriodicSignal conv = inverse(fg_series);
    const PeriodicSignal gs = inverse(g);
    pb.conv_samples.emplace_back(conv.samples().begin(), conv.samples().end());
    pb.kernel_samples.emplace_back(gs.samples().begin(), gs.samples().end());
    pb.kernels.push_back(k);
    pb.g_tilde.push_back(std::move(g));
    pb.fg_tilde.push_back(std::move(fg_series));
    pb.gen1.push_back(generator_for(cache, ch.alpha1, pb.n));
    pb.gen2.push_back(generator_for(cache, ch.alpha2, pb.n));
  }
  return pb;
}

std::vector<double> noise_path(const Problem& problem, std::size_t channel, int role, double level,
                               std::uint64_t seed) {
  const auto& gen = role == 0 ? problem.gen1.at(channel) : problem.gen2.at(channel);
  const double alpha = role == 0 ? problem.channels.at(channel).alpha1 : problem.channels.at(channel).alpha2;
  std::mt19937_64 rng(stream_seed(seed, channel, role));
  std::vector<double> path = gen->sample(rng);
  // level^alpha n^{alpha/2}: makes E|Z~(m)|^2 ~ level^{2 alpha} |m|^{alpha-1} for the 1/n transform
  const double scale = std::pow(level, alpha) * std::pow(static_cast<double>(problem.n), alpha / 2.0);
  for (double& v : path) v *= scale;
  return path;
}

std::vector<ChannelData> simulate_observations(const Problem& problem, double eps, double delta,
                                               std::uint64_t seed) {
  std::vector<ChannelData> out;
  out.reserve(problem.channels.size());
  for (std::size_t l = 0; l < problem.channels.size(); ++l) {
    const auto& ch = problem.channels[l];
    FourierSeries y = problem.fg_tilde[l];
    FourierSeries g = problem.g_tilde[l];
    if (eps > 0.0) {
      const FourierSeries z = forward(PeriodicSignal(noise_path(problem, l, 0, eps, seed)));
      for (std::size_t i = 0; i < problem.n; ++i) y.fft_order()[i] += z.fft_order()[i];
    }
    if (delta > 0.0) {
      const FourierSeries z = forward(PeriodicSignal(noise_path(problem, l, 1, delta, seed)));
      for (std::size_t i = 0; i < problem.n; ++i) g.fft_order()[i] += z.fft_order()[i];
    }
    out.push_back({std::move(y), std::move(g), ch.alpha1, ch.alpha2, eps, delta});
  }
  validate_channels(out);
  return out;
}

std::vector<RawChannel> simulate_raw(const Problem& problem, double eps, double delta, std::uint64_t seed) {
  std::vector<RawChannel> out;
  for (std::size_t l = 0; l < problem.channels.size(); ++l) {
    RawChannel raw{problem.conv_samples[l], problem.kernel_samples[l]};
    if (eps > 0.0) {
      const auto z = noise_path(problem, l, 0, eps, seed);
      for (std::size_t i = 0; i < problem.n; ++i) raw.y[i] += z[i];
    }
    if (delta > 0.0) {
      const auto z = noise_path(problem, l, 1, delta, seed);
      for (std::size_t i = 0; i < problem.n; ++i) raw.g[i] += z[i];
    }
    out.push_back(std::move(raw));
  }
  return out;
}

double dense_exponent(double s, double nu, double alpha) { return 2.0 * s / (2.0 * s + 2.0 * nu + alpha); }

double sparse_exponent(double s_star, double nu, double alpha) {
  return 2.0 * s_star / (2.0 * s_star + 2.0 * nu + alpha - 1.0);
}

ExponentResult theoretical_exponent(double s, double p, std::span<const double> nu,
                                    std::span<const double> alpha1, std::span<const double> alpha2) {
  if (nu.empty() || nu.size() != alpha1.size() || nu.size() != alpha2.size()) {
    throw InvalidInput("theoretical_exponent: nu, alpha1, alpha2 must be nonempty and of equal length");
  }
  if (!(p >= 1.0)) throw InvalidInput("theoretical_exponent: p must be >= 1");
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  if (!(s >= std::max(inv_p, 0.5)) || !std::isfinite(s)) {
    throw InvalidInput("theoretical_exponent: s must be >= max(1/p, 1/2)");
  }
  for (std::size_t l = 0; l < nu.size(); ++l) {
    if (!(nu[l] > 0.0)) throw InvalidInput("theoretical_exponent: nu must be > 0");
    if (!(alpha1[l] > 0.0 && alpha1[l] <= 1.0) || !(alpha2[l] > 0.0 && alpha2[l] <= 1.0)) {
      throw InvalidInput("theoretical_exponent: alphas must lie in (0, 1]");
    }
  }
  auto argmin = [&](std::span<const double> alpha) {
    std::size_t best = 0;
    for (std::size_t l = 1; l < nu.size(); ++l) {
      if (2.0 * nu[l] + alpha[l] < 2.0 * nu[best] + alpha[best]) best = l;
    }
    return best;
  };

  ExponentResult r;
  r.s = s;
  r.p = p;
  r.s_star = s + 0.5 - inv_p;
  r.l1 = argmin(alpha1);
  r.l2 = argmin(alpha2);
  r.nu1 = nu[r.l1];
  r.nu2 = nu[r.l2];
  r.alpha1 = alpha1[r.l1];
  r.alpha2 = alpha2[r.l2];
  r.s1 = (inv_p - 0.5) * (2.0 * r.nu1 + r.alpha1);
  r.s2 = (inv_p - 0.5) * (2.0 * r.nu2 + r.alpha2);
  const double tol = 1e-12 * std::max(1.0, std::abs(s));
  r.xi1 = std::abs(s - r.s1) <= tol;
  r.xi2 = std::abs(s - r.s2) <= tol;
  r.dense1 = s > r.s1 && !r.xi1;
  r.dense2 = s > r.s2 && !r.xi2;
  r.exponent_eps = r.dense1 ? dense_exponent(s, r.nu1, r.alpha1) : sparse_exponent(r.s_star, r.nu1, r.alpha1);
  r.exponent_delta = r.dense2 ? dense_exponent(s, r.nu2, r.alpha2) : sparse_exponent(r.s_star, r.nu2, r.alpha2);
  if (r.dense1 && r.dense2) {
    r.regime = "dense";
  } else if (!r.dense1 && !r.dense2) {
    r.regime = "sparse";
  } else if (r.dense1) {
    r.regime = "dense-eps/sparse-delta";
  } else {
    r.regime = "sparse-eps/dense-delta";
  }
  return r;
}

double target_log_eps_slope(const ExponentResult& theory, DeltaCoupling coupling, double gamma) {
  const double t1 = 2.0 * theory.alpha1 * theory.exponent_eps;
  if (coupling == DeltaCoupling::zero) return t1;
  return std::min(t1, gamma * 2.0 * theory.alpha2 * theory.exponent_delta);
}

RiskStats summarize_risks(std::span<const double> risks, std::size_t failures) {
  RiskStats st;
  st.failures = failures;
  double sum = 0.0;
  for (double r : risks) {
    if (std::isnan(r)) continue;
    sum += r;
    ++st.count;
  }
  if (st.count == 0) {
    st.mean = kNaN;
    st.se = kNaN;
    return st;
  }
  st.mean = sum / static_cast<double>(st.count);
  if (st.count > 1) {
    double ss = 0.0;
    for (double r : risks) {
      if (!std::isnan(r)) ss += (r - st.mean) * (r - st.mean);
    }
    st.se = std::sqrt(ss / static_cast<double>(st.count - 1) / static_cast<double>(st.count));
  }
  return st;
}

RiskReport run_experiment(const Scenario& scenario) {
  const auto start = std::chrono::steady_clock::now();
  const Problem problem = build_problem(scenario);

  RiskReport rep;
  rep.scenario = scenario.name;
  rep.n = scenario.n;
  rep.M = scenario.M();
  rep.reps = scenario.reps;
  rep.seed = scenario.seed;

  for (double eps : scenario.eps_grid) {
    GridPoint gp;
    gp.eps = eps;
    gp.delta = scenario.delta_for(eps);
    gp.blind_risks.assign(scenario.reps, kNaN);
    if (scenario.oracle) gp.oracle_risks.assign(scenario.reps, kNaN);
    parallel_for(
        scenario.reps,
        [&](std::size_t r) {
          const auto channels = simulate_observations(problem, gp.eps, gp.delta, scenario.seed + r);
          try {
            gp.blind_risks[r] = grid_distance2(estimate(channels, scenario.estimator).signal, problem.f);
          } catch (const InfeasibleConfiguration&) {
          } catch (const EstimationFailure&) {
          }
          if (scenario.oracle) {
            try {
              gp.oracle_risks[r] = grid_distance2(
                  estimate_known_kernel(channels, problem.g_tilde, scenario.estimator).signal, problem.f);
            } catch (const InfeasibleConfiguration&) {
            } catch (const EstimationFailure&) {
            }
          }
        },
        scenario.threads);
    auto failures = [](const std::vector<double>& v) {
      return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }));
    };
    gp.blind = summarize_risks(gp.blind_risks, failures(gp.blind_risks));
    if (scenario.oracle) gp.oracle = summarize_risks(gp.oracle_risks, failures(gp.oracle_risks));
    rep.points.push_back(std::move(gp));
  }

  if (scenario.signal.type == SignalType::besov) {
    std::vector<double> nu, a1, a2;
    for (const auto& ch : scenario.channels) {
      nu.push_back(ch.nu);
      a1.push_back(ch.alpha1);
      a2.push_back(ch.alpha2);
    }
    rep.theory = theoretical_exponent(scenario.signal.s, scenario.signal.p, nu, a1, a2);
    rep.target_slope = target_log_eps_slope(*rep.theory, scenario.coupling, scenario.gamma);
  }
  try {
    rep.fit = fit_rate(rep, false);
  } catch (const InvalidInput&) {
  }
  if (scenario.oracle) {
    try {
      rep.oracle_fit = fit_rate(rep, true);
    } catch (const InvalidInput&) {
    }
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

RateFit fit_rate(std::span<const double> eps, std::span<const double> risk, double target) {
  if (eps.size() != risk.size()) throw InvalidInput("fit_rate: eps and risk differ in length");
  if (eps.size() < 4) throw InvalidInput("fit_rate: at least 4 grid points are required");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw InvalidInput("fit_rate: eps values must be positive");
    if (!(risk[i] > 0.0) || !std::isfinite(risk[i])) throw InvalidInput("fit_rate: risks must be positive");
    lx.push_back(std::log(eps[i]));
    ly.push_back(std::log(risk[i]));
  }
  const LinearFit f = ols(lx, ly);
  RateFit r;
  r.slope = f.slope;
  r.intercept = f.intercept;
  r.r2 = f.r2;
  r.points = f.points;
  r.target = target;
  r.slope_vs_theory = target > 0.0 ? f.slope / target : 0.0;
  return r;
}

RateFit fit_rate(const RiskReport& report, bool oracle) {
  std::vector<double> eps, risk;
  for (const auto& gp : report.points) {
    if (gp.eps <= 0.0) continue;
    if (oracle && !gp.oracle) throw InvalidInput("fit_rate: report has no oracle risks");
    eps.push_back(gp.eps);
    risk.push_back(oracle ? gp.oracle->mean : gp.blind.mean);
  }
  return fit_rate(eps, risk, report.target_slope);
}

std::vector<SweepRow> run_constant_sweep(const Scenario& scenario, std::span<const double> rho1,
                                         std::span<const double> A) {
  if (rho1.empty() || A.empty()) throw InvalidInput("run_constant_sweep: rho1 and A lists must be nonempty");
  std::vector<SweepRow> rows;
  for (double r : rho1) {
    for (double a : A) {
      Scenario sc = scenario;
      sc.estimator.rho1 = r;
      sc.estimator.rho2 = r;
      sc.estimator.A = a;
      sc.estimator.validate();
      rows.push_back({r, r, a, run_experiment(sc)});
    }
  }
  return rows;
}

PluginComparison run_plugin_comparison(const Scenario& scenario, double eps, std::size_t seeds,
                                       std::uint64_t base_seed) {
  if (seeds == 0) throw InvalidInput("run_plugin_comparison: seeds must be positive");
  const Problem problem = build_problem(scenario);
  const double delta = scenario.delta_for(eps);
  PluginTruth truth;
  for (const auto& ch : scenario.channels) {
    truth.alpha1.push_back(ch.alpha1);
    truth.alpha2.push_back(ch.alpha2);
  }
  truth.f = problem.f;

  struct Slot {
    double ratio = kNaN;
    std::vector<double> a1, a2;
  };
  std::vector<Slot> slots(seeds);
  parallel_for(
      seeds,
      [&](std::size_t i) {
        const std::uint64_t s = base_seed + i;
        auto first = simulate_raw(problem, eps, delta, mix_seed(2 * s));
        const auto second = simulate_raw(problem, eps, delta, mix_seed(2 * s + 1));
        for (std::size_t l = 0; l < first.size(); ++l) {
          first[l].y.insert(first[l].y.end(), second[l].y.begin(), second[l].y.end());
          first[l].g.insert(first[l].g.end(), second[l].g.begin(), second[l].g.end());
        }
        const SplitSample split = split_sample(first);
        try {
          const PluginResult res = plugin_workflow(split, eps, delta, scenario.estimator, scenario.plugin, &truth);
          slots[i].ratio = *res.risk / *res.true_alpha_risk;
          slots[i].a1 = res.alpha1_hat;
          slots[i].a2 = res.alpha2_hat;
        } catch (const InfeasibleConfiguration&) {
        } catch (const EstimationFailure&) {
        }
      },
      scenario.threads);

  PluginComparison out;
  out.eps = eps;
  out.delta = delta;
  const std::size_t M = scenario.M();
  out.alpha1_hat_mean.assign(M, 0.0);
  out.alpha2_hat_mean.assign(M, 0.0);
  std::size_t ok = 0;
  for (const auto& sl : slots) {
    if (std::isnan(sl.ratio)) {
      ++out.failures;
      continue;
    }
    out.ratios.push_back(sl.ratio);
    for (std::size_t l = 0; l < M; ++l) {
      out.alpha1_hat_mean[l] += sl.a1[l];
      out.alpha2_hat_mean[l] += sl.a2[l];
    }
    ++ok;
  }
  for (std::size_t l = 0; l < M && ok > 0; ++l) {
    out.alpha1_hat_mean[l] /= static_cast<double>(ok);
    out.alpha2_hat_mean[l] /= static_cast<double>(ok);
  }
  out.median_ratio = median_of(out.ratios);
  return out;
}

}  // namespace lrdecon
