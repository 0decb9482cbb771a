#include "lrdecon/fgn.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "lrdecon/error.hpp"
#include "lrdecon/fourier.hpp"
#include "lrdecon/regression.hpp"

namespace lrdecon {

FgnParams FgnParams::from_alpha(double alpha, std::size_t n, std::uint64_t seed) {
  return FgnParams{1.0 - alpha / 2.0, n, seed};
}

void FgnParams::validate() const {
  if (!(hurst >= 0.5 && hurst < 1.0)) {
    throw InvalidInput("fGn: Hurst parameter " + std::to_string(hurst) + " outside [1/2, 1)");
  }
  if (n < 2 || !is_power_of_two(n)) throw InvalidInput("fGn: path length must be a power of two >= 2");
}

double fgn_autocovariance(double hurst, long lag) noexcept {
  const double h = std::abs(static_cast<double>(lag));
  const double e = 2.0 * hurst;
  return 0.5 * (std::pow(h + 1.0, e) - 2.0 * std::pow(h, e) + std::pow(std::abs(h - 1.0), e));
}

CirculantFgn::CirculantFgn(double hurst, std::size_t n) : hurst_(hurst), n_(n) {
  FgnParams{hurst, n, 0}.validate();
  const std::size_t m = 2 * n;
  std::vector<cplx> row(m);
  for (std::size_t k = 0; k <= n; ++k) row[k] = fgn_autocovariance(hurst, static_cast<long>(k));
  for (std::size_t k = 1; k < n; ++k) row[m - k] = row[k];
  std::vector<cplx> eig(m);
  detail::dft(row, eig, -1);

  double peak = 0.0;
  min_eig_ = eig[0].real();
  for (const auto& e : eig) {
    peak = std::max(peak, std::abs(e.real()));
    min_eig_ = std::min(min_eig_, e.real());
  }
  if (min_eig_ < -1e-10 * peak) {
    throw SynthesisFailure("circulant embedding for H=" + std::to_string(hurst) + ", n=" +
                           std::to_string(n) + " has negative eigenvalue " + std::to_string(min_eig_));
  }
  sqrt_eig_.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    sqrt_eig_[k] = std::sqrt(std::max(eig[k].real(), 0.0) / static_cast<double>(m));
  }
}

std::vector<double> CirculantFgn::sample(std::mt19937_64& rng) const {
  const std::size_t m = 2 * n_;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> w(m);
  w[0] = sqrt_eig_[0] * gauss(rng);
  w[n_] = sqrt_eig_[n_] * gauss(rng);
  const double root_half = std::sqrt(0.5);
  for (std::size_t k = 1; k < n_; ++k) {
    const double a = gauss(rng);
    const double b = gauss(rng);
    w[k] = sqrt_eig_[k] * root_half * cplx(a, b);
    w[m - k] = std::conj(w[k]);
  }
  std::vector<cplx> x(m);
  detail::dft(w, x, -1);
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = x[i].real();
  return out;
}

std::vector<double> sample_fgn(const FgnParams& params) {
  params.validate();
  CirculantFgn gen(params.hurst, params.n);
  std::mt19937_64 rng(params.seed);
  return gen.sample(rng);
}

FourierCovarianceReport noise_fourier_diagnostic(const FgnParams& params, std::size_t reps,
                                                 std::size_t max_freq) {
  params.validate();
  if (reps == 0) throw InvalidInput("noise_fourier_diagnostic: reps must be positive");
  if (max_freq < 2 || max_freq >= params.n / 2) {
    throw InvalidInput("noise_fourier_diagnostic: max_freq must be in [2, n/2)");
  }
  const CirculantFgn gen(params.hurst, params.n);
  const double scale = std::pow(static_cast<double>(params.n), params.alpha() / 2.0);
  const std::size_t K = max_freq;
  std::vector<cplx> cross(K * K);

  for (std::size_t r = 0; r < reps; ++r) {
    std::mt19937_64 rng(params.seed + r);
    auto path = gen.sample(rng);
    for (double& v : path) v *= scale;
    const FourierSeries z = forward(PeriodicSignal(std::move(path)));
    for (std::size_t a = 0; a < K; ++a) {
      const cplx za = z.at(static_cast<long>(a + 1));
      for (std::size_t b = 0; b < K; ++b) {
        cross[a * K + b] += za * std::conj(z.at(static_cast<long>(b + 1)));
      }
    }
  }

  FourierCovarianceReport rep;
  rep.hurst = params.hurst;
  rep.n = params.n;
  rep.reps = reps;
  rep.max_freq = K;
  rep.relative_se = 1.0 / std::sqrt(static_cast<double>(reps));
  rep.wide_error_bars = reps < 1000;
  const double inv = 1.0 / static_cast<double>(reps);
  const double expo = 1.0 - 2.0 * params.hurst;
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t b = 0; b < K; ++b) {
      const cplx c = cross[a * K + b] * inv;
      const double bound = 2.0 * std::pow(static_cast<double>((a + 1) * (b + 1)), expo);
      const double ratio = std::norm(c) / bound;
      if (ratio > rep.max_ratio) {
        rep.max_ratio = ratio;
        rep.max_ratio_m = static_cast<long>(a + 1);
        rep.max_ratio_mp = static_cast<long>(b + 1);
      }
    }
    rep.variance.push_back(cross[a * K + a].real() * inv);
  }

  std::vector<double> lx(K), ly(K);
  for (std::size_t a = 0; a < K; ++a) {
    lx[a] = std::log(static_cast<double>(a + 1));
    ly[a] = std::log(rep.variance[a]);
  }
  const LinearFit fit = ols(lx, ly);
  rep.variance_slope = fit.slope;
  rep.variance_slope_r2 = fit.r2;
  return rep;
}

}  // namespace lrdecon
