#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "lrdecon/convolution_kernels.hpp"
#include "lrdecon/error.hpp"
#include "lrdecon/estimator.hpp"
#include "lrdecon/fgn.hpp"
#include "lrdecon/simd/kernels.hpp"

using namespace lrdecon;

namespace {

// Hermitian series with |f(m)| ~ (1 + |m|)^-2 up to |m| = limit.
FourierSeries smooth_series(std::size_t n, long limit, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  FourierSeries c(n);
  c[0] = z(rng);
  for (long m = 1; m <= limit; ++m) {
    const double s = std::pow(1.0 + m, -2.0);
    const cplx v(s * z(rng), s * z(rng));
    c[m] = v;
    c[-m] = std::conj(v);
  }
  return c;
}

FourierSeries noise_series(std::size_t n, double level, double alpha, std::uint64_t seed) {
  if (level == 0.0) return FourierSeries(n);
  auto path = sample_fgn(FgnParams::from_alpha(alpha, n, seed));
  const double scale = std::pow(level, alpha) * std::pow(static_cast<double>(n), alpha / 2.0);
  for (double& v : path) v *= scale;
  return forward(PeriodicSignal(std::move(path)));
}

FourierSeries add(const FourierSeries& a, const FourierSeries& b) {
  FourierSeries out(a.size());
  for (long m = a.min_freq(); m <= a.max_freq(); ++m) out[m] = a.at(m) + b.at(m);
  return out;
}

FourierSeries mul(const FourierSeries& a, const FourierSeries& b) {
  FourierSeries out(a.size());
  for (long m = a.min_freq(); m <= a.max_freq(); ++m) out[m] = a.at(m) * b.at(m);
  return out;
}

struct Spec {
  double nu;
  double alpha1;
  double alpha2;
  double phase = 0.0;
};

std::vector<ChannelData> make_channels(const FourierSeries& f, const std::vector<Spec>& specs, double eps,
                                       double delta, std::uint64_t seed) {
  const std::size_t n = f.size();
  std::vector<ChannelData> out;
  for (std::size_t l = 0; l < specs.size(); ++l) {
    const auto g = kernel_series(make_kernel(specs[l].nu, 1.0, n, KernelFamily::power_law, specs[l].phase));
    ChannelData ch{add(mul(f, g), noise_series(n, eps, specs[l].alpha1, seed + 17 * l)),
                   add(g, noise_series(n, delta, specs[l].alpha2, seed + 17 * l + 1)),
                   specs[l].alpha1,
                   specs[l].alpha2,
                   eps,
                   delta};
    out.push_back(std::move(ch));
  }
  return out;
}

ChannelData flat_channel(std::size_t n, double eps, double delta, double a1 = 1.0, double a2 = 1.0) {
  FourierSeries g(n);
  for (long m = g.min_freq(); m <= g.max_freq(); ++m) g[m] = 1.0;
  return ChannelData{FourierSeries(n), g, a1, a2, eps, delta};
}

double rel_series_error(const FourierSeries& a, const FourierSeries& b) {
  double num = 0.0, den = 0.0;
  for (long m = a.min_freq(); m <= a.max_freq(); ++m) {
    num += std::norm(a.at(m) - b.at(m));
    den += std::norm(b.at(m));
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("weights: direct formula examples") {
  std::vector<ChannelData> ch{flat_channel(64, 0.1, 0.1)};
  for (long m : {1L, 5L, -20L}) CHECK(compute_weights(m, ch)[0] == doctest::Approx(50.0));

  ch = {flat_channel(64, 0.1, 0.0)};
  for (long m : {1L, 7L, 31L}) CHECK(compute_weights(m, ch)[0] == doctest::Approx(100.0));

  ch = {flat_channel(64, 0.1, 0.01, 0.6, 1.0)};
  const double expect = 1.0 / (std::pow(0.1, 1.2) * std::pow(16.0, -0.4) + 0.0001);
  CHECK(compute_weights(16, ch)[0] == doctest::Approx(expect).epsilon(1e-14));
  CHECK(compute_weights(-16, ch)[0] == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("weights: |m| is read as at least one") {
  std::vector<ChannelData> ch{flat_channel(64, 0.2, 0.0, 0.5)};
  CHECK(compute_weights(0, ch)[0] == compute_weights(1, ch)[0]);
}

TEST_CASE("weights: noise-free input gives uniform weights") {
  std::vector<ChannelData> ch{flat_channel(64, 0.0, 0.0), flat_channel(64, 0.0, 0.0)};
  bool uniform = false;
  const auto w = compute_weights(3, ch, &uniform);
  CHECK(uniform);
  CHECK(w == std::vector<double>{1.0, 1.0});
}

TEST_CASE("channel validation") {
  std::vector<ChannelData> ch{flat_channel(64, 0.1, 0.1), flat_channel(64, 0.2, 0.1)};
  CHECK_THROWS_AS(validate_channels(ch), InvalidInput);
  ch = {flat_channel(64, 0.1, 0.1), flat_channel(32, 0.1, 0.1)};
  CHECK_THROWS_AS(validate_channels(ch), InvalidInput);
  ch = {flat_channel(64, 0.1, 0.1, 1.2)};
  CHECK_THROWS_AS(validate_channels(ch), InvalidInput);
  ch = {flat_channel(64, 0.1, 0.1, 0.0)};
  CHECK_THROWS_AS(validate_channels(ch), InvalidInput);
  ch = {flat_channel(64, 1.0, 0.1)};
  CHECK_THROWS_AS(validate_channels(ch), InvalidInput);
  ch = {flat_channel(64, -0.1, 0.1)};
  CHECK_THROWS_AS(validate_channels(ch), InvalidInput);
  CHECK_THROWS_AS(validate_channels(std::vector<ChannelData>{}), InvalidInput);
}

TEST_CASE("config validation") {
  EstimatorConfig c;
  CHECK_NOTHROW(c.validate());
  c.k_trunc = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = {};
  c.rho1 = -1.0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = {};
  c.A = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c = {};
  c.m0_override = 1;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
}

TEST_CASE("Fourier estimate: noiseless identity") {
  const auto f = smooth_series(256, 100, 1);
  const auto ch = make_channels(f, {{1.0, 1.0, 1.0}}, 0.0, 0.0, 1);
  for (long m = -128; m < 128; ++m) {
    const auto e = estimate_fourier_coeff(m, ch, {});
    CHECK(e.survived);
    CHECK(std::abs(e.value - f.at(m)) <= 1e-13 * (std::abs(f.at(m)) + 1e-300) + 1e-300);
  }
}

TEST_CASE("Fourier estimate: conjugated numerator recovers f under complex kernels") {
  const auto f = smooth_series(256, 100, 2);
  const auto ch = make_channels(f, {{1.0, 1.0, 1.0, 0.9}, {0.5, 1.0, 1.0, -0.4}}, 0.0, 0.0, 1);
  std::vector<std::uint8_t> survived;
  const auto est = estimate_fourier_series(ch, {}, survived);
  CHECK(rel_series_error(est, f) <= 1e-13);
}

TEST_CASE("Fourier estimate: one failing channel truncates") {
  const std::size_t n = 64;
  const double delta = 0.1;
  std::vector<ChannelData> ch{flat_channel(n, 0.1, delta), flat_channel(n, 0.1, delta)};
  for (long m = -32; m < 32; ++m) ch[0].y_tilde[m] = 1.0;
  for (long m = -32; m < 32; ++m) ch[1].y_tilde[m] = 1.0;
  // k^2 delta^2 |ln delta| = 0.023 at alpha2 = 1; |g|^2 = 0.01 fails it.
  ch[1].g_obs[5] = 0.1;
  ch[1].g_obs[-5] = 0.1;
  const auto e = estimate_fourier_coeff(5, ch, {});
  CHECK_FALSE(e.survived);
  CHECK(e.value == cplx(0.0, 0.0));
  CHECK(estimate_fourier_coeff(6, ch, {}).survived);
}

TEST_CASE("Fourier estimate: survival needs both m and -m") {
  const std::size_t n = 64;
  std::vector<ChannelData> ch{flat_channel(n, 0.1, 0.1)};
  ch[0].g_obs[-7] = 0.05;
  CHECK_FALSE(estimate_fourier_coeff(7, ch, {}).survived);
  CHECK_FALSE(estimate_fourier_coeff(-7, ch, {}).survived);
  const auto flags = surviving_frequencies(ch, {});
  CHECK(flags[7] == 0);
  CHECK(flags[n - 7] == 0);
  CHECK(flags[8] == 1);
}

TEST_CASE("Fourier estimate: two identical channels, hand computation") {
  const std::size_t n = 64;
  const double eps = 0.05, delta = 0.02;
  std::vector<ChannelData> one{flat_channel(n, eps, delta, 0.7, 0.9)};
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (long m = -32; m < 32; ++m) {
    one[0].y_tilde[m] = cplx(z(rng), z(rng));
    one[0].g_obs[m] = cplx(1.0 + 0.1 * z(rng), 0.1 * z(rng));
  }
  std::vector<ChannelData> two{one[0], one[0]};
  for (long m = -32; m < 32; ++m) two[1].y_tilde[m] = cplx(z(rng), z(rng));
  for (long m : {3L, 9L, -12L}) {
    const double am = std::abs(static_cast<double>(m));
    const double w = 1.0 / (std::pow(eps, 1.4) * std::pow(am, -0.3) + std::pow(delta, 1.8) * std::pow(am, -0.1));
    const cplx g = one[0].g_obs.at(m);
    const cplx expect = (w * std::conj(g) * two[0].y_tilde.at(m) + w * std::conj(g) * two[1].y_tilde.at(m)) /
                        (2.0 * w * std::norm(g));
    const auto e = estimate_fourier_coeff(m, two, {});
    CHECK(e.survived);
    CHECK(std::abs(e.value - expect) <= 1e-13 * std::abs(expect));
    // Identical data in both channels reduces to the single-channel estimate.
    std::vector<ChannelData> dup{one[0], one[0]};
    CHECK(std::abs(estimate_fourier_coeff(m, dup, {}).value - estimate_fourier_coeff(m, one, {}).value) <=
          1e-14 * std::abs(estimate_fourier_coeff(m, one, {}).value));
  }
}

TEST_CASE("Fourier series and pointwise estimates agree") {
  const auto f = smooth_series(512, 200, 3);
  const auto ch = make_channels(f, {{1.0, 0.8, 0.6}, {1.5, 0.5, 1.0}}, 0.01, 0.02, 4);
  std::vector<std::uint8_t> survived;
  const auto series = estimate_fourier_series(ch, {}, survived);
  for (long m = -256; m < 256; ++m) {
    const auto e = estimate_fourier_coeff(m, ch, {});
    const std::size_t i = static_cast<std::size_t>((m + 512) % 512);
    CHECK(static_cast<bool>(survived[i]) == e.survived);
    CHECK(std::abs(series.at(m) - e.value) <= 1e-12 * (1.0 + std::abs(e.value)));
  }
  CHECK_THROWS_AS((void)estimate_fourier_coeff(256, ch, {}), InvalidInput);
}

TEST_CASE("S_j: flat kernel counts the band") {
  const std::size_t n = 1024;
  std::vector<ChannelData> ch{flat_channel(n, 0.1, 0.0)};
  const std::vector<std::uint8_t> all(n, 1);
  for (int j = 2; j <= max_meyer_level(n); ++j) {
    const long lo = ((1L << j) + 2) / 3;  // ceil(2^j / 3)
    const long hi = (1L << (j + 2)) / 3;
    CHECK(compute_Sj(j, ch, all)[0] == doctest::Approx(2.0 * static_cast<double>(hi - lo + 1)));
  }
  CHECK_THROWS_AS((void)compute_Sj(max_meyer_level(n) + 1, ch, all), LevelOverflow);
}

TEST_CASE("S_j: power-law kernel scaling") {
  const std::size_t n = 4096;
  for (double nu : {0.5, 1.0, 1.5}) {
    const auto ch = make_channels(FourierSeries(n), {{nu, 1.0, 1.0}}, 0.1, 0.0, 1);
    const std::vector<std::uint8_t> all(n, 1);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int j = 4; j <= 8; ++j) {
      const double y = std::log2(std::ldexp(1.0, j) / compute_Sj(j, ch, all)[0]);
      sx += j;
      sy += y;
      sxx += j * j;
      sxy += j * y;
    }
    const double slope = (5 * sxy - sx * sy) / (5 * sxx - sx * sx);
    CHECK(std::abs(slope - 2.0 * nu) <= 0.2);
  }
}

TEST_CASE("S_j: a fully truncated band gives zeros and a dead level") {
  const std::size_t n = 256;
  std::vector<ChannelData> ch{flat_channel(n, 0.01, 0.01)};
  for (long m = -128; m < 128; ++m) ch[0].y_tilde[m] = 0.001;
  for (long m = 6; m <= 21; ++m) {  // W_4 = 6..21
    ch[0].g_obs[m] = 1e-4;
    ch[0].g_obs[-m] = 1e-4;
  }
  const auto survived = surviving_frequencies(ch, {});
  CHECK(compute_Sj(4, ch, survived) == std::vector<double>{0.0});
  EstimatorConfig cfg;
  cfg.J_override = 6;
  const auto est = estimate(ch, cfg);
  const auto& lt = est.trace.levels[static_cast<std::size_t>(4 - est.trace.m0)];
  CHECK(lt.j == 4);
  CHECK(lt.dead);
  CHECK(std::isinf(lt.lambda));
  for (const cplx& v : est.beta_hat.level(4)) CHECK(v == cplx(0.0, 0.0));
}

TEST_CASE("channel selection") {
  const std::size_t n = 256;
  std::vector<ChannelData> one{flat_channel(n, 0.1, 0.1)};
  CHECK(select_channels(4, one, std::vector<double>{3.0}) == std::pair<std::size_t, std::size_t>{0, 0});

  std::vector<ChannelData> two{flat_channel(n, 0.1, 0.1, 1.0, 1.0), flat_channel(n, 0.1, 0.1, 0.5, 1.0)};
  const std::vector<double> S{32.0, 32.0};
  for (int j : {2, 4, 6}) {
    const double c0 = std::pow(0.1, 2.0) * std::exp2(j * 2.0) / S[0];
    const double c1 = std::pow(0.1, 1.0) * std::exp2(j * 1.5) / S[1];
    const auto [l1, l2] = select_channels(j, two, S);
    CHECK(l1 == (c1 < c0 ? 1u : 0u));
    CHECK(l2 == 0u);  // exact tie on the delta criterion
  }

  std::vector<ChannelData> tie{flat_channel(n, 0.1, 0.1), flat_channel(n, 0.1, 0.1)};
  CHECK(select_channels(5, tie, std::vector<double>{10.0, 10.0}) == std::pair<std::size_t, std::size_t>{0, 0});
  CHECK(select_channels(5, tie, std::vector<double>{10.0, 20.0}) == std::pair<std::size_t, std::size_t>{1, 1});
  CHECK(select_channels(5, tie, std::vector<double>{0.0, 20.0}) == std::pair<std::size_t, std::size_t>{1, 1});
}

TEST_CASE("threshold: known-kernel white-noise form") {
  std::vector<ChannelData> ch{flat_channel(256, 0.05, 0.0)};
  EstimatorConfig cfg;
  cfg.rho1 = 2.5;
  const double S = 40.0;
  for (int j : {3, 5}) {
    const double expect = 2.5 / std::sqrt(S) * 0.05 * std::sqrt(std::abs(std::log(0.05))) * std::exp2(j / 2.0);
    CHECK(threshold_lambda(j, ch, std::vector<double>{S}, cfg) == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("threshold: maximum of the two terms, delta term wins as the noise shrinks") {
  for (double e : {0.2, 0.05, 1e-3}) {
    std::vector<ChannelData> ch{flat_channel(256, e, e), flat_channel(256, e, e)};
    const double S = 24.0;
    const int j = 4;
    const double t1 = e * std::sqrt(std::abs(std::log(e)));
    const double t2 = e * std::abs(std::log(e));
    const double expect = std::max(t1, t2) / std::sqrt(S) * std::exp2(j / 2.0);
    CHECK(threshold_lambda(j, ch, std::vector<double>{S, S}, {}) == doctest::Approx(expect).epsilon(1e-14));
    if (std::abs(std::log(e)) > 1.0) CHECK(t2 > t1);
  }
}

TEST_CASE("threshold: zero constants switch thresholding off") {
  const auto f = smooth_series(512, 150, 7);
  const auto ch = make_channels(f, {{1.0, 0.8, 0.8}}, 0.05, 0.05, 9);
  EstimatorConfig cfg;
  cfg.rho1 = cfg.rho2 = 0.0;
  CHECK(threshold_lambda(4, ch, std::vector<double>{5.0}, cfg) == 0.0);
  const auto est = estimate(ch, cfg);
  for (const auto& lt : est.trace.levels) {
    if (lt.dead) continue;
    CHECK(lt.lambda == 0.0);
  }
  for (int j = est.trace.m0; j < est.trace.J; ++j) {
    const auto a = est.beta_tilde.level(j);
    const auto b = est.beta_hat.level(j);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
  }
}

TEST_CASE("threshold: noise-free is zero, zero S_j is rejected") {
  std::vector<ChannelData> ch{flat_channel(256, 0.0, 0.0)};
  CHECK(threshold_lambda(4, ch, std::vector<double>{5.0}, {}) == 0.0);
  ch = {flat_channel(256, 0.1, 0.0)};
  CHECK_THROWS_AS((void)threshold_lambda(4, ch, std::vector<double>{0.0}, {}), InvalidInput);
}

TEST_CASE("levels: m0 from the noise levels") {
  const double e8 = std::exp(-8.0);
  std::vector<ChannelData> ch{flat_channel(4096, e8, e8)};
  CHECK(select_levels(ch, {}).m0 == 3);
  ch = {flat_channel(4096, 0.1, 0.0)};
  CHECK(select_levels(ch, {}).m0 == 2);  // floor(log2 2.3) = 1, clamped to 2
  ch = {flat_channel(4096, 1e-7, 0.0)};
  CHECK(select_levels(ch, {}).m0 == 4);  // |ln 1e-7| = 16.1
  ch = {flat_channel(4096, 1e-7, 0.3)};
  CHECK(select_levels(ch, {}).m0 == 2);  // the smaller log wins
}

TEST_CASE("levels: white noise, flat kernel gives 2^J of order eps^-2") {
  for (double eps : {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0}) {
    std::vector<ChannelData> ch{flat_channel(16384, eps, 0.0)};
    const auto sel = select_levels(ch, {});
    const double ratio = std::ldexp(1.0, sel.J) * eps * eps;
    CHECK(ratio >= 1.0);
    CHECK(ratio <= 8.0);
    CHECK_FALSE(sel.J_capped);
  }
}

TEST_CASE("levels: cap recorded when the grid is too small") {
  std::vector<ChannelData> ch{flat_channel(256, 1e-4, 0.0)};
  const auto sel = select_levels(ch, {});
  CHECK(sel.J == sel.J_cap);
  CHECK(sel.J_capped);
  CHECK(sel.J_cap == max_meyer_level(256) + 1);
}

TEST_CASE("levels: noise-free") {
  std::vector<ChannelData> ch{flat_channel(512, 0.0, 0.0)};
  const auto sel = select_levels(ch, {});
  CHECK(sel.m0 == 2);
  CHECK(sel.J == sel.J_cap);
}

TEST_CASE("levels: infeasible and overflowing requests") {
  // A tiny A^2 M bound fails the criterion at the first level.
  std::vector<ChannelData> ch{flat_channel(512, 0.3, 0.0)};
  EstimatorConfig cfg;
  cfg.A = 1e-3;
  CHECK_THROWS_AS((void)select_levels(ch, cfg), InfeasibleConfiguration);
  cfg = {};
  cfg.J_override = 30;
  CHECK_THROWS_AS((void)select_levels(ch, cfg), LevelOverflow);
  cfg = {};
  cfg.m0_override = 9;
  CHECK_THROWS_AS((void)select_levels(ch, cfg), InfeasibleConfiguration);
  cfg = {};
  cfg.m0_override = 3;
  cfg.J_override = 6;
  const auto sel = select_levels(ch, cfg);
  CHECK(sel.m0 == 3);
  CHECK(sel.J == 6);
}

TEST_CASE("levels: J grows as the noise shrinks") {
  const auto f = smooth_series(4096, 300, 1);
  int prev = 0;
  for (double eps : {0.1, 0.01, 0.001, 1e-4}) {
    const auto ch = make_channels(f, {{1.0, 0.7, 1.0}}, eps, 0.0, 3);
    const int J = select_levels(ch, {}).J;
    CHECK(J >= prev);
    prev = J;
  }
}

TEST_CASE("estimate: noiseless end-to-end identity") {
  const std::size_t n = 1024;
  const auto f = smooth_series(n, 300, 11);
  for (std::size_t M : {1u, 3u}) {
    std::vector<Spec> specs;
    for (std::size_t l = 0; l < M; ++l) specs.push_back({l % 2 ? 0.5 : 1.0, 1.0, 1.0});
    const auto ch = make_channels(f, specs, 0.0, 0.0, 1);
    const auto est = estimate(ch, {});
    CHECK(est.trace.noise_free);
    CHECK(est.trace.uniform_weights);
    CHECK(est.trace.J == est.trace.J_cap);
    const auto truth = inverse(f);
    const MeyerBasis basis(n, est.trace.m0);
    const auto proj = basis.synthesize(basis.analyze(f, est.trace.J));
    const double tail = grid_distance2(proj, truth);
    CHECK(std::sqrt(grid_distance2(est.signal, proj) / truth.norm2()) <= 1e-8);
    CHECK(grid_distance2(est.signal, truth) <= 1e-16 * truth.norm2() + tail * (1.0 + 1e-6));
  }
}

TEST_CASE("estimate: pure noise is mostly killed") {
  const std::size_t n = 4096;
  const auto ch = make_channels(FourierSeries(n), {{1.0, 0.8, 0.9}}, 1e-3, 1e-3, 21);
  const auto est = estimate(ch, {});
  std::size_t wavelet_total = 0;
  for (const auto& lt : est.trace.levels) wavelet_total += lt.kept + lt.killed;
  CHECK(static_cast<double>(est.trace.killed_total) >= 0.95 * static_cast<double>(wavelet_total));
}

TEST_CASE("estimate: hard-threshold structure and trace bookkeeping") {
  const auto f = smooth_series(2048, 400, 12);
  const auto ch = make_channels(f, {{1.0, 0.8, 0.7}, {0.5, 0.6, 1.0}}, 0.02, 0.01, 13);
  EstimatorConfig cfg;
  cfg.rho1 = 2.0;
  const auto est = estimate(ch, cfg);
  const auto& tr = est.trace;
  CHECK(tr.kept_total + tr.killed_total == tr.coefficient_total);
  CHECK(tr.coefficient_total == (std::size_t{1} << tr.J));
  for (const auto& lt : tr.levels) {
    CHECK(lt.kept + lt.killed == (std::size_t{1} << lt.j));
    for (std::size_t k = 0; k < (std::size_t{1} << lt.j); ++k) {
      const cplx t = est.beta_tilde.at(lt.j, k);
      const cplx h = est.beta_hat.at(lt.j, k);
      CHECK((h == t || h == cplx(0.0, 0.0)));
      if (!lt.dead) CHECK((h != cplx(0.0, 0.0)) == (std::abs(t) > lt.lambda));
    }
  }
  // The scaling slot is never thresholded.
  const auto a = est.beta_tilde.level(tr.m0 - 1);
  const auto b = est.beta_hat.level(tr.m0 - 1);
  CHECK(std::equal(a.begin(), a.end(), b.begin()));
  // Survival flags agree with the test re-applied.
  for (long m = -1024; m < 1024; ++m) {
    const auto e = estimate_fourier_coeff(m, ch, cfg);
    CHECK(tr.survives(m) == e.survived);
  }
}

TEST_CASE("estimate: determinism") {
  const auto f = smooth_series(1024, 200, 14);
  const auto ch = make_channels(f, {{1.0, 0.8, 0.7}}, 0.02, 0.02, 15);
  const auto a = estimate(ch, {});
  const auto b = estimate(ch, {});
  CHECK(std::equal(a.signal.samples().begin(), a.signal.samples().end(), b.signal.samples().begin()));
  CHECK(a.trace.survived == b.trace.survived);
  CHECK(a.trace.J == b.trace.J);
  REQUIRE(a.trace.levels.size() == b.trace.levels.size());
  for (std::size_t i = 0; i < a.trace.levels.size(); ++i) {
    CHECK(a.trace.levels[i].lambda == b.trace.levels[i].lambda);
    CHECK(a.trace.levels[i].S == b.trace.levels[i].S);
    CHECK(a.trace.levels[i].kept == b.trace.levels[i].kept);
  }
}

TEST_CASE("estimate: scalar and AVX2 paths agree") {
  if (!simd::cpu_has_avx2()) return;
  const auto f = smooth_series(2048, 500, 16);
  const auto ch = make_channels(f, {{1.0, 0.8, 0.7}, {1.5, 0.6, 0.9}}, 0.01, 0.01, 17);
  const auto before = simd::active().isa;
  simd::set_active(simd::Isa::scalar);
  const auto a = estimate(ch, {});
  simd::set_active(simd::Isa::avx2);
  const auto b = estimate(ch, {});
  simd::set_active(before);
  CHECK(a.trace.survived == b.trace.survived);
  CHECK(a.trace.J == b.trace.J);
  CHECK(a.trace.kept_total == b.trace.kept_total);
  CHECK(std::sqrt(grid_distance2(a.signal, b.signal) / a.signal.norm2()) <= 1e-12);
}

TEST_CASE("estimate: coefficients are equivariant to scaling the observations") {
  const auto f = smooth_series(1024, 300, 18);
  auto ch = make_channels(f, {{1.0, 0.8, 0.7}, {0.5, 1.0, 1.0}}, 0.02, 0.02, 19);
  const auto a = estimate(ch, {});
  const double c = -3.75;
  for (auto& x : ch) {
    for (long m = x.y_tilde.min_freq(); m <= x.y_tilde.max_freq(); ++m) x.y_tilde[m] *= c;
  }
  const auto b = estimate(ch, {});
  REQUIRE(a.trace.J == b.trace.J);
  for (int j = a.trace.m0 - 1; j < a.trace.J; ++j) {
    for (std::size_t k = 0; k < a.beta_tilde.slots(j); ++k) {
      const cplx expect = c * a.beta_tilde.at(j, k);
      CHECK(std::abs(b.beta_tilde.at(j, k) - expect) <= 1e-12 * (std::abs(expect) + 1e-12));
    }
  }
}

TEST_CASE("truncation set is monotone in the test level") {
  const auto f = smooth_series(1024, 200, 20);
  auto ch = make_channels(f, {{1.5, 0.8, 0.7}, {1.0, 0.8, 0.5}}, 0.05, 0.08, 21);
  std::vector<std::uint8_t> prev = surviving_frequencies(ch, {});
  // Same observed kernels, shrinking the test level through delta, then through k.
  for (double d : {0.04, 0.01, 0.001}) {
    for (auto& x : ch) x.delta = d;
    const auto now = surviving_frequencies(ch, {});
    for (std::size_t i = 0; i < now.size(); ++i) {
      if (prev[i]) CHECK(now[i]);
    }
    prev = now;
  }
  for (auto& x : ch) x.delta = 0.05;
  std::vector<std::uint8_t> last;
  for (double k : {3.0, 1.0, 0.3}) {
    EstimatorConfig cfg;
    cfg.k_trunc = k;
    const auto now = surviving_frequencies(ch, cfg);
    if (!last.empty()) {
      for (std::size_t i = 0; i < now.size(); ++i) {
        if (last[i]) CHECK(now[i]);
      }
    }
    last = now;
  }
}

TEST_CASE("sandwich bound on the observed kernel") {
  // On the survival set intersected with {max |kernel noise| < rho * sqrt(test level)}:
  // (1 - 2 rho)/(1 - rho) |g| <= |g_obs| <= |g| / (1 - rho).
  const std::size_t n = 4096;
  const double delta = 0.01, rho = 0.45;
  const std::vector<Spec> specs{{0.3, 1.0, 0.9}, {0.5, 1.0, 0.9}};
  const auto ch = make_channels(FourierSeries(n), specs, 0.0, delta, 33);
  const auto survived = surviving_frequencies(ch, {});
  const double a2 = 0.9;
  std::size_t checked = 0;
  for (long m = 1; m < 2048; ++m) {
    const double level = std::pow(delta, 2 * a2) * std::pow(static_cast<double>(m), a2 - 1) * std::abs(std::log(delta));
    bool omega2 = true;
    for (std::size_t l = 0; l < ch.size(); ++l) {
      const cplx g = kernel_series(make_kernel(specs[l].nu, 1.0, n)).at(m);
      omega2 = omega2 && std::norm(ch[l].g_obs.at(m) - g) < rho * rho * level;
    }
    if (!omega2 || !survived[static_cast<std::size_t>(m)]) continue;
    for (std::size_t l = 0; l < ch.size(); ++l) {
      const double g = std::abs(kernel_series(make_kernel(specs[l].nu, 1.0, n)).at(m));
      const double go = std::abs(ch[l].g_obs.at(m));
      CHECK(go >= (1.0 - 2.0 * rho) / (1.0 - rho) * g * (1.0 - 1e-12));
      CHECK(go <= g / (1.0 - rho) * (1.0 + 1e-12));
    }
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("weights minimize the variance functional") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t M = 1 + static_cast<std::size_t>(u(rng) * 4.0) % 4;
    const double eps = std::pow(10.0, -3.0 * u(rng));
    const double delta = u(rng) < 0.2 ? 0.0 : std::pow(10.0, -3.0 * u(rng));
    const long m = 1 + static_cast<long>(u(rng) * 500);
    std::vector<ChannelData> ch;
    std::vector<double> g2(M), var(M);
    for (std::size_t l = 0; l < M; ++l) {
      auto c = flat_channel(1024, std::min(eps, 0.999), std::min(delta, 0.999), 0.05 + 0.95 * u(rng),
                            0.05 + 0.95 * u(rng));
      g2[l] = std::pow(1.0 + m, -2.0 * (0.2 + 2.0 * u(rng)));
      var[l] = std::pow(c.eps, 2 * c.alpha1) * std::pow(m, c.alpha1 - 1) +
               (c.delta > 0 ? std::pow(c.delta, 2 * c.alpha2) * std::pow(m, c.alpha2 - 1) : 0.0);
      ch.push_back(std::move(c));
    }
    auto functional = [&](const std::vector<double>& w) {
      double num = 0.0, den = 0.0;
      for (std::size_t l = 0; l < M; ++l) {
        num += w[l] * w[l] * g2[l] * var[l];
        den += w[l] * g2[l];
      }
      return num / (den * den);
    };
    const double best = functional(compute_weights(m, ch));
    for (int r = 0; r < 100; ++r) {
      std::vector<double> w(M);
      for (auto& x : w) x = std::exp(8.0 * (u(rng) - 0.5));
      if (best > functional(w) * (1.0 + 1e-12)) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("known-kernel oracle") {
  const std::size_t n = 1024;
  const auto f = smooth_series(n, 250, 40);
  const std::vector<Spec> specs{{1.0, 0.8, 1.0}, {0.5, 0.6, 1.0}};
  const auto ch = make_channels(f, specs, 0.01, 0.0, 41);
  std::vector<FourierSeries> g;
  for (const auto& s : specs) g.push_back(kernel_series(make_kernel(s.nu, 1.0, n)));
  const auto a = estimate(ch, {});
  const auto b = estimate_known_kernel(ch, g, {});
  const auto c = estimate_known_kernel(ch, {});
  CHECK(grid_distance2(a.signal, b.signal) == 0.0);
  CHECK(grid_distance2(a.signal, c.signal) == 0.0);

  const auto noiseless = make_channels(f, specs, 0.0, 0.0, 41);
  auto blurred = make_channels(f, specs, 0.0, 0.05, 42);
  const auto oracle = estimate_known_kernel(blurred, g, {});
  const auto ref = estimate(noiseless, {});
  CHECK(std::sqrt(grid_distance2(oracle.signal, ref.signal) / ref.signal.norm2()) <= 1e-10);
  CHECK_THROWS_AS((void)estimate_known_kernel(ch, std::vector<FourierSeries>{g[0]}, {}), InvalidInput);
}
