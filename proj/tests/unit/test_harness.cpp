#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "lrdecon/error.hpp"
#include "lrdecon/experiment.hpp"
#include "lrdecon/regression.hpp"
#include "lrdecon/report.hpp"
#include "lrdecon/scenario.hpp"

using namespace lrdecon;

namespace {

Scenario white_scenario(std::size_t n, std::size_t reps) {
  Scenario sc;
  sc.name = "white";
  sc.n = n;
  sc.channels = {ChannelSpec{}};
  sc.signal.A = 64.0;
  sc.signal.spread = 4.0;
  sc.eps_grid = power_grid(2.0, -3, -7);
  sc.reps = reps;
  sc.estimator.rho1 = 3.0;
  sc.estimator.A = 8.0;
  return sc;
}

}  // namespace

TEST_CASE("Besov construction hits the requested norm") {
  for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
    for (double spread : {0.0, 4.0}) {
      const auto b = build_besov_signal(1024, 2.0, p, 2.0, 5.0, 3, 0, 9, spread);
      CHECK(std::abs(b.norm - 5.0) <= 1e-6 * 5.0);
      CHECK(b.norm <= 5.0);
    }
  }
  const auto b = build_besov_signal(1024, 1.5, 2.0, 2.0, 3.0, 2, 0, 4, 2.0);
  double total = 0.0;
  for (int j = 2; j < b.coeffs.J(); ++j) {
    double lvl = 0.0;
    for (const cplx& v : b.coeffs.level(j)) lvl += std::norm(v);
    total += std::exp2(2.0 * 1.5 * j) * lvl;
  }
  CHECK(std::sqrt(total) == doctest::Approx(b.norm).epsilon(1e-12));
  CHECK(besov_norm(b.coeffs, 1.5, 2.0, 2.0) == doctest::Approx(b.norm).epsilon(1e-14));
}

TEST_CASE("smoother signals put less energy at fine levels") {
  auto fine_fraction = [](double s) {
    const auto b = build_besov_signal(2048, s, 2.0, 2.0, 1.0, 2, 0, 3);
    double fine = 0.0, total = 0.0;
    for (int j = 2; j < b.coeffs.J(); ++j) {
      for (const cplx& v : b.coeffs.level(j)) {
        total += std::norm(v);
        if (j >= 6) fine += std::norm(v);
      }
    }
    return fine / total;
  };
  CHECK(fine_fraction(2.0) < fine_fraction(0.75));
}

TEST_CASE("Besov argument checks") {
  CHECK_THROWS_AS(build_besov_signal(1024, 0.4, 2.0, 2.0, 1.0, 2, 0, 1), InvalidInput);
  CHECK_THROWS_AS(build_besov_signal(1024, 0.9, 1.0, 2.0, 1.0, 2, 0, 1), InvalidInput);
  CHECK_THROWS_AS(build_besov_signal(1024, 2.0, 2.0, 2.0, 0.0, 2, 0, 1), InvalidInput);
  CHECK_THROWS_AS(build_besov_signal(1024, 2.0, 2.0, 2.0, 1.0, 2, 40, 1), InvalidInput);
  CHECK_THROWS_AS(build_besov_signal(1024, 2.0, 2.0, 2.0, 1.0, 2, 0, 1, -1.0), InvalidInput);
}

TEST_CASE("noise-free simulation is the exact convolution") {
  Scenario sc = white_scenario(512, 1);
  sc.channels = {ChannelSpec{1.0}, ChannelSpec{0.5, 2.0, KernelFamily::smoothed_power_law, 0.3, 0.6, 0.8}};
  const Problem pb = build_problem(sc);
  const auto ch = simulate_observations(pb, 0.0, 0.0, 5);
  for (std::size_t l = 0; l < 2; ++l) {
    for (long m = -256; m < 256; ++m) {
      CHECK(ch[l].y_tilde.at(m) == pb.f_tilde.at(m) * pb.g_tilde[l].at(m));
      CHECK(ch[l].g_obs.at(m) == pb.g_tilde[l].at(m));
    }
  }
  const auto raw = simulate_raw(pb, 0.0, 0.0, 5);
  const auto conv = circular_convolve(pb.f, inverse(pb.g_tilde[1]));
  for (std::size_t i = 0; i < 512; ++i) CHECK(std::abs(raw[1].y[i] - conv[i]) <= 1e-12);
}

TEST_CASE("simulation is seeded and channels are independent") {
  Scenario sc = white_scenario(512, 1);
  sc.channels = {ChannelSpec{}, ChannelSpec{}};
  const Problem pb = build_problem(sc);
  const auto a = simulate_observations(pb, 0.1, 0.1, 3);
  const auto b = simulate_observations(pb, 0.1, 0.1, 3);
  const auto c = simulate_observations(pb, 0.1, 0.1, 4);
  CHECK(a[0].y_tilde.at(5) == b[0].y_tilde.at(5));
  CHECK(a[0].y_tilde.at(5) != c[0].y_tilde.at(5));
  // Identical channel specs, so any difference comes from the noise streams.
  CHECK(a[0].y_tilde.at(5) != a[1].y_tilde.at(5));
  CHECK(a[0].g_obs.at(5) != a[1].g_obs.at(5));

  // Cross-channel correlation of the noise paths is at the sampling level.
  const auto z0 = noise_path(pb, 0, 0, 0.1, 3);
  const auto z1 = noise_path(pb, 1, 0, 0.1, 3);
  const auto w0 = noise_path(pb, 0, 1, 0.1, 3);
  auto corr = [](const std::vector<double>& x, const std::vector<double>& y) {
    double xy = 0, xx = 0, yy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      xy += x[i] * y[i];
      xx += x[i] * x[i];
      yy += y[i] * y[i];
    }
    return xy / std::sqrt(xx * yy);
  };
  CHECK(std::abs(corr(z0, z1)) < 4.0 / std::sqrt(512.0));
  CHECK(std::abs(corr(z0, w0)) < 4.0 / std::sqrt(512.0));
}

TEST_CASE("theoretical exponent examples") {
  const std::vector<double> one{1.0};
  auto r = theoretical_exponent(2.0, 2.0, one, one, one);
  CHECK(r.regime == "dense");
  CHECK(r.exponent_eps == doctest::Approx(4.0 / 7.0));
  CHECK(target_log_eps_slope(r, DeltaCoupling::zero, 1.0) == doctest::Approx(8.0 / 7.0));

  // p = 1: s_i = (2 nu + alpha) / 2 = 1.5 is the boundary.
  r = theoretical_exponent(1.5, 1.0, one, one, one);
  CHECK(r.xi1);
  CHECK(r.xi2);
  CHECK_FALSE(r.dense1);
  CHECK(r.regime == "sparse");
  r = theoretical_exponent(1.2, 1.0, one, one, one);
  CHECK(r.regime == "sparse");
  CHECK(r.exponent_eps == doctest::Approx(2.0 * 0.7 / (2.0 * 0.7 + 2.0)));
  r = theoretical_exponent(2.0, 1.0, one, one, one);
  CHECK(r.regime == "dense");

  const std::vector<double> nu{1.5, 0.5}, a1{0.4, 1.0}, a2{1.0, 0.3};
  r = theoretical_exponent(2.0, 2.0, nu, a1, a2);
  CHECK(r.l1 == 1);
  CHECK(r.l2 == 1);
  CHECK(r.exponent_delta == doctest::Approx(4.0 / 5.3));
  CHECK(target_log_eps_slope(r, DeltaCoupling::power, 1.0) ==
        doctest::Approx(std::min(2.0 * 4.0 / 6.0, 0.6 * 4.0 / 5.3)));

  CHECK_THROWS_AS(theoretical_exponent(0.4, 2.0, one, one, one), InvalidInput);
  CHECK_THROWS_AS(theoretical_exponent(2.0, 0.5, one, one, one), InvalidInput);
  CHECK_THROWS_AS(theoretical_exponent(2.0, 2.0, one, std::vector<double>{1.2}, one), InvalidInput);
  CHECK_THROWS_AS(theoretical_exponent(2.0, 2.0, one, std::vector<double>{1.0, 1.0}, one), InvalidInput);
}

TEST_CASE("dense and sparse branches meet at the boundary") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double p = 1.0 + 0.99 * u(rng);
    const double nu = 0.1 + 3.0 * u(rng);
    const double a = 0.05 + 0.95 * u(rng);
    const double s = (1.0 / p - 0.5) * (2.0 * nu + a);
    const double s_star = s + 0.5 - 1.0 / p;
    CHECK(std::abs(dense_exponent(s, nu, a) - sparse_exponent(s_star, nu, a)) <= 1e-12);
  }
}

TEST_CASE("rate fit") {
  std::vector<double> eps, risk, logged;
  for (int k = 3; k <= 9; ++k) {
    const double e = std::ldexp(1.0, -k);
    eps.push_back(e);
    risk.push_back(3.0 * std::pow(e, 0.8));
    logged.push_back(std::pow(e, 0.8) * std::abs(std::log(e)));
  }
  const auto fit = fit_rate(eps, risk, 0.8);
  CHECK(fit.slope == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(fit.slope_vs_theory == doctest::Approx(1.0));
  CHECK(fit.r2 == doctest::Approx(1.0));
  // d log|log e| / d log e = 1 / log e < 0, so the log factor flattens the slope.
  CHECK(fit_rate(eps, logged).slope < 0.8);
  CHECK_THROWS_AS(fit_rate(std::vector<double>(eps.begin(), eps.begin() + 3),
                           std::vector<double>(risk.begin(), risk.begin() + 3)),
                  InvalidInput);
  risk[2] = 0.0;
  CHECK_THROWS_AS(fit_rate(eps, risk), InvalidInput);
}

TEST_CASE("least squares") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto f = ols(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_se == doctest::Approx(0.0));
  CHECK_THROWS_AS(ols(std::vector<double>{1, 1}, std::vector<double>{0, 1}), InvalidInput);
}

TEST_CASE("noise-free experiment reports the band tail") {
  Scenario sc = white_scenario(1024, 1);
  sc.signal.type = SignalType::piecewise;
  sc.eps_grid = {0.0};
  const auto rep = run_experiment(sc);
  REQUIRE(rep.points.size() == 1);
  const Problem pb = build_problem(sc);
  const double tail = band_tail_energy(pb.f, 2, max_meyer_level(1024) + 1);
  CHECK(tail > 0.0);
  CHECK(rep.points[0].blind.mean == doctest::Approx(tail).epsilon(1e-6));
  CHECK_FALSE(rep.fit);
}

TEST_CASE("risk falls with the noise level") {
  const auto rep = run_experiment(white_scenario(2048, 20));
  for (std::size_t i = 1; i < rep.points.size(); ++i) {
    const auto& a = rep.points[i - 1].blind;
    const auto& b = rep.points[i].blind;
    CHECK(b.mean < a.mean + 2.0 * (a.se + b.se));
  }
  REQUIRE(rep.fit);
  CHECK(rep.fit->slope > 0.0);
  CHECK(rep.theory);
  CHECK(rep.target_slope == doctest::Approx(8.0 / 7.0));
}

TEST_CASE("standard error shrinks as one over root reps") {
  Scenario sc = white_scenario(1024, 50);
  sc.eps_grid = {0.05};
  const double se50 = run_experiment(sc).points[0].blind.se;
  sc.reps = 200;
  const double se200 = run_experiment(sc).points[0].blind.se;
  CHECK(se50 / se200 > 1.4);
  CHECK(se50 / se200 < 2.8);
}

TEST_CASE("a second channel lowers the risk") {
  Scenario one = white_scenario(2048, 30);
  one.eps_grid = {0.05, 0.02};
  Scenario two = one;
  two.channels.push_back(ChannelSpec{});
  const auto r1 = run_experiment(one);
  const auto r2 = run_experiment(two);
  for (std::size_t i = 0; i < r1.points.size(); ++i) CHECK(r2.points[i].blind.mean < r1.points[i].blind.mean);
}

TEST_CASE("experiments are reproducible") {
  Scenario sc = white_scenario(512, 5);
  sc.oracle = true;
  sc.coupling = DeltaCoupling::power;
  const auto a = run_experiment(sc);
  const auto b = run_experiment(sc);
  CHECK(risk_csv(a) == risk_csv(b));
  CHECK(summary_json(a) == summary_json(b));
  sc.threads = 1;
  CHECK(risk_csv(run_experiment(sc)) == risk_csv(a));
}

TEST_CASE("risk summaries") {
  const std::vector<double> r{1.0, 2.0, 3.0, std::nan("")};
  const auto st = summarize_risks(r, 1);
  CHECK(st.count == 3);
  CHECK(st.failures == 1);
  CHECK(st.mean == doctest::Approx(2.0));
  CHECK(st.se == doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("scenario JSON round trip") {
  const Scenario sc = default_scenario();
  const std::string text = scenario_to_json(sc);
  const Scenario back = parse_scenario(text);
  CHECK(scenario_to_json(back) == text);
  CHECK(back.M() == 2);
  CHECK(back.eps_grid == sc.eps_grid);
  CHECK(back.plugin.proxy == sc.plugin.proxy);
  CHECK(back.coupling == DeltaCoupling::power);
}

TEST_CASE("scenario defaults and grids") {
  const auto sc = parse_scenario(R"({"channels":[{}],"eps_powers":{"from":-2,"to":-4}})");
  CHECK(sc.n == 4096);
  CHECK(sc.eps_grid == std::vector<double>{0.25, 0.125, 0.0625});
  CHECK(sc.delta_for(0.25) == 0.0);
  CHECK(power_grid(2.0, -1, -1) == std::vector<double>{0.5});
  CHECK_THROWS_AS(power_grid(2.0, -5, -1), InvalidInput);
}

TEST_CASE("scenario validation names the bad key") {
  const char* bad[] = {
      R"({"channels":[]})",
      R"({"n":1000,"channels":[{}],"eps_grid":[0.1]})",
      R"({"channels":[{"alpha1":1.5}],"eps_grid":[0.1]})",
      R"({"channels":[{"nu":0}],"eps_grid":[0.1]})",
      R"({"channels":[{}],"eps_grid":[0.1,0.2]})",
      R"({"channels":[{}],"eps_grid":[1.0]})",
      R"({"channels":[{}],"eps_grid":[0.1],"delta":{"coupling":"linear"}})",
      R"({"channels":[{}],"eps_grid":[0.1],"signal":{"type":"square"}})",
      R"({"channels":[{}],"eps_grid":[0.1],"hurst":{"proxy":"mean"}})",
      R"({"channels":[{}],"eps_grid":[0.1],"reps":0})",
      R"({"channels":[{}],)",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_scenario(text), InvalidInput);
  }
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), InvalidInput);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-2.5) == "-2.5");
}

TEST_CASE("constant sweep reruns the scenario per setting") {
  Scenario sc = white_scenario(512, 4);
  const std::vector<double> rho{1.0, 3.0}, A{8.0};
  const auto rows = run_constant_sweep(sc, rho, A);
  REQUIRE(rows.size() == 2);
  sc.estimator.rho1 = sc.estimator.rho2 = 3.0;
  sc.estimator.A = 8.0;
  CHECK(risk_csv(rows[1].report) == risk_csv(run_experiment(sc)));
  CHECK(rows[0].rho2 == 1.0);
  const std::string csv = sweep_csv(rows);
  CHECK(csv.rfind("rho1,rho2,A,eps,delta,risk_mean,risk_se,reps,slope\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * static_cast<long>(sc.eps_grid.size()));
  CHECK_THROWS_AS(run_constant_sweep(sc, std::vector<double>{}, A), InvalidInput);
  CHECK_THROWS_AS(run_constant_sweep(sc, std::vector<double>{-1.0}, A), InvalidInput);
}
