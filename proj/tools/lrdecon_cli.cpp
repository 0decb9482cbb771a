// lrdecon: simulation and estimation command line.
//
// Exit codes: 0 success, 2 invalid configuration, 3 estimation failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrdecon/error.hpp"
#include "lrdecon/estimator.hpp"
#include "lrdecon/experiment.hpp"
#include "lrdecon/fgn.hpp"
#include "lrdecon/lrd.hpp"
#include "lrdecon/report.hpp"
#include "lrdecon/scenario.hpp"
#include "lrdecon/simd/kernels.hpp"

namespace fs = std::filesystem;
using namespace lrdecon;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitFailure = 3;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return columns[i];
    }
    throw InvalidInput("CSV has no column '" + name + "'");
  }
  bool has(const std::string& name) const {
    for (const auto& h : header) {
      if (h == name) return true;
    }
    return false;
  }
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("'" + path + "' is empty");
  t.header = split(line, ',');
  t.columns.resize(t.header.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.header.size()) {
      throw InvalidInput(path + ":" + std::to_string(row) + ": expected " + std::to_string(t.header.size()) + " cells");
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      try {
        t.columns[c].push_back(std::stod(cells[c]));
      } catch (const std::exception&) {
        throw InvalidInput(path + ":" + std::to_string(row) + ": bad number '" + cells[c] + "'");
      }
    }
  }
  return t;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create directory '" + dir + "'");
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

Scenario scenario_with_overrides(const std::string& path, const CLI::Option* seed_opt, std::uint64_t seed,
                                 const CLI::Option* reps_opt, std::size_t reps) {
  Scenario sc = path.empty() ? default_scenario() : load_scenario(path);
  if (seed_opt && seed_opt->count()) sc.seed = seed;
  if (reps_opt && reps_opt->count()) sc.reps = reps;
  sc.validate();
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multichannel blind deconvolution under fractional Gaussian noise"};
  app.require_subcommand(1);

  std::string scenario_path, out, data_path;
  std::uint64_t seed = 1;
  std::size_t reps = 100;
  double eps = -1.0, delta = -1.0;

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate observations for one noise level");
  sim->add_option("scenario", scenario_path, "Scenario JSON (default scenario when omitted)");
  auto* sim_seed = sim->add_option("--seed", seed, "Replication seed");
  sim->add_option("--eps", eps, "Noise level (default: first grid point)");
  int records = 1;
  sim->add_option("--records", records, "Independent n-sample records to concatenate (2 for the plug-in)")
      ->check(CLI::Range(1, 2));
  sim->add_option("--out", out, "Output directory")->required();

  // estimate
  auto* est = app.add_subcommand("estimate", "Run the estimator on stored observations");
  est->add_option("--data", data_path, "CSV with columns y0,g0,y1,g1,...")->required();
  est->add_option("--scenario", scenario_path, "Scenario JSON supplying alphas and estimator settings");
  est->add_option("--eps", eps, "Signal-channel noise level")->required();
  est->add_option("--delta", delta, "Kernel-channel noise level")->required();
  bool plugin = false;
  est->add_flag("--plugin", plugin, "Estimate alphas on the first half, estimate f on the second");
  est->add_option("--out", out, "Output directory")->required();

  // rates
  auto* rates = app.add_subcommand("rates", "Monte Carlo rate experiment");
  rates->add_option("scenario", scenario_path, "Scenario JSON (default scenario when omitted)");
  auto* rates_seed = rates->add_option("--seed", seed, "Base seed");
  auto* rates_reps = rates->add_option("--reps", reps, "Replications per grid point");
  bool svg = false;
  rates->add_flag("--svg", svg, "Also write rates.svg");
  rates->add_option("--out", out, "Output directory")->required();

  // sweep
  auto* swp = app.add_subcommand("sweep", "Estimator-constant sensitivity sweep");
  swp->add_option("scenario", scenario_path, "Scenario JSON (default scenario when omitted)");
  auto* swp_seed = swp->add_option("--seed", seed, "Base seed");
  auto* swp_reps = swp->add_option("--reps", reps, "Replications per grid point");
  std::vector<double> rho_list{1.0, 2.0, 4.0}, A_list{1.0, 8.0};
  swp->add_option("--rho", rho_list, "Threshold constants rho1 = rho2")->delimiter(',');
  swp->add_option("--A", A_list, "Level-selection constants A")->delimiter(',');
  swp->add_option("--out", out, "Output directory")->required();

  // exponent
  auto* expo = app.add_subcommand("exponent", "Theoretical rate exponents");
  double s = 2.0, p = 2.0, gamma = 1.0;
  std::vector<double> nu{1.0}, a1{1.0}, a2{1.0};
  std::string coupling = "zero";
  expo->add_option("--s", s, "Smoothness");
  expo->add_option("--p", p, "Besov p (use inf for infinity)");
  expo->add_option("--nu", nu, "Kernel decay per channel")->delimiter(',');
  expo->add_option("--alpha1", a1, "Signal-noise alpha per channel")->delimiter(',');
  expo->add_option("--alpha2", a2, "Kernel-noise alpha per channel")->delimiter(',');
  expo->add_option("--coupling", coupling, "zero or power")->check(CLI::IsMember({"zero", "power"}));
  expo->add_option("--gamma", gamma, "delta = eps^gamma");
  expo->add_option("--out", out, "Output file (stdout when omitted)");

  // fgn-check
  auto* fgn = app.add_subcommand("fgn-check", "Fourier-domain noise diagnostics");
  double hurst = 0.75;
  std::size_t n = 1024, max_freq = 32;
  fgn->add_option("--hurst", hurst, "Hurst parameter in [0.5, 1)");
  fgn->add_option("--n", n, "Path length (power of two)");
  auto* fgn_reps = fgn->add_option("--reps", reps, "Replications");
  fgn->add_option("--seed", seed, "Base seed");
  fgn->add_option("--max-freq", max_freq, "Largest frequency examined");
  fgn->add_option("--out", out, "Output file (stdout when omitted)");

  // hurst
  auto* hst = app.add_subcommand("hurst", "Long-memory parameter estimation");
  std::string column = "x";
  double simulate_h = -1.0, bw_exp = 0.65;
  std::size_t low_trim = 0, seeds = 50;
  bool differenced = false;
  hst->add_option("--input", data_path, "CSV file holding the series");
  hst->add_option("--column", column, "Column name in the CSV");
  hst->add_option("--simulate", simulate_h, "Estimate on a simulated fGn path with this H");
  hst->add_option("--n", n, "Simulated path length");
  hst->add_option("--seed", seed, "Seed (simulation / plug-in base seed)");
  hst->add_option("--bandwidth-exponent", bw_exp, "Regression bandwidth exponent");
  hst->add_option("--low-trim", low_trim, "Lowest frequencies skipped");
  hst->add_flag("--differenced", differenced, "Regress on the first difference");
  hst->add_option("--scenario", scenario_path, "Run the plug-in comparison on this scenario");
  hst->add_option("--eps", eps, "Plug-in comparison noise level (default: first grid point)");
  hst->add_option("--seeds", seeds, "Plug-in comparison replications");
  hst->add_option("--out", out, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*sim) {
      const Scenario sc = scenario_with_overrides(scenario_path, sim_seed, seed, nullptr, 0);
      const double e = eps >= 0.0 ? eps : sc.eps_grid.front();
      const double d = sc.delta_for(e);
      const Problem pb = build_problem(sc);
      std::vector<RawChannel> raw = simulate_raw(pb, e, d, sc.seed);
      if (records == 2) {
        const auto second = simulate_raw(pb, e, d, mix_seed(sc.seed));
        for (std::size_t l = 0; l < raw.size(); ++l) {
          raw[l].y.insert(raw[l].y.end(), second[l].y.begin(), second[l].y.end());
          raw[l].g.insert(raw[l].g.end(), second[l].g.begin(), second[l].g.end());
        }
      }
      std::vector<std::string> header{"t"};
      std::vector<std::vector<double>> cols(1);
      const std::size_t rows = raw.front().y.size();
      for (std::size_t i = 0; i < rows; ++i) {
        cols[0].push_back(static_cast<double>(i % sc.n) / static_cast<double>(sc.n));
      }
      for (std::size_t l = 0; l < raw.size(); ++l) {
        header.push_back("y" + std::to_string(l));
        cols.push_back(raw[l].y);
        header.push_back("g" + std::to_string(l));
        cols.push_back(raw[l].g);
      }
      ensure_dir(out);
      write_text_file(out + "/observations.csv", samples_csv(header, cols));
      write_text_file(out + "/truth.csv",
                      samples_csv({"t", "f"}, {std::vector<double>(cols[0].begin(), cols[0].begin() + static_cast<std::ptrdiff_t>(sc.n)),
                                               std::vector<double>(pb.f.samples().begin(), pb.f.samples().end())}));
      std::printf("eps=%s delta=%s channels=%zu rows=%zu\n", format_double(e).c_str(), format_double(d).c_str(),
                  raw.size(), rows);
      return 0;
    }

    if (*est) {
      const Scenario sc = scenario_path.empty() ? default_scenario() : load_scenario(scenario_path);
      const Table t = read_csv(data_path);
      std::vector<RawChannel> raw;
      for (std::size_t l = 0; t.has("y" + std::to_string(l)); ++l) {
        raw.push_back({t.column("y" + std::to_string(l)), t.column("g" + std::to_string(l))});
      }
      if (raw.size() != sc.M()) {
        throw InvalidInput("data has " + std::to_string(raw.size()) + " channels, scenario has " + std::to_string(sc.M()));
      }
      std::vector<double> alpha1, alpha2;
      for (const auto& ch : sc.channels) {
        alpha1.push_back(ch.alpha1);
        alpha2.push_back(ch.alpha2);
      }
      ensure_dir(out);
      Estimate result = [&] {
        if (plugin) {
          const PluginResult res = plugin_workflow(split_sample(raw), eps, delta, sc.estimator, sc.plugin);
          std::string a = "alpha1_hat,alpha2_hat\n";
          for (std::size_t l = 0; l < raw.size(); ++l) {
            a += format_double(res.alpha1_hat[l]) + "," + format_double(res.alpha2_hat[l]) + "\n";
          }
          write_text_file(out + "/alpha_hat.csv", a);
          return res.estimate;
        }
        return estimate(channels_from_samples(raw, alpha1, alpha2, eps, delta), sc.estimator);
      }();
      const std::size_t nn = result.signal.size();
      std::vector<double> tt(nn);
      for (std::size_t i = 0; i < nn; ++i) tt[i] = static_cast<double>(i) / static_cast<double>(nn);
      write_text_file(out + "/fhat.csv",
                      samples_csv({"t", "fhat"}, {tt, std::vector<double>(result.signal.samples().begin(),
                                                                          result.signal.samples().end())}));
      write_text_file(out + "/trace.json", trace_json(result.trace));
      std::printf("m0=%d J=%d kept=%zu killed=%zu\n", result.trace.m0, result.trace.J, result.trace.kept_total,
                  result.trace.killed_total);
      return 0;
    }

    if (*rates) {
      const Scenario sc = scenario_with_overrides(scenario_path, rates_seed, seed, rates_reps, reps);
      const RiskReport rep = run_experiment(sc);
      ensure_dir(out);
      write_text_file(out + "/rates.csv", risk_csv(rep));
      const std::string summary = summary_json(rep);
      write_text_file(out + "/summary.json", summary);
      if (svg) write_text_file(out + "/rates.svg", loglog_svg(rep));
      std::cout << summary;
      std::fprintf(stderr, "wall-clock %.3f s, simd %s\n", rep.wall_seconds,
                   std::string(simd::isa_name(simd::active().isa)).c_str());
      return 0;
    }

    if (*swp) {
      const Scenario sc = scenario_with_overrides(scenario_path, swp_seed, seed, swp_reps, reps);
      const auto rows = run_constant_sweep(sc, rho_list, A_list);
      ensure_dir(out);
      write_text_file(out + "/sweep.csv", sweep_csv(rows));
      for (const auto& row : rows) {
        std::printf("rho=%s A=%s slope=%s\n", format_double(row.rho1).c_str(), format_double(row.A).c_str(),
                    row.report.fit ? format_double(row.report.fit->slope).c_str() : "n/a");
      }
      return 0;
    }

    if (*expo) {
      const ExponentResult r = theoretical_exponent(s, p, nu, a1, a2);
      std::string text = exponent_json(r);
      const double target = target_log_eps_slope(r, coupling == "power" ? DeltaCoupling::power : DeltaCoupling::zero, gamma);
      text.insert(text.size() - 2, ",\n  \"target_log_eps_slope\": " + format_double(target));
      emit(out, text);
      return 0;
    }

    if (*fgn) {
      if (!fgn_reps->count()) reps = 1000;
      FgnParams params{hurst, n, seed};
      emit(out, fgn_report_json(noise_fourier_diagnostic(params, reps, max_freq)));
      return 0;
    }

    if (*hst) {
      if (!scenario_path.empty()) {
        const Scenario sc = load_scenario(scenario_path);
        const double e = eps >= 0.0 ? eps : sc.eps_grid.front();
        emit(out, plugin_json(run_plugin_comparison(sc, e, seeds, seed)));
        return 0;
      }
      std::vector<double> series;
      if (simulate_h >= 0.0) {
        series = sample_fgn(FgnParams{simulate_h, n, seed});
      } else if (!data_path.empty()) {
        series = read_csv(data_path).column(column);
      } else {
        throw InvalidInput("hurst: give --input, --simulate or --scenario");
      }
      HurstOptions opts{bw_exp, low_trim};
      emit(out, hurst_json(differenced ? estimate_hurst_differenced(series, opts) : estimate_hurst(series, opts)));
      return 0;
    }
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "estimation failure: %s\n", e.what());
    return kExitFailure;
  }
  return 0;
}
