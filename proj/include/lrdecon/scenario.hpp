#pragma once

// Scenario files: JSON documents describing a Monte Carlo experiment.
//
// Keys (all optional except channels; defaults in parentheses):
//   name ("scenario"), n (4096), reps (100), seed (1), oracle (false), threads (0 = auto)
//   channels: [{nu (1), c (1), family ("power_law"), phase (0), alpha1 (1), alpha2 (1)}]
//   signal: {type ("besov" | "smoothblob" | "piecewise"), s (2), p (2), q (2), A (1), m0 (2), seed (7), spread (0)}
//   eps_grid: [..] or eps_powers: {base (2), from (-3), to (-9)}
//   delta: {coupling ("zero" | "power"), gamma (1)}      delta = eps^gamma
//   estimator: {k_trunc, rho1, rho2, A, m0, J, noise_floor_guard}
//   hurst: {bandwidth_exponent (0.65), low_trim (0), proxy ("difference" | "raw" | "replicate")}

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lrdecon/convolution_kernels.hpp"
#include "lrdecon/estimator.hpp"
#include "lrdecon/lrd.hpp"

namespace lrdecon {

enum class SignalType { besov, smoothblob, piecewise };
SignalType parse_signal_type(const std::string& name);
std::string to_string(SignalType type);

struct SignalSpec {
  SignalType type = SignalType::besov;
  double s = 2.0;
  double p = 2.0;
  double q = 2.0;
  double A = 1.0;
  int m0 = 2;
  std::uint64_t seed = 7;
  /// Octaves of random magnitude spread within a level (0 = signs only).
  double spread = 0.0;
};

struct ChannelSpec {
  double nu = 1.0;
  double c = 1.0;
  KernelFamily family = KernelFamily::power_law;
  double phase = 0.0;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
};

enum class DeltaCoupling { zero, power };

struct Scenario {
  std::string name = "scenario";
  std::size_t n = 4096;
  std::vector<ChannelSpec> channels;
  SignalSpec signal;
  /// Strictly decreasing, each in [0, 1).
  std::vector<double> eps_grid;
  DeltaCoupling coupling = DeltaCoupling::zero;
  double gamma = 1.0;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  bool oracle = false;
  std::size_t threads = 0;
  EstimatorConfig estimator;
  PluginOptions plugin;

  std::size_t M() const noexcept { return channels.size(); }
  double delta_for(double eps) const;
  /// Throws InvalidInput naming the offending key.
  void validate() const;
};

/// Geometric grid base^from, base^(from-1), ..., base^to.
std::vector<double> power_grid(double base, int from, int to);

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
/// Canonical JSON form (round-trips through parse_scenario).
std::string scenario_to_json(const Scenario& scenario);

/// Two channels with distinct nu and alphas, Besov s = 2, p = q = 2 signal,
/// n = 4096, eps = 2^-3 .. 2^-9, delta = eps.
Scenario default_scenario();

}  // namespace lrdecon
