#include "lrdecon/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lrdecon/error.hpp"
#include "lrdecon/meyer.hpp"

namespace lrdecon {
namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("scenario: key '") + key + "': " + e.what());
  }
}

void require_object(const json& j, const char* what) {
  if (!j.is_object()) throw InvalidInput(std::string("scenario: '") + what + "' must be an object");
}

}  // namespace

SignalType parse_signal_type(const std::string& name) {
  if (name == "besov") return SignalType::besov;
  if (name == "smoothblob") return SignalType::smoothblob;
  if (name == "piecewise") return SignalType::piecewise;
  throw InvalidInput("unknown signal type '" + name + "'");
}

std::string to_string(SignalType type) {
  switch (type) {
    case SignalType::besov: return "besov";
    case SignalType::smoothblob: return "smoothblob";
    case SignalType::piecewise: return "piecewise";
  }
  return "besov";
}

double Scenario::delta_for(double eps) const {
  if (coupling == DeltaCoupling::zero || eps == 0.0) return 0.0;
  return std::pow(eps, gamma);
}

void Scenario::validate() const {
  if (n < 64 || !is_power_of_two(n)) throw InvalidInput("scenario: n must be a power of two >= 64");
  if (channels.empty()) throw InvalidInput("scenario: channels must be nonempty");
  for (std::size_t l = 0; l < channels.size(); ++l) {
    const auto& ch = channels[l];
    const std::string tag = "scenario: channels[" + std::to_string(l) + "]: ";
    if (!(ch.nu > 0.0) || !std::isfinite(ch.nu)) throw InvalidInput(tag + "nu must be > 0");
    if (!(ch.c > 0.0) || !std::isfinite(ch.c)) throw InvalidInput(tag + "c must be > 0");
    if (!(ch.alpha1 > 0.0 && ch.alpha1 <= 1.0)) throw InvalidInput(tag + "alpha1 must lie in (0, 1]");
    if (!(ch.alpha2 > 0.0 && ch.alpha2 <= 1.0)) throw InvalidInput(tag + "alpha2 must lie in (0, 1]");
    if (!std::isfinite(ch.phase)) throw InvalidInput(tag + "phase must be finite");
  }
  if (eps_grid.empty()) throw InvalidInput("scenario: eps grid must be nonempty");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] >= 0.0 && eps_grid[i] < 1.0)) throw InvalidInput("scenario: eps values must lie in [0, 1)");
    if (i > 0 && !(eps_grid[i] < eps_grid[i - 1])) throw InvalidInput("scenario: eps grid must be strictly decreasing");
  }
  if (coupling == DeltaCoupling::power && !(gamma > 0.0 && std::isfinite(gamma))) {
    throw InvalidInput("scenario: delta.gamma must be > 0");
  }
  if (reps == 0) throw InvalidInput("scenario: reps must be positive");
  if (signal.type == SignalType::besov) {
    if (!(signal.p >= 1.0) || !(signal.q >= 1.0)) throw InvalidInput("scenario: signal p, q must be >= 1");
    if (!(signal.s >= std::max(1.0 / signal.p, 0.5))) {
      throw InvalidInput("scenario: signal s must be >= max(1/p, 1/2)");
    }
    if (!(signal.spread >= 0.0 && signal.spread <= 16.0)) throw InvalidInput("scenario: signal spread must lie in [0, 16]");
    if (!(signal.A > 0.0)) throw InvalidInput("scenario: signal A must be > 0");
    if (signal.m0 < 2 || signal.m0 > max_meyer_level(n)) {
      throw InvalidInput("scenario: signal m0 must lie in [2, " + std::to_string(max_meyer_level(n)) + "]");
    }
  }
  estimator.validate();
  if (!(plugin.hurst.bandwidth_exponent > 0.0 && plugin.hurst.bandwidth_exponent < 1.0)) {
    throw InvalidInput("scenario: hurst.bandwidth_exponent must lie in (0, 1)");
  }
}

std::vector<double> power_grid(double base, int from, int to) {
  if (!(base > 1.0)) throw InvalidInput("power_grid: base must be > 1");
  if (from < to) throw InvalidInput("power_grid: 'from' must be >= 'to' (grid decreases)");
  std::vector<double> grid;
  for (int e = from; e >= to; --e) grid.push_back(std::pow(base, e));
  return grid;
}

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("scenario: malformed JSON: ") + e.what());
  }
  require_object(doc, "scenario");

  Scenario sc;
  sc.name = get_or<std::string>(doc, "name", sc.name);
  sc.n = get_or<std::size_t>(doc, "n", sc.n);
  sc.reps = get_or<std::size_t>(doc, "reps", sc.reps);
  sc.seed = get_or<std::uint64_t>(doc, "seed", sc.seed);
  sc.oracle = get_or<bool>(doc, "oracle", sc.oracle);
  sc.threads = get_or<std::size_t>(doc, "threads", sc.threads);

  if (!doc.contains("channels") || !doc.at("channels").is_array()) {
    throw InvalidInput("scenario: 'channels' must be an array");
  }
  for (const auto& c : doc.at("channels")) {
    require_object(c, "channels[]");
    ChannelSpec ch;
    ch.nu = get_or<double>(c, "nu", ch.nu);
    ch.c = get_or<double>(c, "c", ch.c);
    ch.family = parse_kernel_family(get_or<std::string>(c, "family", to_string(ch.family)));
    ch.phase = get_or<double>(c, "phase", ch.phase);
    ch.alpha1 = get_or<double>(c, "alpha1", ch.alpha1);
    ch.alpha2 = get_or<double>(c, "alpha2", ch.alpha2);
    sc.channels.push_back(ch);
  }

  if (doc.contains("signal")) {
    const auto& s = doc.at("signal");
    require_object(s, "signal");
    sc.signal.type = parse_signal_type(get_or<std::string>(s, "type", to_string(sc.signal.type)));
    sc.signal.s = get_or<double>(s, "s", sc.signal.s);
    sc.signal.p = get_or<double>(s, "p", sc.signal.p);
    sc.signal.q = get_or<double>(s, "q", sc.signal.q);
    sc.signal.A = get_or<double>(s, "A", sc.signal.A);
    sc.signal.m0 = get_or<int>(s, "m0", sc.signal.m0);
    sc.signal.seed = get_or<std::uint64_t>(s, "seed", sc.signal.seed);
    sc.signal.spread = get_or<double>(s, "spread", sc.signal.spread);
  }

  if (doc.contains("eps_grid")) {
    sc.eps_grid = get_or<std::vector<double>>(doc, "eps_grid", {});
  } else if (doc.contains("eps_powers")) {
    const auto& g = doc.at("eps_powers");
    require_object(g, "eps_powers");
    sc.eps_grid = power_grid(get_or<double>(g, "base", 2.0), get_or<int>(g, "from", -3), get_or<int>(g, "to", -9));
  } else {
    sc.eps_grid = power_grid(2.0, -3, -9);
  }

  if (doc.contains("delta")) {
    const auto& d = doc.at("delta");
    require_object(d, "delta");
    const auto coupling = get_or<std::string>(d, "coupling", "zero");
    if (coupling == "zero") {
      sc.coupling = DeltaCoupling::zero;
    } else if (coupling == "power") {
      sc.coupling = DeltaCoupling::power;
    } else {
      throw InvalidInput("scenario: delta.coupling must be 'zero' or 'power'");
    }
    sc.gamma = get_or<double>(d, "gamma", sc.gamma);
  }

  if (doc.contains("estimator")) {
    const auto& e = doc.at("estimator");
    require_object(e, "estimator");
    auto& cfg = sc.estimator;
    cfg.k_trunc = get_or<double>(e, "k_trunc", cfg.k_trunc);
    cfg.rho1 = get_or<double>(e, "rho1", cfg.rho1);
    cfg.rho2 = get_or<double>(e, "rho2", cfg.rho2);
    cfg.A = get_or<double>(e, "A", cfg.A);
    cfg.noise_floor_guard = get_or<double>(e, "noise_floor_guard", cfg.noise_floor_guard);
    if (e.contains("m0") && !e.at("m0").is_null()) cfg.m0_override = get_or<int>(e, "m0", 2);
    if (e.contains("J") && !e.at("J").is_null()) cfg.J_override = get_or<int>(e, "J", 3);
  }

  if (doc.contains("hurst")) {
    const auto& h = doc.at("hurst");
    require_object(h, "hurst");
    sc.plugin.hurst.bandwidth_exponent = get_or<double>(h, "bandwidth_exponent", sc.plugin.hurst.bandwidth_exponent);
    sc.plugin.hurst.low_trim = get_or<std::size_t>(h, "low_trim", sc.plugin.hurst.low_trim);
    if (h.contains("proxy")) sc.plugin.proxy = parse_noise_proxy(get_or<std::string>(h, "proxy", "difference"));
  }

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("scenario: cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

std::string scenario_to_json(const Scenario& sc) {
  json doc;
  doc["name"] = sc.name;
  doc["n"] = sc.n;
  doc["reps"] = sc.reps;
  doc["seed"] = sc.seed;
  doc["oracle"] = sc.oracle;
  doc["threads"] = sc.threads;
  doc["channels"] = json::array();
  for (const auto& ch : sc.channels) {
    doc["channels"].push_back({{"nu", ch.nu}, {"c", ch.c}, {"family", to_string(ch.family)},
                               {"phase", ch.phase}, {"alpha1", ch.alpha1}, {"alpha2", ch.alpha2}});
  }
  doc["signal"] = {{"type", to_string(sc.signal.type)}, {"s", sc.signal.s}, {"p", sc.signal.p},
                   {"q", sc.signal.q}, {"A", sc.signal.A}, {"m0", sc.signal.m0}, {"seed", sc.signal.seed},
                   {"spread", sc.signal.spread}};
  doc["eps_grid"] = sc.eps_grid;
  doc["delta"] = {{"coupling", sc.coupling == DeltaCoupling::zero ? "zero" : "power"}, {"gamma", sc.gamma}};
  const auto& cfg = sc.estimator;
  doc["estimator"] = {{"k_trunc", cfg.k_trunc}, {"rho1", cfg.rho1}, {"rho2", cfg.rho2}, {"A", cfg.A},
                      {"noise_floor_guard", cfg.noise_floor_guard}};
  doc["estimator"]["m0"] = cfg.m0_override ? json(*cfg.m0_override) : json(nullptr);
  doc["estimator"]["J"] = cfg.J_override ? json(*cfg.J_override) : json(nullptr);
  doc["hurst"] = {{"bandwidth_exponent", sc.plugin.hurst.bandwidth_exponent},
                  {"low_trim", sc.plugin.hurst.low_trim},
                  {"proxy", to_string(sc.plugin.proxy)}};
  return doc.dump(2) + "\n";
}

Scenario default_scenario() {
  Scenario sc;
  sc.name = "default";
  sc.n = 4096;
  sc.channels = {ChannelSpec{0.5, 1.0, KernelFamily::power_law, 0.0, 0.9, 0.8},
                 ChannelSpec{1.0, 1.0, KernelFamily::power_law, 0.0, 0.7, 0.9}};
  sc.signal = SignalSpec{};
  sc.signal.A = 64.0;
  sc.signal.spread = 4.0;
  sc.eps_grid = power_grid(2.0, -3, -9);
  sc.coupling = DeltaCoupling::power;
  sc.gamma = 1.0;
  sc.reps = 100;
  sc.seed = 1;
  sc.oracle = true;
  sc.estimator.rho1 = 4.0;
  sc.estimator.A = 8.0;
  sc.plugin.proxy = NoiseProxy::replicate;
  return sc;
}

}  // namespace lrdecon
