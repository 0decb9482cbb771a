#include "lrdecon/convolution_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrdecon/error.hpp"

namespace lrdecon {

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "power_law" || name == "power-law") return KernelFamily::power_law;
  if (name == "smoothed_power_law" || name == "smoothed-power-law") return KernelFamily::smoothed_power_law;
  throw InvalidInput("unknown kernel family '" + name + "'");
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::power_law:
      return "power_law";
    case KernelFamily::smoothed_power_law:
      return "smoothed_power_law";
  }
  return "unknown";
}

cplx KernelSpec::coeff(long m) const {
  const double am = std::abs(static_cast<double>(m));
  double mag = 0.0;
  switch (family) {
    case KernelFamily::power_law:
      mag = c * std::pow(1.0 + am, -nu);
      break;
    case KernelFamily::smoothed_power_law:
      mag = c * std::pow(1.0 + am * am, -nu / 2.0);
      break;
  }
  const long nyquist = -static_cast<long>(n / 2);
  if (phase == 0.0 || m == 0 || m == nyquist) return {mag, 0.0};
  return std::polar(mag, m > 0 ? phase : -phase);
}

bool KernelSpec::satisfies_decay_window() const {
  const long half = static_cast<long>(n / 2);
  for (long m = 1; m <= half; ++m) {
    const double scaled = std::norm(coeff(m)) * std::pow(static_cast<double>(m), 2.0 * nu);
    if (!(scaled > c1 && scaled < c2)) return false;
  }
  return true;
}

KernelSpec make_kernel(double nu, double c, std::size_t n, KernelFamily family, double phase) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidInput("make_kernel: nu must be > 0");
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("make_kernel: c must be > 0");
  if (n < 2 || !is_power_of_two(n)) throw InvalidInput("make_kernel: n must be a power of two");
  KernelSpec spec{nu, c, family, phase, n, 0.0, 0.0};
  double lo = INFINITY, hi = 0.0;
  const long half = static_cast<long>(n / 2);
  for (long m = 1; m <= half; ++m) {
    const double scaled = std::norm(spec.coeff(m)) * std::pow(static_cast<double>(m), 2.0 * nu);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  // Strict inequalities in the window.
  spec.c1 = lo * (1.0 - 1e-9);
  spec.c2 = hi * (1.0 + 1e-9);
  return spec;
}

FourierSeries kernel_series(const KernelSpec& spec) {
  FourierSeries s(spec.n);
  for (long m = s.min_freq(); m <= s.max_freq(); ++m) s[m] = spec.coeff(m);
  return s;
}

PeriodicSignal kernel_signal(const KernelSpec& spec) { return inverse(kernel_series(spec)); }

KernelSet::KernelSet(std::vector<KernelSpec> specs) : specs_(std::move(specs)) {
  if (specs_.empty()) throw InvalidInput("KernelSet: at least one kernel required");
  for (const auto& s : specs_) {
    if (s.n != specs_.front().n) throw InvalidInput("KernelSet: kernels on different grids");
  }
}

double KernelSet::nu_min() const {
  if (specs_.empty()) throw InvalidInput("KernelSet: empty");
  return std::min_element(specs_.begin(), specs_.end(),
                          [](const auto& a, const auto& b) { return a.nu < b.nu; })
      ->nu;
}

double KernelSet::nu_max() const {
  if (specs_.empty()) throw InvalidInput("KernelSet: empty");
  return std::max_element(specs_.begin(), specs_.end(),
                          [](const auto& a, const auto& b) { return a.nu < b.nu; })
      ->nu;
}

std::vector<std::size_t> KernelSet::order_by_nu() const {
  std::vector<std::size_t> idx(specs_.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [this](std::size_t a, std::size_t b) { return specs_[a].nu < specs_[b].nu; });
  return idx;
}

}  // namespace lrdecon
