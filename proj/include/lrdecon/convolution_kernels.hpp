#pragma once

// Regular-smooth convolution kernels: |g(m)|^2 decays like |m|^{-2 nu}.

#include <cstddef>
#include <string>
#include <vector>

#include "lrdecon/fourier.hpp"

namespace lrdecon {

enum class KernelFamily {
  power_law,           // c (1 + |m|)^{-nu}
  smoothed_power_law,  // c (1 + m^2)^{-nu/2}
};

KernelFamily parse_kernel_family(const std::string& name);
std::string to_string(KernelFamily family);

struct KernelSpec {
  double nu = 1.0;
  double c = 1.0;
  KernelFamily family = KernelFamily::power_law;
  /// Optional phase twist exp(i theta sign(m)); the Nyquist bin stays real.
  double phase = 0.0;
  std::size_t n = 0;
  /// Decay window c1 |m|^{-2nu} < |g(m)|^2 < c2 |m|^{-2nu} over 1 <= |m| <= n/2.
  double c1 = 0.0;
  double c2 = 0.0;

  cplx coeff(long m) const;
  /// True when the stored window holds at every grid frequency.
  bool satisfies_decay_window() const;
};

KernelSpec make_kernel(double nu, double c, std::size_t n,
                       KernelFamily family = KernelFamily::power_law, double phase = 0.0);

FourierSeries kernel_series(const KernelSpec& spec);
PeriodicSignal kernel_signal(const KernelSpec& spec);

/// Kernels of a multichannel problem, possibly with different nu.
class KernelSet {
 public:
  KernelSet() = default;
  explicit KernelSet(std::vector<KernelSpec> specs);

  std::size_t size() const noexcept { return specs_.size(); }
  const KernelSpec& operator[](std::size_t l) const { return specs_[l]; }
  const std::vector<KernelSpec>& specs() const noexcept { return specs_; }

  double nu_min() const;
  double nu_max() const;
  /// Channel indices sorted by increasing nu (stable).
  std::vector<std::size_t> order_by_nu() const;

 private:
  std::vector<KernelSpec> specs_;
};

}  // namespace lrdecon
