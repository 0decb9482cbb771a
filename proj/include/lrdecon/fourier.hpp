#pragma once

// Sampled 1-periodic functions on U = [0, 1) and their Fourier coefficients.
//
// Conventions: e_m(t) = exp(2 pi i m t); the forward transform carries a 1/n
// factor so that coefficients approximate the integral of f(t) conj(e_m(t))
// over U. Frequencies live on the symmetric grid m = -n/2 .. n/2-1; anything
// outside is zero.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace lrdecon {

using cplx = std::complex<double>;

bool is_power_of_two(std::size_t n) noexcept;

/// Real samples at t_i = i/n, n a power of two and at least 2.
class PeriodicSignal {
 public:
  explicit PeriodicSignal(std::vector<double> samples);
  static PeriodicSignal zeros(std::size_t n);

  std::size_t size() const noexcept { return samples_.size(); }
  std::span<const double> samples() const noexcept { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }

  /// (1/n) sum of squared samples, the grid version of the L2(U) norm squared.
  double norm2() const;

 private:
  std::vector<double> samples_;
};

/// Complex coefficients on m = -n/2 .. n/2-1, stored in FFT order
/// (index m mod n).
class FourierSeries {
 public:
  explicit FourierSeries(std::size_t n);
  /// Takes coefficients already in FFT order.
  static FourierSeries from_fft_order(std::vector<cplx> coeffs);

  std::size_t size() const noexcept { return coeffs_.size(); }
  long min_freq() const noexcept { return -static_cast<long>(coeffs_.size() / 2); }
  long max_freq() const noexcept { return static_cast<long>(coeffs_.size() / 2) - 1; }
  bool in_grid(long m) const noexcept { return m >= min_freq() && m <= max_freq(); }

  /// Coefficient at frequency m; zero outside the grid.
  cplx at(long m) const noexcept;
  /// Mutable access; m must be in the grid.
  cplx& operator[](long m);

  std::span<const cplx> fft_order() const noexcept { return coeffs_; }
  std::span<cplx> fft_order() noexcept { return coeffs_; }

  /// Largest |c(-m) - conj(c(m))| over the grid, with the self-paired
  /// frequencies 0 and -n/2 contributing |Im c|.
  double max_asymmetry() const;
  /// Sum of |c(m)|^2.
  double energy() const;

 private:
  std::size_t index(long m) const noexcept;
  std::vector<cplx> coeffs_;
};

FourierSeries forward(const PeriodicSignal& signal);

/// Real signal from a Hermitian series. Throws SymmetryViolation when the
/// asymmetry exceeds 1e-10 relative to the largest coefficient.
PeriodicSignal inverse(const FourierSeries& series);

/// Complex samples sum_m c(m) e_m(t_i), no symmetry requirement.
std::vector<cplx> inverse_complex(const FourierSeries& series);

/// (1/n) sum (a_i - b_i)^2, the grid L2 distance squared.
double grid_distance2(const PeriodicSignal& a, const PeriodicSignal& b);

/// (f * g)(t) = integral of f(s) g(t - s) over U, on the grid.
PeriodicSignal circular_convolve(const PeriodicSignal& f, const PeriodicSignal& g);

namespace detail {
// Unnormalized DFTs of any length FFTW accepts; `in` and `out` may alias.
// sign = -1: sum x_i exp(-2 pi i k i / n); sign = +1: exp(+...).
void dft(std::span<const cplx> in, std::span<cplx> out, int sign);
}  // namespace detail

}  // namespace lrdecon
