#pragma once

// Periodized Meyer wavelets on U, realized in the Fourier domain.
//
// Level layout: slot level m0-1 holds the scaling functions phi_{m0,k},
// k < 2^m0; levels j >= m0 hold wavelets psi_{j,k}, k < 2^j. A rectangle
// m0-1 .. J-1 therefore has exactly 2^J coefficients and spans V_J.
//
// psi_{j,k,m} = <psi_{j,k}, e_m> = 2^{-j/2} psihat(2 pi m / 2^j) exp(-2 pi i m k / 2^j),
// and coefficients are the Plancherel pairing sum_m c(m) conj(psi_{j,k,m}).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "lrdecon/fourier.hpp"

namespace lrdecon {

/// Meyer auxiliary polynomial x^4 (35 - 84x + 70x^2 - 20x^3), clamped to [0, 1] outside [0, 1].
double meyer_aux(double x) noexcept;
/// Fourier transform of the Meyer scaling function (real, even).
double meyer_phi_hat(double omega) noexcept;
/// Fourier transform of the Meyer mother wavelet, exp(i omega/2) times a real window.
cplx meyer_psi_hat(double omega) noexcept;

/// Largest wavelet level whose band fits the grid: 2^{j+2}/3 < n/2.
int max_meyer_level(std::size_t n) noexcept;

/// |m| range of a level's band: lo..hi inclusive (lo = 0 for the scaling slot).
struct BandLimits {
  long lo;
  long hi;
};

class WaveletCoeffs {
 public:
  WaveletCoeffs(std::size_t n, int m0, int J);

  std::size_t n() const noexcept { return n_; }
  int m0() const noexcept { return m0_; }
  int J() const noexcept { return J_; }
  int first_level() const noexcept { return m0_ - 1; }
  bool has_level(int j) const noexcept { return j >= m0_ - 1 && j < J_; }
  /// 2^m0 for the scaling slot, 2^j otherwise.
  std::size_t slots(int j) const;
  std::size_t total_slots() const noexcept;

  cplx at(int j, std::size_t k) const;
  cplx& at(int j, std::size_t k);
  std::span<const cplx> level(int j) const;
  std::span<cplx> level(int j);

 private:
  std::size_t n_;
  int m0_;
  int J_;
  std::vector<std::vector<cplx>> levels_;
};

class MeyerBasis {
 public:
  /// Tables for levels m0-1 .. max_meyer_level(n). Requires m0 >= 2 and the
  /// scaling band to fit (LevelOverflow otherwise).
  MeyerBasis(std::size_t n, int m0);

  std::size_t n() const noexcept { return n_; }
  int m0() const noexcept { return m0_; }
  int max_level() const noexcept { return max_level_; }
  /// Largest J accepted by analyze.
  int max_J() const noexcept { return max_level_ + 1; }

  BandLimits band_limits(int j) const;
  /// W_j as a sorted list of integer frequencies.
  std::vector<long> support_set(int j) const;
  cplx psi_hat(int j, long k, long m) const;

  WaveletCoeffs analyze(const FourierSeries& series, int J) const;
  FourierSeries synthesize_series(const WaveletCoeffs& coeffs) const;
  PeriodicSignal synthesize(const WaveletCoeffs& coeffs) const;

 private:
  struct Segment {
    long first_m;  // contiguous run first_m, first_m+1, ...
    std::vector<cplx> values;  // psi_{j,0,m}
  };
  struct LevelTable {
    std::size_t slots;
    std::vector<Segment> segments;
  };

  void check_level(int j) const;
  const LevelTable& table(int j) const { return tables_[static_cast<std::size_t>(j - (m0_ - 1))]; }

  std::size_t n_;
  int m0_;
  int max_level_;
  std::vector<LevelTable> tables_;
};

// Free-function forms.
std::vector<long> support_set(std::size_t n, int m0, int j);
WaveletCoeffs analyze(const FourierSeries& series, int m0, int J);
PeriodicSignal synthesize(const WaveletCoeffs& coeffs);

}  // namespace lrdecon
