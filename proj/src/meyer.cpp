#include "lrdecon/meyer.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lrdecon/error.hpp"
#include "lrdecon/simd/kernels.hpp"

namespace lrdecon {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Windows as functions of xi = omega / (2 pi), so that xi = m / 2^j is exact.
double phi_window(double xi) noexcept {
  const double a = std::abs(xi);
  if (a <= 1.0 / 3.0) return 1.0;
  if (a < 2.0 / 3.0) return std::cos(kHalfPi * meyer_aux(3.0 * a - 1.0));
  return 0.0;
}

double psi_window(double xi) noexcept {
  const double a = std::abs(xi);
  if (a <= 1.0 / 3.0 || a >= 4.0 / 3.0) return 0.0;
  if (a < 2.0 / 3.0) return std::sin(kHalfPi * meyer_aux(3.0 * a - 1.0));
  return std::cos(kHalfPi * meyer_aux(1.5 * a - 1.0));
}

cplx psi_ratio(double xi) noexcept {
  const double w = psi_window(xi);
  if (w == 0.0) return {0.0, 0.0};
  return std::polar(w, std::numbers::pi * xi);
}

double pow2(int e) noexcept { return std::ldexp(1.0, e); }

long floor_third(int e) noexcept { return (1L << e) / 3; }

}  // namespace

double meyer_aux(double x) noexcept {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double x2 = x * x;
  return x2 * x2 * (35.0 - 84.0 * x + 70.0 * x2 - 20.0 * x2 * x);
}

double meyer_phi_hat(double omega) noexcept { return phi_window(omega / (2.0 * std::numbers::pi)); }

cplx meyer_psi_hat(double omega) noexcept { return psi_ratio(omega / (2.0 * std::numbers::pi)); }

int max_meyer_level(std::size_t n) noexcept {
  // 2^{j+2}/3 < n/2  <=>  2^{j+3} < 3n
  int j = -1;
  while ((std::size_t{1} << (j + 4)) < 3 * n) ++j;
  return j;
}

// ---------------------------------------------------------------------------

WaveletCoeffs::WaveletCoeffs(std::size_t n, int m0, int J) : n_(n), m0_(m0), J_(J) {
  if (m0 < 2) throw InvalidInput("WaveletCoeffs: m0 must be >= 2");
  if (J < m0) throw InvalidInput("WaveletCoeffs: J must be >= m0");
  for (int j = m0 - 1; j < J; ++j) levels_.emplace_back(slots(j));
}

std::size_t WaveletCoeffs::slots(int j) const {
  if (!has_level(j)) throw InvalidInput("WaveletCoeffs: level " + std::to_string(j) + " out of range");
  return std::size_t{1} << (j == m0_ - 1 ? m0_ : j);
}

std::size_t WaveletCoeffs::total_slots() const noexcept {
  std::size_t t = 0;
  for (const auto& l : levels_) t += l.size();
  return t;
}

std::span<const cplx> WaveletCoeffs::level(int j) const {
  if (!has_level(j)) throw InvalidInput("WaveletCoeffs: level " + std::to_string(j) + " out of range");
  return levels_[static_cast<std::size_t>(j - (m0_ - 1))];
}

std::span<cplx> WaveletCoeffs::level(int j) {
  if (!has_level(j)) throw InvalidInput("WaveletCoeffs: level " + std::to_string(j) + " out of range");
  return levels_[static_cast<std::size_t>(j - (m0_ - 1))];
}

cplx WaveletCoeffs::at(int j, std::size_t k) const {
  auto l = level(j);
  if (k >= l.size()) throw InvalidInput("WaveletCoeffs: position out of range");
  return l[k];
}

cplx& WaveletCoeffs::at(int j, std::size_t k) {
  auto l = level(j);
  if (k >= l.size()) throw InvalidInput("WaveletCoeffs: position out of range");
  return l[k];
}

// ---------------------------------------------------------------------------

MeyerBasis::MeyerBasis(std::size_t n, int m0) : n_(n), m0_(m0), max_level_(max_meyer_level(n)) {
  if (n < 2 || !is_power_of_two(n)) throw InvalidInput("MeyerBasis: n must be a power of two");
  if (m0 < 2) throw InvalidInput("MeyerBasis: m0 must be >= 2");
  if (m0 > max_level_) {
    throw LevelOverflow("MeyerBasis: scaling band of level " + std::to_string(m0) +
                            " exceeds the grid of size " + std::to_string(n) +
                            " (max usable J is " + std::to_string(max_level_ + 1) + ")",
                        max_level_ + 1);
  }
  const long nl = static_cast<long>(n);
  for (int j = m0 - 1; j <= max_level_; ++j) {
    const bool scaling = j == m0 - 1;
    const int s = scaling ? m0 : j;
    const double norm = std::sqrt(pow2(-s));
    const double period = pow2(s);
    const BandLimits b = scaling ? BandLimits{0, floor_third(s + 2)}
                                 : BandLimits{floor_third(j) + 1, floor_third(j + 2)};
    auto value = [&](long m) {
      const double xi = static_cast<double>(m) / period;
      return scaling ? cplx(norm * phi_window(xi), 0.0) : norm * psi_ratio(xi);
    };
    LevelTable t;
    t.slots = std::size_t{1} << s;
    Segment pos{b.lo, {}};
    for (long m = b.lo; m <= b.hi; ++m) pos.values.push_back(value(m));
    Segment neg{-b.hi, {}};
    for (long m = -b.hi; m <= -std::max(b.lo, 1L); ++m) neg.values.push_back(value(m));
    if (b.hi >= nl / 2) throw LevelOverflow("MeyerBasis: internal band overflow", max_level_ + 1);
    t.segments.push_back(std::move(pos));
    t.segments.push_back(std::move(neg));
    tables_.push_back(std::move(t));
  }
}

void MeyerBasis::check_level(int j) const {
  if (j < m0_ - 1) {
    throw InvalidInput("MeyerBasis: level " + std::to_string(j) + " below m0-1 = " +
                       std::to_string(m0_ - 1));
  }
  if (j > max_level_) {
    throw LevelOverflow("MeyerBasis: level " + std::to_string(j) + " band exceeds the grid of size " +
                            std::to_string(n_) + "; max usable J is " + std::to_string(max_level_ + 1),
                        max_level_ + 1);
  }
}

BandLimits MeyerBasis::band_limits(int j) const {
  check_level(j);
  if (j == m0_ - 1) return {0, floor_third(m0_ + 2)};
  return {floor_third(j) + 1, floor_third(j + 2)};
}

std::vector<long> MeyerBasis::support_set(int j) const {
  const BandLimits b = band_limits(j);
  std::vector<long> out;
  for (long m = -b.hi; m <= -std::max(b.lo, 1L); ++m) out.push_back(m);
  for (long m = b.lo; m <= b.hi; ++m) out.push_back(m);
  return out;
}

cplx MeyerBasis::psi_hat(int j, long k, long m) const {
  check_level(j);
  const bool scaling = j == m0_ - 1;
  const int s = scaling ? m0_ : j;
  const long period = 1L << s;
  if (k < 0 || k >= period) throw InvalidInput("psi_hat: position " + std::to_string(k) + " out of range");
  const long half = static_cast<long>(n_ / 2);
  if (m < -half || m >= half) throw InvalidInput("psi_hat: frequency " + std::to_string(m) + " off grid");
  const double xi = static_cast<double>(m) / static_cast<double>(period);
  const double norm = std::sqrt(pow2(-s));
  const cplx mother = scaling ? cplx(phi_window(xi), 0.0) : psi_ratio(xi);
  if (mother == cplx(0.0, 0.0)) return mother;
  // exp(-2 pi i m k / 2^s), phase reduced mod 2^s before scaling
  const long r = ((m * k) % period + period) % period;
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(period);
  return norm * mother * std::polar(1.0, angle);
}

WaveletCoeffs MeyerBasis::analyze(const FourierSeries& series, int J) const {
  if (series.size() != n_) throw InvalidInput("analyze: series size does not match basis");
  if (J < m0_) throw InvalidInput("analyze: J must be >= m0");
  if (J - 1 > max_level_) check_level(J - 1);
  WaveletCoeffs out(n_, m0_, J);
  const auto coeffs = series.fft_order();
  const long nl = static_cast<long>(n_);
  std::vector<cplx> prod;
  for (int j = m0_ - 1; j < J; ++j) {
    const LevelTable& t = table(j);
    const long period = static_cast<long>(t.slots);
    std::vector<cplx> folded(t.slots);
    for (const Segment& seg : t.segments) {
      const std::size_t len = seg.values.size();
      if (len == 0) continue;
      const std::size_t start = static_cast<std::size_t>(((seg.first_m % nl) + nl) % nl);
      prod.resize(len);
      simd::active().complex_multiply_conj(coeffs.data() + start, seg.values.data(), prod.data(), len);
      for (std::size_t i = 0; i < len; ++i) {
        const long m = seg.first_m + static_cast<long>(i);
        folded[static_cast<std::size_t>(((m % period) + period) % period)] += prod[i];
      }
    }
    auto dst = out.level(j);
    detail::dft(folded, dst, +1);
  }
  return out;
}

FourierSeries MeyerBasis::synthesize_series(const WaveletCoeffs& coeffs) const {
  if (coeffs.n() != n_ || coeffs.m0() != m0_) {
    throw InvalidInput("synthesize: coefficient rectangle does not match the basis");
  }
  if (coeffs.J() - 1 > max_level_) check_level(coeffs.J() - 1);
  FourierSeries out(n_);
  auto dst = out.fft_order();
  const long nl = static_cast<long>(n_);
  std::vector<cplx> spectrum, gathered, prod;
  for (int j = m0_ - 1; j < coeffs.J(); ++j) {
    const LevelTable& t = table(j);
    const auto beta = coeffs.level(j);
    if (beta.size() != t.slots) throw InvalidInput("synthesize: malformed coefficient rectangle");
    const long period = static_cast<long>(t.slots);
    spectrum.resize(t.slots);
    detail::dft(beta, spectrum, -1);
    for (const Segment& seg : t.segments) {
      const std::size_t len = seg.values.size();
      if (len == 0) continue;
      gathered.resize(len);
      prod.resize(len);
      for (std::size_t i = 0; i < len; ++i) {
        const long m = seg.first_m + static_cast<long>(i);
        gathered[i] = spectrum[static_cast<std::size_t>(((m % period) + period) % period)];
      }
      simd::active().complex_multiply(seg.values.data(), gathered.data(), prod.data(), len);
      const std::size_t start = static_cast<std::size_t>(((seg.first_m % nl) + nl) % nl);
      for (std::size_t i = 0; i < len; ++i) dst[start + i] += prod[i];
    }
  }
  return out;
}

PeriodicSignal MeyerBasis::synthesize(const WaveletCoeffs& coeffs) const {
  return inverse(synthesize_series(coeffs));
}

std::vector<long> support_set(std::size_t n, int m0, int j) { return MeyerBasis(n, m0).support_set(j); }

WaveletCoeffs analyze(const FourierSeries& series, int m0, int J) {
  return MeyerBasis(series.size(), m0).analyze(series, J);
}

PeriodicSignal synthesize(const WaveletCoeffs& coeffs) {
  return MeyerBasis(coeffs.n(), coeffs.m0()).synthesize(coeffs);
}

}  // namespace lrdecon
