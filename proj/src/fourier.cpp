#include "lrdecon/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "lrdecon/error.hpp"
#include "lrdecon/simd/kernels.hpp"

namespace lrdecon {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

PeriodicSignal::PeriodicSignal(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 2 || !is_power_of_two(samples_.size())) {
    throw InvalidInput("PeriodicSignal: length " + std::to_string(samples_.size()) +
                       " is not a power of two >= 2");
  }
  for (double v : samples_) {
    if (!std::isfinite(v)) throw InvalidInput("PeriodicSignal: non-finite sample");
  }
}

PeriodicSignal PeriodicSignal::zeros(std::size_t n) {
  return PeriodicSignal(std::vector<double>(n, 0.0));
}

double PeriodicSignal::norm2() const {
  double s = 0.0;
  for (double v : samples_) s += v * v;
  return s / static_cast<double>(samples_.size());
}

FourierSeries::FourierSeries(std::size_t n) : coeffs_(n) {
  if (n < 2 || !is_power_of_two(n)) {
    throw InvalidInput("FourierSeries: size " + std::to_string(n) + " is not a power of two >= 2");
  }
}

FourierSeries FourierSeries::from_fft_order(std::vector<cplx> coeffs) {
  FourierSeries s(coeffs.size());
  s.coeffs_ = std::move(coeffs);
  return s;
}

std::size_t FourierSeries::index(long m) const noexcept {
  const long n = static_cast<long>(coeffs_.size());
  return static_cast<std::size_t>(((m % n) + n) % n);
}

cplx FourierSeries::at(long m) const noexcept {
  if (!in_grid(m)) return {0.0, 0.0};
  return coeffs_[index(m)];
}

cplx& FourierSeries::operator[](long m) {
  if (!in_grid(m)) throw InvalidInput("FourierSeries: frequency " + std::to_string(m) + " off grid");
  return coeffs_[index(m)];
}

double FourierSeries::max_asymmetry() const {
  double worst = std::max(std::abs(at(0).imag()), std::abs(at(min_freq()).imag()));
  for (long m = 1; m <= max_freq(); ++m) {
    worst = std::max(worst, std::abs(at(-m) - std::conj(at(m))));
  }
  return worst;
}

double FourierSeries::energy() const { return simd::sum_abs2(coeffs_); }

namespace detail {
namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans;

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mu);
    auto it = plans.find({n, sign});
    if (it != plans.end()) return it->second;
    // Planning only; FFTW_ESTIMATE never touches the arrays.
    std::vector<cplx> a(n), b(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()),
                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) throw InvalidInput("FFTW could not plan a transform of length " + std::to_string(n));
    plans.emplace(std::pair{n, sign}, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [key, p] : plans) fftw_destroy_plan(p);
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void dft(std::span<const cplx> in, std::span<cplx> out, int sign) {
  if (in.size() != out.size()) throw InvalidInput("dft: length mismatch");
  const std::size_t n = in.size();
  if (n == 0) return;
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  fftw_plan p = cache().get(n, sign);
  if (in.data() == out.data()) {
    std::vector<cplx> tmp(in.begin(), in.end());
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
  } else {
    // Out-of-place complex transforms leave the input intact.
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }
}

}  // namespace detail

FourierSeries forward(const PeriodicSignal& signal) {
  const std::size_t n = signal.size();
  std::vector<cplx> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = signal[i];
  detail::dft(buf, buf, -1);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& c : buf) c *= scale;
  return FourierSeries::from_fft_order(std::move(buf));
}

std::vector<cplx> inverse_complex(const FourierSeries& series) {
  std::vector<cplx> out(series.size());
  detail::dft(series.fft_order(), out, +1);
  return out;
}

PeriodicSignal inverse(const FourierSeries& series) {
  double peak = 0.0;
  for (const auto& c : series.fft_order()) peak = std::max(peak, std::abs(c));
  const double asym = series.max_asymmetry();
  if (asym > 1e-10 * peak) {
    throw SymmetryViolation("inverse: series is not Hermitian (max asymmetry " +
                                std::to_string(asym) + ")",
                            asym);
  }
  const auto z = inverse_complex(series);
  std::vector<double> re(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) re[i] = z[i].real();
  return PeriodicSignal(std::move(re));
}

double grid_distance2(const PeriodicSignal& a, const PeriodicSignal& b) {
  if (a.size() != b.size()) throw InvalidInput("grid_distance2: signal lengths differ");
  return simd::sum_squared_diff(a.samples(), b.samples()) / static_cast<double>(a.size());
}

PeriodicSignal circular_convolve(const PeriodicSignal& f, const PeriodicSignal& g) {
  if (f.size() != g.size()) {
    throw InvalidInput("circular_convolve: lengths " + std::to_string(f.size()) + " and " +
                       std::to_string(g.size()) + " differ");
  }
  const auto ff = forward(f);
  const auto gg = forward(g);
  std::vector<cplx> prod(f.size());
  simd::complex_multiply(ff.fft_order(), gg.fft_order(), prod);
  // Product of two Hermitian series is Hermitian up to rounding.
  const auto z = inverse_complex(FourierSeries::from_fft_order(std::move(prod)));
  std::vector<double> re(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) re[i] = z[i].real();
  return PeriodicSignal(std::move(re));
}

}  // namespace lrdecon
