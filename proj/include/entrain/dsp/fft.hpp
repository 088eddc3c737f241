#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include "entrain/error.hpp"

// Thin RAII wrappers over FFTW. Plans are made with FFTW_ESTIMATE so the
// chosen algorithm (and therefore rounding) is identical from run to run.
namespace entrain::dsp {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place complex DFT of a fixed length. Unnormalized in both directions.
class ComplexFft {
 public:
  ComplexFft(std::size_t n, bool inverse) : n_(n) {
    if (n == 0) throw ValidationError("fft length must be positive");
    std::vector<std::complex<double>> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf,
                             inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~ComplexFft() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;

  std::size_t size() const { return n_; }

  void execute(std::span<std::complex<double>> data) const {
    if (data.size() != n_) throw ValidationError("fft buffer length mismatch");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan_, buf, buf);
  }

 private:
  std::size_t n_;
  fftw_plan plan_;
};

/// Real-to-half-complex forward DFT of a fixed length (n/2 + 1 bins).
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n), in_(n), out_(n / 2 + 1) {
    if (n == 0) throw ValidationError("fft length must be positive");
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.data(),
                                 reinterpret_cast<fftw_complex*>(out_.data()),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~RealFft() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }

  /// Zero-pads (or rejects) `x` to the plan length and returns the spectrum.
  const std::vector<std::complex<double>>& forward(std::span<const double> x) {
    if (x.size() > n_) throw ValidationError("fft input longer than plan");
    std::copy(x.begin(), x.end(), in_.begin());
    std::fill(in_.begin() + static_cast<std::ptrdiff_t>(x.size()), in_.end(), 0.0);
    fftw_execute_dft_r2c(plan_, in_.data(),
                         reinterpret_cast<fftw_complex*>(out_.data()));
    return out_;
  }

 private:
  std::size_t n_;
  std::vector<double> in_;
  std::vector<std::complex<double>> out_;
  fftw_plan plan_;
};

}  // namespace entrain::dsp
