#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "entrain/error.hpp"

namespace entrain::dsp {

/// Second-order section with a0 normalized to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

/// Cascade of biquads, run causally from zero initial state.
class SosFilter {
 public:
  SosFilter() = default;
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  const std::vector<Biquad>& sections() const { return sections_; }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(x.begin(), x.end());
    for (const auto& s : sections_) {
      double z1 = 0.0;
      double z2 = 0.0;
      for (double& v : y) {
        const double in = v;
        const double out = s.b0 * in + z1;
        z1 = s.b1 * in - s.a1 * out + z2;
        z2 = s.b2 * in - s.a2 * out;
        v = out;
      }
    }
    return y;
  }

  std::complex<double> response(double freq_hz, double sample_rate) const {
    const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
    const std::complex<double> z1 = std::polar(1.0, -w);
    const std::complex<double> z2 = z1 * z1;
    std::complex<double> h(1.0, 0.0);
    for (const auto& s : sections_) {
      h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
    }
    return h;
  }

  std::vector<std::complex<double>> poles() const {
    std::vector<std::complex<double>> out;
    for (const auto& s : sections_) {
      // roots of z^2 + a1 z + a2 (or z + a1 for first-order sections)
      if (s.a2 == 0.0) {
        out.emplace_back(-s.a1, 0.0);
        continue;
      }
      const std::complex<double> disc = std::sqrt(std::complex<double>(s.a1 * s.a1 - 4.0 * s.a2));
      out.push_back((-s.a1 + disc) / 2.0);
      out.push_back((-s.a1 - disc) / 2.0);
    }
    return out;
  }

  bool is_stable() const {
    const auto p = poles();
    return std::all_of(p.begin(), p.end(),
                       [](const std::complex<double>& z) { return std::abs(z) < 1.0; });
  }

  void scale(double gain) {
    if (sections_.empty()) return;
    const double g = std::pow(std::abs(gain), 1.0 / static_cast<double>(sections_.size()));
    for (auto& s : sections_) {
      s.b0 *= g;
      s.b1 *= g;
      s.b2 *= g;
    }
    if (gain < 0.0) {
      sections_.front().b0 *= -1.0;
      sections_.front().b1 *= -1.0;
      sections_.front().b2 *= -1.0;
    }
  }

 private:
  std::vector<Biquad> sections_;
};

namespace detail {

inline std::vector<std::complex<double>> butterworth_prototype_poles(int order) {
  std::vector<std::complex<double>> p;
  for (int k = 0; k < order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    p.push_back(std::polar(1.0, theta));
  }
  return p;
}

inline double prewarp(double freq_hz, double sample_rate) {
  return 2.0 * sample_rate * std::tan(std::numbers::pi * freq_hz / sample_rate);
}

inline std::complex<double> bilinear(std::complex<double> s, double sample_rate) {
  const double k = 2.0 * sample_rate;
  return (k + s) / (k - s);
}

// Denominator of a section holding the conjugate pair {z, conj(z)}.
inline void set_pole_pair(Biquad& s, std::complex<double> z) {
  s.a1 = -2.0 * z.real();
  s.a2 = std::norm(z);
}

inline std::vector<std::complex<double>> upper_half(std::vector<std::complex<double>> z) {
  std::vector<std::complex<double>> out;
  for (auto v : z) {
    if (v.imag() > 1e-9 * std::abs(v)) out.push_back(v);
  }
  std::sort(out.begin(), out.end(), [](auto a, auto b) { return std::arg(a) < std::arg(b); });
  return out;
}

inline void check_edges(double lo, double hi, double sample_rate) {
  if (!(sample_rate > 0.0)) throw ValidationError("sample rate must be positive");
  if (!(lo > 0.0 && lo < hi && hi < 0.5 * sample_rate)) {
    throw ValidationError("butterworth edges must satisfy 0 < lo < hi < nyquist");
  }
}

}  // namespace detail

/// Digital Butterworth low-pass via the bilinear transform with pre-warping.
/// DC gain is exactly 1 per section.
inline SosFilter butterworth_lowpass(int order, double cutoff_hz, double sample_rate) {
  if (order < 1) throw ValidationError("butterworth order must be >= 1");
  if (!(cutoff_hz > 0.0 && cutoff_hz < 0.5 * sample_rate)) {
    throw ValidationError("butterworth cutoff must lie in (0, nyquist)");
  }
  const double wc = detail::prewarp(cutoff_hz, sample_rate);
  std::vector<std::complex<double>> zpoles;
  for (auto p : detail::butterworth_prototype_poles(order)) {
    zpoles.push_back(detail::bilinear(p * wc, sample_rate));
  }
  std::vector<Biquad> sections;
  for (auto z : detail::upper_half(zpoles)) {
    Biquad s;
    detail::set_pole_pair(s, z);
    const double g = (1.0 + s.a1 + s.a2) / 4.0;
    s.b0 = g;
    s.b1 = 2.0 * g;
    s.b2 = g;
    sections.push_back(s);
  }
  if (order % 2 == 1) {
    // the real pole of an odd-order prototype sits at s = -wc
    const double z = detail::bilinear({-wc, 0.0}, sample_rate).real();
    Biquad s;
    s.a1 = -z;
    s.a2 = 0.0;
    const double g = (1.0 - z) / 2.0;
    s.b0 = g;
    s.b1 = g;
    s.b2 = 0.0;
    sections.push_back(s);
  }
  return SosFilter(std::move(sections));
}

/// Digital Butterworth band-pass built from an analog low-pass prototype of
/// `prototype_order` poles; the resulting filter has 2 * prototype_order
/// poles. Gain is unity at the (warped) geometric band center.
inline SosFilter butterworth_bandpass(int prototype_order, double lo_hz, double hi_hz,
                                      double sample_rate) {
  if (prototype_order < 1 || prototype_order % 2 != 0) {
    throw ValidationError("band-pass prototype order must be even and >= 2");
  }
  detail::check_edges(lo_hz, hi_hz, sample_rate);
  const double wlo = detail::prewarp(lo_hz, sample_rate);
  const double whi = detail::prewarp(hi_hz, sample_rate);
  const double bw = whi - wlo;
  const double w0sq = wlo * whi;

  std::vector<std::complex<double>> zpoles;
  for (auto p : detail::butterworth_prototype_poles(prototype_order)) {
    // roots of s^2 - (p bw) s + w0^2; the small root via the product avoids
    // cancellation when the band reaches close to nyquist
    const std::complex<double> a = p * bw / 2.0;
    const std::complex<double> r = std::sqrt(a * a - w0sq);
    const std::complex<double> s1 = std::abs(a + r) >= std::abs(a - r) ? a + r : a - r;
    const std::complex<double> s2 = w0sq / s1;
    zpoles.push_back(detail::bilinear(s1, sample_rate));
    zpoles.push_back(detail::bilinear(s2, sample_rate));
  }

  std::vector<Biquad> sections;
  for (auto z : detail::upper_half(zpoles)) {
    Biquad s;
    detail::set_pole_pair(s, z);
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;  // one zero at DC and one at nyquist per section
    sections.push_back(s);
  }
  if (sections.size() != static_cast<std::size_t>(prototype_order)) {
    throw NumericError("band-pass design produced real poles");
  }
  SosFilter filter(std::move(sections));
  const double center_hz =
      sample_rate / std::numbers::pi * std::atan(std::sqrt(w0sq) / (2.0 * sample_rate));
  filter.scale(1.0 / std::abs(filter.response(center_hz, sample_rate)));
  return filter;
}

}  // namespace entrain::dsp
