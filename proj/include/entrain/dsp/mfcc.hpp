#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "entrain/dsp/fft.hpp"
#include "entrain/error.hpp"

namespace entrain::dsp {

struct MfccOptions {
  double sample_rate = 16000.0;
  double window_s = 0.020;
  double hop_s = 0.010;
  int num_filters = 26;
  int num_ceps = 13;  // including c0
  double low_hz = 0.0;
  double high_hz = 8000.0;
  double preemphasis = 0.97;
  double log_floor = 1e-10;
  int delta_window = 2;
};

inline double hz_to_mel(double hz) { return 1127.0 * std::log1p(hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * std::expm1(mel / 1127.0); }

/// Frame count for a `num_samples` signal: frames start every hop and must
/// fit entirely inside the signal.
inline std::size_t num_frames(std::size_t num_samples, std::size_t frame_len, std::size_t hop) {
  if (num_samples < frame_len) return 0;
  return 1 + (num_samples - frame_len) / hop;
}

/// Regression deltas over +-`window` frames with edge replication.
inline Eigen::MatrixXd deltas(const Eigen::MatrixXd& x, int window) {
  const Eigen::Index t = x.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(t, x.cols());
  double norm = 0.0;
  for (int n = 1; n <= window; ++n) norm += 2.0 * n * n;
  for (Eigen::Index i = 0; i < t; ++i) {
    for (int n = 1; n <= window; ++n) {
      const Eigen::Index fwd = std::min<Eigen::Index>(i + n, t - 1);
      const Eigen::Index back = std::max<Eigen::Index>(i - n, 0);
      d.row(i) += n * (x.row(fwd) - x.row(back));
    }
  }
  return d / norm;
}

class MfccExtractor {
 public:
  explicit MfccExtractor(MfccOptions opts = {}) : opts_(opts) {
    frame_len_ = static_cast<std::size_t>(std::lround(opts_.window_s * opts_.sample_rate));
    hop_ = static_cast<std::size_t>(std::lround(opts_.hop_s * opts_.sample_rate));
    fft_len_ = next_pow2(frame_len_);
    window_.resize(frame_len_);
    for (std::size_t i = 0; i < frame_len_; ++i) {
      window_[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                          static_cast<double>(frame_len_ - 1));
    }
    build_mel_bank();
    build_dct();
  }

  const MfccOptions& options() const { return opts_; }
  std::size_t frame_length() const { return frame_len_; }
  std::size_t hop() const { return hop_; }
  std::size_t min_samples() const { return frame_len_ + 2 * hop_; }

  /// Frames x 39 matrix: 13 static (c0..c12), 13 deltas, 13 delta-deltas.
  Eigen::MatrixXd operator()(std::span<const double> signal) const {
    const std::size_t frames = num_frames(signal.size(), frame_len_, hop_);
    if (frames < 3) throw ValidationError("mfcc needs at least 3 frames (40 ms at 16 kHz)");
    const int nc = opts_.num_ceps;
    Eigen::MatrixXd statics(static_cast<Eigen::Index>(frames), nc);
    RealFft fft(fft_len_);
    std::vector<double> frame(frame_len_);
    Eigen::VectorXd power(static_cast<Eigen::Index>(fft_len_ / 2 + 1));
    for (std::size_t f = 0; f < frames; ++f) {
      const auto start = f * hop_;
      double dc = 0.0;
      for (std::size_t i = 0; i < frame_len_; ++i) dc += signal[start + i];
      dc /= static_cast<double>(frame_len_);
      for (std::size_t i = 0; i < frame_len_; ++i) frame[i] = signal[start + i] - dc;
      // pre-emphasis within the frame so identical frames stay identical
      for (std::size_t i = frame_len_ - 1; i > 0; --i) frame[i] -= opts_.preemphasis * frame[i - 1];
      frame[0] -= opts_.preemphasis * frame[0];
      for (std::size_t i = 0; i < frame_len_; ++i) frame[i] *= window_[i];
      const auto& spec = fft.forward(frame);
      for (Eigen::Index k = 0; k < power.size(); ++k) power[k] = std::norm(spec[static_cast<std::size_t>(k)]);
      Eigen::VectorXd log_mel = mel_bank_ * power;
      for (Eigen::Index m = 0; m < log_mel.size(); ++m) {
        log_mel[m] = std::log(std::max(log_mel[m], opts_.log_floor));
      }
      statics.row(static_cast<Eigen::Index>(f)) = (dct_ * log_mel).transpose();
    }
    Eigen::MatrixXd out(statics.rows(), 3 * nc);
    const Eigen::MatrixXd d1 = deltas(statics, opts_.delta_window);
    out.leftCols(nc) = statics;
    out.middleCols(nc, nc) = d1;
    out.rightCols(nc) = deltas(d1, opts_.delta_window);
    return out;
  }

 private:
  void build_mel_bank() {
    const int nf = opts_.num_filters;
    const auto bins = static_cast<Eigen::Index>(fft_len_ / 2 + 1);
    mel_bank_ = Eigen::MatrixXd::Zero(nf, bins);
    const double mlo = hz_to_mel(opts_.low_hz);
    const double mhi = hz_to_mel(opts_.high_hz);
    std::vector<double> edges(static_cast<std::size_t>(nf + 2));
    for (int i = 0; i < nf + 2; ++i) edges[i] = mlo + (mhi - mlo) * i / (nf + 1);
    for (int m = 0; m < nf; ++m) {
      for (Eigen::Index k = 0; k < bins; ++k) {
        const double mel = hz_to_mel(static_cast<double>(k) * opts_.sample_rate /
                                     static_cast<double>(fft_len_));
        const double l = edges[m], c = edges[m + 1], r = edges[m + 2];
        double w = 0.0;
        if (mel > l && mel <= c) {
          w = (mel - l) / (c - l);
        } else if (mel > c && mel < r) {
          w = (r - mel) / (r - c);
        }
        mel_bank_(m, k) = w;
      }
    }
  }

  void build_dct() {
    const int nf = opts_.num_filters;
    dct_.resize(opts_.num_ceps, nf);
    for (int i = 0; i < opts_.num_ceps; ++i) {
      const double scale = std::sqrt((i == 0 ? 1.0 : 2.0) / nf);
      for (int j = 0; j < nf; ++j) {
        dct_(i, j) = scale * std::cos(std::numbers::pi * i * (j + 0.5) / nf);
      }
    }
  }

  MfccOptions opts_;
  std::size_t frame_len_ = 0;
  std::size_t hop_ = 0;
  std::size_t fft_len_ = 0;
  std::vector<double> window_;
  Eigen::MatrixXd mel_bank_;
  Eigen::MatrixXd dct_;
};

inline Eigen::MatrixXd mfcc(std::span<const double> signal) {
  static const MfccExtractor extractor;
  return extractor(signal);
}

}  // namespace entrain::dsp
