#pragma once

#include <Eigen/Core>
#include <complex>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "doapose/common.hpp"

// STFT / ISTFT, mono downmix and the channel-difference spectrogram.

namespace doapose {

/// Time-aligned multichannel audio. Rows are channels, columns samples.
/// Nominal full scale is +-1.0; the simulator keeps gains low enough that
/// clipping never has to happen (hard clipping would break linearity).
struct MultiChannelClip {
  Eigen::MatrixXd samples;  // C x N
  double sample_rate = kDefaultSampleRate;

  int num_channels() const { return static_cast<int>(samples.rows()); }
  Eigen::Index num_samples() const { return samples.cols(); }

  void validate() const {
    if (samples.rows() < 1) throw InvalidConfig("clip needs at least one channel");
    if (!(sample_rate > 0)) throw InvalidConfig("sample_rate must be positive");
  }
};

struct StftConfig {
  int n_fft = 1024;
  int hop = 500;
  enum class Window { hann } window = Window::hann;

  void validate() const {
    if (n_fft <= 0 || (n_fft & (n_fft - 1)) != 0)
      throw InvalidConfig("n_fft must be a power of two");
    if (hop <= 0 || hop > n_fft) throw InvalidConfig("hop must satisfy 0 < hop <= n_fft");
  }
};

/// Periodic Hann window of length n.
inline Eigen::VectorXd hann_window(int n) {
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
  return w;
}

/// Complex STFT. Storage keeps the full one-sided spectrum (rows 0..n_fft/2,
/// i.e. DC through Nyquist) so that istft() can reconstruct exactly; the
/// published feature shape drops the DC row and is exposed through
/// feature_bins() / feature_magnitude(), giving the n_fft/2 x W layout
/// (512 x 96 under the defaults).
struct Spectrogram {
  std::vector<Eigen::MatrixXcd> channels;  // each (n_fft/2 + 1) x W
  StftConfig config;
  double sample_rate = kDefaultSampleRate;
  Eigen::Index padded_samples = 0;  // zeros appended to the clip tail before analysis

  int num_channels() const { return static_cast<int>(channels.size()); }
  Eigen::Index num_bins() const { return channels.empty() ? 0 : channels[0].rows(); }
  Eigen::Index num_frames() const { return channels.empty() ? 0 : channels[0].cols(); }
  int feature_bins() const { return config.n_fft / 2; }

  double bin_frequency_hz(Eigen::Index bin) const {
    return static_cast<double>(bin) * sample_rate / config.n_fft;
  }

  /// Magnitudes of storage rows 1..n_fft/2 (DC dropped): feature_bins() x W.
  Eigen::MatrixXd feature_magnitude(int channel) const {
    return channels.at(channel)
        .bottomRows(feature_bins())
        .cwiseAbs();
  }

  bool same_shape(const Spectrogram& o) const {
    return num_channels() == o.num_channels() && num_bins() == o.num_bins() &&
           num_frames() == o.num_frames();
  }
};

namespace detail {

/// Full complex spectrum of a real frame; any length.
inline void fft_forward(Eigen::FFT<double>& fft, const Eigen::VectorXd& in,
                        Eigen::VectorXcd& out) {
  std::vector<std::complex<double>> tmp(in.size());
  std::vector<std::complex<double>> cin(in.size());
  for (Eigen::Index i = 0; i < in.size(); ++i) cin[i] = in[i];
  fft.fwd(tmp, cin);
  out = Eigen::Map<Eigen::VectorXcd>(tmp.data(), static_cast<Eigen::Index>(tmp.size()));
}

inline void fft_inverse(Eigen::FFT<double>& fft, const Eigen::VectorXcd& in,
                        Eigen::VectorXcd& out) {
  std::vector<std::complex<double>> cin(in.data(), in.data() + in.size());
  std::vector<std::complex<double>> tmp(in.size());
  fft.inv(tmp, cin);
  out = Eigen::Map<Eigen::VectorXcd>(tmp.data(), static_cast<Eigen::Index>(tmp.size()));
}

}  // namespace detail

/// STFT with frames starting at k*hop, k = 0 .. W-1 and
/// W = floor((N - n_fft)/hop) + 1. Requires N >= n_fft.
inline Spectrogram stft(const MultiChannelClip& clip, const StftConfig& cfg) {
  clip.validate();
  cfg.validate();
  const Eigen::Index n = clip.num_samples();
  if (n < cfg.n_fft) throw ClipTooShort("clip shorter than one FFT frame");

  const Eigen::Index frames = (n - cfg.n_fft) / cfg.hop + 1;
  const int half = cfg.n_fft / 2;
  const Eigen::VectorXd win = hann_window(cfg.n_fft);

  Spectrogram spec;
  spec.config = cfg;
  spec.sample_rate = clip.sample_rate;
  spec.channels.resize(clip.num_channels());

  Eigen::FFT<double> fft;
  Eigen::VectorXcd full;
  for (int c = 0; c < clip.num_channels(); ++c) {
    Eigen::MatrixXcd& out = spec.channels[c];
    out.resize(half + 1, frames);
    for (Eigen::Index f = 0; f < frames; ++f) {
      const Eigen::VectorXd frame =
          clip.samples.row(c).segment(f * cfg.hop, cfg.n_fft).transpose().cwiseProduct(win);
      detail::fft_forward(fft, frame, full);
      out.col(f) = full.head(half + 1);
    }
  }
  return spec;
}

/// STFT after deterministically zero-padding the clip tail so exactly
/// `target_frames` frames are produced. The pad length is recorded in the
/// spectrogram metadata.
inline Spectrogram stft_padded(const MultiChannelClip& clip, const StftConfig& cfg,
                               Eigen::Index target_frames) {
  cfg.validate();
  if (target_frames < 1) throw InvalidConfig("target_frames must be >= 1");
  const Eigen::Index padded = cfg.n_fft + (target_frames - 1) * cfg.hop;
  if (clip.num_samples() > padded)
    throw InvalidConfig("clip is longer than the requested frame count covers");
  MultiChannelClip paddedClip = clip;
  paddedClip.samples.conservativeResize(Eigen::NoChange, padded);
  paddedClip.samples.rightCols(padded - clip.num_samples()).setZero();
  Spectrogram spec = stft(paddedClip, cfg);
  spec.padded_samples = padded - clip.num_samples();
  return spec;
}

/// The default feature path: frames tile the whole clip, W = ceil(N / hop).
/// Under the 48 kHz / 1000 ms / n_fft 1024 / hop 500 defaults this is the
/// 512 x 96 per-channel shape.
inline Spectrogram feature_spectrogram(const MultiChannelClip& clip,
                                       const StftConfig& cfg = StftConfig{}) {
  cfg.validate();
  const Eigen::Index frames = (clip.num_samples() + cfg.hop - 1) / cfg.hop;
  return stft_padded(clip, cfg, std::max<Eigen::Index>(frames, 1));
}

/// Weighted overlap-add inverse. Exact wherever the squared-window coverage
/// is nonzero; requires hop <= n_fft/2.
inline MultiChannelClip istft(const Spectrogram& spec) {
  spec.config.validate();
  if (spec.config.hop > spec.config.n_fft / 2)
    throw NonInvertibleConfig("istft requires hop <= n_fft/2");
  if (spec.channels.empty()) throw EmptyInput("spectrogram has no channels");

  const int n_fft = spec.config.n_fft;
  const int hop = spec.config.hop;
  const Eigen::Index frames = spec.num_frames();
  const Eigen::Index n = n_fft + (frames - 1) * hop;
  const Eigen::VectorXd win = hann_window(n_fft);

  MultiChannelClip clip;
  clip.sample_rate = spec.sample_rate;
  clip.samples.setZero(spec.num_channels(), n);
  Eigen::VectorXd coverage = Eigen::VectorXd::Zero(n);
  for (Eigen::Index f = 0; f < frames; ++f)
    coverage.segment(f * hop, n_fft) += win.cwiseProduct(win);

  Eigen::FFT<double> fft;
  Eigen::VectorXcd full(n_fft), time;
  for (int c = 0; c < spec.num_channels(); ++c) {
    for (Eigen::Index f = 0; f < frames; ++f) {
      const auto half = spec.channels[c].col(f);
      full.head(n_fft / 2 + 1) = half;
      for (int k = 1; k < n_fft / 2; ++k) full[n_fft - k] = std::conj(half[k]);
      detail::fft_inverse(fft, full, time);
      clip.samples.row(c).segment(f * hop, n_fft) +=
          (time.real().cwiseProduct(win)).transpose();
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = coverage[i];
    clip.samples.col(i) = d > 1e-12 ? (clip.samples.col(i) / d).eval()
                                    : Eigen::VectorXd::Zero(spec.num_channels()).eval();
  }
  return clip;
}

/// Sample-wise arithmetic mean across channels.
inline MultiChannelClip mono_downmix(const MultiChannelClip& clip) {
  clip.validate();
  MultiChannelClip out;
  out.sample_rate = clip.sample_rate;
  out.samples = clip.samples.colwise().mean();
  return out;
}

/// STFT of (left - right); the binaural pretext target.
inline Spectrogram channel_diff_spectrogram(const MultiChannelClip& binaural,
                                            const StftConfig& cfg) {
  if (binaural.num_channels() != 2)
    throw NotBinaural("channel_diff_spectrogram needs exactly 2 channels, got " +
                      std::to_string(binaural.num_channels()));
  MultiChannelClip diff;
  diff.sample_rate = binaural.sample_rate;
  diff.samples = binaural.samples.row(0) - binaural.samples.row(1);
  return stft(diff, cfg);
}

/// Mean absolute difference of magnitudes.
inline double l1_spec_distance(const Spectrogram& a, const Spectrogram& b) {
  if (!a.same_shape(b)) throw ShapeMismatch("spectrogram shapes differ");
  double sum = 0.0;
  for (int c = 0; c < a.num_channels(); ++c)
    sum += (a.channels[c].cwiseAbs() - b.channels[c].cwiseAbs()).cwiseAbs().sum();
  return sum / (static_cast<double>(a.num_channels()) * a.num_bins() * a.num_frames());
}

/// Rounds every sample to its nearest float32 value, so that writing to a
/// 32-bit float WAV and reading back is bit-exact.
inline MultiChannelClip quantize_float32(const MultiChannelClip& clip) {
  MultiChannelClip out = clip;
  out.samples = clip.samples.unaryExpr(
      [](double v) { return static_cast<double>(static_cast<float>(v)); });
  return out;
}

}  // namespace doapose
