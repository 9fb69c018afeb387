#pragma once

#include <optional>
#include <random>
#include <string>
#include <variant>

#include "doapose/binaural.hpp"
#include "doapose/doa.hpp"
#include "doapose/dsp.hpp"
#include "doapose/geometry.hpp"

// Deterministic free-field multichannel simulator: point sources, a mic
// array rigidly attached to the camera pose, fractional propagation delays
// via frequency-domain phase ramps, 1/r attenuation and SNR-controlled
// noise. No reverberation.

namespace doapose {

struct SignalSpec {
  enum class Type { white_noise, band_noise, sine, am_noise };
  Type type = Type::white_noise;
  std::uint64_t seed = 0;        // noise types
  double f_lo_hz = 300.0;        // band_noise
  double f_hi_hz = 8000.0;       // band_noise
  double freq_hz = 1000.0;       // sine
  double phase_rad = 0.0;        // sine
  double mod_rate_hz = 4.0;      // am_noise

  static SignalSpec white_noise(std::uint64_t seed) {
    SignalSpec s;
    s.type = Type::white_noise;
    s.seed = seed;
    return s;
  }
  static SignalSpec band_noise(std::uint64_t seed, double f_lo, double f_hi) {
    SignalSpec s;
    s.type = Type::band_noise;
    s.seed = seed;
    s.f_lo_hz = f_lo;
    s.f_hi_hz = f_hi;
    return s;
  }
  static SignalSpec sine(double freq, double phase = 0.0) {
    SignalSpec s;
    s.type = Type::sine;
    s.freq_hz = freq;
    s.phase_rad = phase;
    return s;
  }
  static SignalSpec am_noise(std::uint64_t seed, double mod_rate) {
    SignalSpec s;
    s.type = Type::am_noise;
    s.seed = seed;
    s.mod_rate_hz = mod_rate;
    return s;
  }
};

struct SourceSpec {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // world frame, meters
  SignalSpec signal;
  double gain = 1.0;  // linear amplitude at 1 m (before the 1/r law)

  void validate(double nyquist_hz) const {
    if (!(gain >= 0)) throw InvalidConfig("source gain must be >= 0");
    if (signal.type == SignalSpec::Type::sine && !(signal.freq_hz < nyquist_hz))
      throw InvalidConfig("sine frequency must be below Nyquist");
    if (signal.type == SignalSpec::Type::band_noise && !(signal.f_hi_hz < nyquist_hz))
      throw InvalidConfig("band_noise upper edge must be below Nyquist");
  }
};

struct Scene {
  std::vector<SourceSpec> sources;
  std::optional<double> noise_snr_db;  // per-channel additive noise, relative to signal power
  ArrayGeometry geometry = circular_array(4, 0.05);
  std::uint64_t seed = 0;
};

struct CapturePair {
  MultiChannelClip clip_source;
  MultiChannelClip clip_target;
  Pose pose_source;
  Pose pose_target;
  RelativePose truth;
  std::string manifest_id;
};

namespace detail {

inline Eigen::VectorXd generate_signal(const SignalSpec& s, Eigen::Index n, double fs) {
  Eigen::VectorXd x(n);
  switch (s.type) {
    case SignalSpec::Type::sine: {
      for (Eigen::Index i = 0; i < n; ++i)
        x[i] = std::sin(2.0 * kPi * s.freq_hz * i / fs + s.phase_rad);
      return x;
    }
    case SignalSpec::Type::white_noise:
    case SignalSpec::Type::am_noise: {
      std::mt19937_64 rng(s.seed);
      std::normal_distribution<double> dist(0.0, 1.0);
      for (Eigen::Index i = 0; i < n; ++i) x[i] = dist(rng);
      if (s.type == SignalSpec::Type::am_noise)
        for (Eigen::Index i = 0; i < n; ++i)
          x[i] *= 0.5 + 0.5 * std::sin(2.0 * kPi * s.mod_rate_hz * i / fs);
      return x;
    }
    case SignalSpec::Type::band_noise: {
      std::mt19937_64 rng(s.seed);
      std::normal_distribution<double> dist(0.0, 1.0);
      for (Eigen::Index i = 0; i < n; ++i) x[i] = dist(rng);
      Eigen::VectorXcd spec = full_fft(x);
      for (Eigen::Index k = 0; k <= n / 2; ++k) {
        const double f = k * fs / static_cast<double>(n);
        if (f < s.f_lo_hz || f > s.f_hi_hz) {
          spec[k] = 0.0;
          if (k > 0 && k < n - k) spec[n - k] = 0.0;
        }
      }
      return full_ifft_real(spec);
    }
  }
  throw InvalidConfig("unknown signal type");
}

/// Circular fractional delay: spectrum * exp(-j 2 pi f tau), Nyquist dropped.
inline void apply_delay(Eigen::VectorXcd& spec, double tau_s, double fs) {
  const Eigen::Index n = spec.size();
  for (Eigen::Index k = 1; k < (n + 1) / 2; ++k) {
    const double f = k * fs / static_cast<double>(n);
    const double phase = -2.0 * kPi * f * tau_s;
    spec[k] *= std::complex<double>(std::cos(phase), std::sin(phase));
    spec[n - k] = std::conj(spec[k]);
  }
  if (n % 2 == 0) spec[n / 2] = 0.0;
}

}  // namespace detail

/// Renders what the camera-mounted array hears from a fixed camera pose.
/// `noise_stream` salts the additive-noise RNG so the two clips of a pair
/// get independent draws while everything else repeats exactly.
inline MultiChannelClip render_clip(const Scene& scene, const Pose& camera,
                                    double duration_s,
                                    double sample_rate = kDefaultSampleRate,
                                    std::uint64_t noise_stream = 0) {
  scene.geometry.validate();
  if (!(duration_s > 0)) throw InvalidConfig("duration_s must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(std::llround(duration_s * sample_rate));
  const int mics = scene.geometry.num_mics();
  const double c = scene.geometry.speed_of_sound;

  std::vector<Eigen::Vector3d> mic_world(mics);
  for (int m = 0; m < mics; ++m)
    mic_world[m] = camera.rotation.rotate(scene.geometry.mic_positions[m]) +
                   camera.translation;

  for (const SourceSpec& src : scene.sources) {
    src.validate(sample_rate / 2.0);
    for (int m = 0; m < mics; ++m)
      if ((src.position - mic_world[m]).norm() < 0.1)
        throw SourceInsideArray("source within 0.1 m of microphone " + std::to_string(m));
  }

  std::vector<Eigen::VectorXcd> acc(mics, Eigen::VectorXcd::Zero(n));
  for (const SourceSpec& src : scene.sources) {
    const Eigen::VectorXd base = detail::generate_signal(src.signal, n, sample_rate);
    const Eigen::VectorXcd base_spec = detail::full_fft(base);
    for (int m = 0; m < mics; ++m) {
      const double dist = (src.position - mic_world[m]).norm();
      const double amp = src.gain / std::max(dist, 0.1);
      Eigen::VectorXcd s = base_spec * amp;
      detail::apply_delay(s, dist / c, sample_rate);
      acc[m] += s;
    }
  }

  MultiChannelClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(mics, n);
  for (int m = 0; m < mics; ++m)
    clip.samples.row(m) = detail::full_ifft_real(acc[m]).transpose();

  if (scene.noise_snr_db) {
    const double p_sig = clip.samples.squaredNorm() / (static_cast<double>(mics) * n);
    // Silent scenes take unit reference power so noise-only renders exist.
    const double p_ref = p_sig > 1e-30 ? p_sig : 1.0;
    const double sigma = std::sqrt(p_ref / std::pow(10.0, *scene.noise_snr_db / 10.0));
    for (int m = 0; m < mics; ++m) {
      std::mt19937_64 rng(derive_seed(scene.seed, noise_stream, static_cast<std::uint64_t>(m)));
      std::normal_distribution<double> dist(0.0, 1.0);
      for (Eigen::Index i = 0; i < n; ++i) clip.samples(m, i) += sigma * dist(rng);
    }
  }
  return clip;
}

/// Two renders of the same scene at two poses: identical source signals,
/// independent per-clip noise draws.
inline CapturePair generate_pair(const Scene& scene, const Pose& pose_s, const Pose& pose_t,
                                 double duration_s,
                                 double sample_rate = kDefaultSampleRate,
                                 std::string id = "") {
  CapturePair pair;
  pair.clip_source = render_clip(scene, pose_s, duration_s, sample_rate, 0);
  pair.clip_target = render_clip(scene, pose_t, duration_s, sample_rate, 1);
  pair.pose_source = pose_s;
  pair.pose_target = pose_t;
  pair.truth = relative_pose(pose_s, pose_t);
  pair.manifest_id = std::move(id);
  return pair;
}

/// Azimuth of a world point in the camera frame, degrees in [0, 360).
inline double camera_frame_azimuth_deg(const Pose& camera, const Eigen::Vector3d& world_point) {
  const Eigen::Vector3d d = camera.rotation.inverse().rotate(world_point - camera.translation);
  return wrap_deg_unsigned(rad2deg(std::atan2(d.y(), d.x())));
}

}  // namespace doapose
