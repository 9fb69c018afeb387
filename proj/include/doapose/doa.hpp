#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "doapose/dsp.hpp"

// Microphone-array geometry, far-field steering vectors and the wideband
// MUSIC estimator producing the 360-bin azimuth spectrum.

namespace doapose {

/// Microphone positions in the camera frame, meters.
struct ArrayGeometry {
  std::vector<Eigen::Vector3d> mic_positions;
  double speed_of_sound = kSpeedOfSound;

  int num_mics() const { return static_cast<int>(mic_positions.size()); }

  void validate() const {
    if (mic_positions.size() < 2) throw InvalidConfig("array needs at least 2 microphones");
    if (!(speed_of_sound > 0)) throw InvalidConfig("speed_of_sound must be positive");
    for (size_t i = 0; i < mic_positions.size(); ++i)
      for (size_t j = i + 1; j < mic_positions.size(); ++j)
        if ((mic_positions[i] - mic_positions[j]).norm() <= 1e-4)
          throw InvalidConfig("microphones " + std::to_string(i) + " and " +
                              std::to_string(j) + " are coincident");
  }
};

/// Uniform circular array in the camera's horizontal plane, mic 0 at +x.
inline ArrayGeometry circular_array(int num_mics, double radius_m,
                                    double speed_of_sound = kSpeedOfSound) {
  ArrayGeometry g;
  g.speed_of_sound = speed_of_sound;
  for (int i = 0; i < num_mics; ++i) {
    const double a = 2.0 * kPi * i / num_mics;
    g.mic_positions.emplace_back(radius_m * std::cos(a), radius_m * std::sin(a), 0.0);
  }
  g.validate();
  return g;
}

/// 360-bin azimuth energy distribution; entry i covers [i deg, i+1 deg),
/// counterclockwise, 0 = camera forward. Values in [0, 1].
struct DoaSpectrum {
  std::array<double, 360> values{};

  int argmax() const {
    int best = 0;
    for (int i = 1; i < 360; ++i)
      if (values[i] > values[best]) best = i;
    return best;
  }

  void validate() const {
    for (double v : values)
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidConfig("DoaSpectrum value outside [0,1]");
  }
};

struct MusicConfig {
  int num_sources = 1;
  double freq_lo_hz = 300.0;
  double freq_hi_hz = 8000.0;
  double diagonal_loading = 1e-6;

  void validate(int num_mics, double nyquist_hz) const {
    if (num_sources < 1 || num_sources >= num_mics)
      throw InvalidConfig("need 1 <= num_sources < num_mics");
    if (!(freq_lo_hz >= 0 && freq_lo_hz < freq_hi_hz && freq_hi_hz <= nyquist_hz))
      throw InvalidConfig("need 0 <= freq_lo < freq_hi <= Nyquist");
  }
};

/// Far-field plane-wave array response: element m is exp(-j 2 pi f tau_m)
/// with tau_m = -(p_m . u(azimuth)) / c. Unit modulus per element.
inline Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, double azimuth_deg,
                                        double freq_hz) {
  geom.validate();
  const double a = deg2rad(azimuth_deg);
  const Eigen::Vector3d u(std::cos(a), std::sin(a), 0.0);
  Eigen::VectorXcd v(geom.num_mics());
  for (int m = 0; m < geom.num_mics(); ++m) {
    const double tau = -geom.mic_positions[m].dot(u) / geom.speed_of_sound;
    const double phase = -2.0 * kPi * freq_hz * tau;
    v[m] = std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return v;
}

/// Snapshot covariance at one frequency bin: (1/W) sum_w x_w x_w^H plus
/// trace-scaled diagonal loading (unit scale when the trace vanishes, so a
/// zero spectrogram yields loading * I).
inline Eigen::MatrixXcd spatial_covariance(const Spectrogram& spec, Eigen::Index bin,
                                           double loading) {
  const int c = spec.num_channels();
  const Eigen::Index w = spec.num_frames();
  if (c < 1 || w < 1) throw EmptyInput("empty spectrogram");
  if (bin < 0 || bin >= spec.num_bins()) throw InvalidConfig("bin index out of range");

  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(c, c);
  Eigen::VectorXcd x(c);
  for (Eigen::Index f = 0; f < w; ++f) {
    for (int ch = 0; ch < c; ++ch) x[ch] = spec.channels[ch](bin, f);
    r.noalias() += x * x.adjoint();
  }
  r /= static_cast<double>(w);
  const double tr = r.trace().real();
  const double scale = tr > 0.0 ? tr / c : 1.0;
  r += loading * scale * Eigen::MatrixXcd::Identity(c, c);
  return r;
}

/// Wideband MUSIC with per-bin min-max normalization before averaging
/// across frequency ("frequency normalization"), then a final min-max onto
/// [0, 1]. Bins whose pseudospectrum is flat contribute nothing.
inline DoaSpectrum music_spectrum(const Spectrogram& spec, const ArrayGeometry& geom,
                                  const MusicConfig& cfg) {
  geom.validate();
  const int c = spec.num_channels();
  if (c < 2) throw TooFewChannels("MUSIC needs >= 2 channels, got " + std::to_string(c));
  if (c != geom.num_mics())
    throw ShapeMismatch("spectrogram channels != geometry mic count");
  cfg.validate(geom.num_mics(), spec.sample_rate / 2.0);

  std::vector<Eigen::Index> bins;
  for (Eigen::Index k = 0; k < spec.num_bins(); ++k) {
    const double f = spec.bin_frequency_hz(k);
    if (f >= cfg.freq_lo_hz && f <= cfg.freq_hi_hz) bins.push_back(k);
  }
  if (bins.empty()) throw EmptyBand("no STFT bins inside the frequency band");

  // Mic-position projections onto each candidate direction, reused across bins.
  Eigen::MatrixXd proj(c, 360);  // p_m . u(theta)
  for (int th = 0; th < 360; ++th) {
    const double a = deg2rad(static_cast<double>(th));
    const Eigen::Vector3d u(std::cos(a), std::sin(a), 0.0);
    for (int m = 0; m < c; ++m) proj(m, th) = geom.mic_positions[m].dot(u);
  }

  std::array<double, 360> accum{};
  std::array<double, 360> p{};
  Eigen::VectorXcd a(c);
  for (Eigen::Index bin : bins) {
    const Eigen::MatrixXcd r = spatial_covariance(spec, bin, cfg.diagonal_loading);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
    if (es.info() != Eigen::Success) continue;
    // Eigenvalues ascend; the first c - num_sources columns span the noise subspace.
    const Eigen::MatrixXcd noise = es.eigenvectors().leftCols(c - cfg.num_sources);

    const double f = spec.bin_frequency_hz(bin);
    const double k_wave = 2.0 * kPi * f / geom.speed_of_sound;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int th = 0; th < 360; ++th) {
      for (int m = 0; m < c; ++m) {
        const double phase = k_wave * proj(m, th);
        a[m] = std::complex<double>(std::cos(phase), std::sin(phase));
      }
      const double denom = (noise.adjoint() * a).squaredNorm();
      p[th] = 1.0 / std::max(denom, 1e-18);
      lo = std::min(lo, p[th]);
      hi = std::max(hi, p[th]);
    }
    const double range = hi - lo;
    if (range < 1e-15) continue;  // flat bin, no directional information
    for (int th = 0; th < 360; ++th) accum[th] += (p[th] - lo) / range;
  }

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : accum) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  DoaSpectrum out;
  const double range = hi - lo;
  if (range >= 1e-15)
    for (int th = 0; th < 360; ++th) out.values[th] = (accum[th] - lo) / range;
  return out;
}

/// Top-k circularly non-adjacent local maxima, by value descending, ties to
/// the smaller azimuth. Returned as azimuth degrees.
inline std::vector<double> doa_peaks(const DoaSpectrum& spectrum, int k) {
  if (k < 1 || k > 360) throw InvalidConfig("k must be in [1, 360]");
  const auto& v = spectrum.values;
  std::vector<int> candidates;
  for (int i = 0; i < 360; ++i) {
    const double prev = v[(i + 359) % 360];
    const double next = v[(i + 1) % 360];
    if (v[i] >= prev && v[i] >= next) candidates.push_back(i);
  }
  std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    if (v[a] != v[b]) return v[a] > v[b];
    return a < b;
  });
  std::vector<double> peaks;
  std::vector<int> taken;
  for (int i : candidates) {
    if (static_cast<int>(peaks.size()) == k) break;
    bool adjacent = false;
    for (int t : taken) {
      const int d = std::abs(i - t);
      if (std::min(d, 360 - d) <= 1) {
        adjacent = true;
        break;
      }
    }
    if (adjacent) continue;
    taken.push_back(i);
    peaks.push_back(static_cast<double>(i));
  }
  return peaks;
}

}  // namespace doapose
