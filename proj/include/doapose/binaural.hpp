#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "doapose/doa.hpp"
#include "doapose/dsp.hpp"

// Analytic spherical-head binauralization and binaural cue extraction
// (ILD, IPD, GCC-PHAT TDOA).
//
// Sign conventions: a source at positive azimuth sits on the left (+y), so
// the right channel lags (positive tdoa_s) and the left channel is louder
// (positive ild_db).

namespace doapose {

struct HeadModel {
  double ear_spacing = 0.18;          // meters
  double head_shadow_strength = 0.5;  // in [0, 1]

  void validate() const {
    if (!(ear_spacing > 0)) throw InvalidConfig("ear_spacing must be positive");
    if (!(head_shadow_strength >= 0 && head_shadow_strength <= 1))
      throw InvalidConfig("head_shadow_strength must be in [0, 1]");
  }
};

/// Per-frequency level/phase differences plus a single broadband time
/// difference. ild_db/ipd_rad cover the feature bins (DC dropped), so their
/// length is n_fft/2.
struct BinauralCues {
  Eigen::VectorXd ild_db;
  Eigen::VectorXd ipd_rad;  // wrapped to (-pi, pi]
  double tdoa_s = 0.0;
};

namespace detail {

inline Eigen::VectorXcd full_fft(const Eigen::VectorXd& x) {
  Eigen::FFT<double> fft;
  Eigen::VectorXcd out;
  fft_forward(fft, x, out);
  return out;
}

inline Eigen::VectorXd full_ifft_real(const Eigen::VectorXcd& x) {
  Eigen::FFT<double> fft;
  Eigen::VectorXcd out;
  fft_inverse(fft, x, out);
  return out.real();
}

/// Applies a circular fractional delay plus a zero-phase high-frequency
/// shadow to a full complex spectrum, in place. shadow in [0, 1] scales a
/// linear-in-frequency attenuation ramp.
inline void apply_ear_filter(Eigen::VectorXcd& spec, double delay_s, double shadow,
                             double sample_rate) {
  const Eigen::Index n = spec.size();
  const double nyquist = sample_rate / 2.0;
  for (Eigen::Index k = 1; k < (n + 1) / 2; ++k) {
    const double f = k * sample_rate / static_cast<double>(n);
    const double phase = -2.0 * kPi * f * delay_s;
    const double gain = 1.0 - shadow * (f / nyquist);
    spec[k] *= gain * std::complex<double>(std::cos(phase), std::sin(phase));
    spec[n - k] = std::conj(spec[k]);
  }
  if (n % 2 == 0) spec[n / 2] = 0.0;  // drop Nyquist: fractional delay has no real bin there
}

}  // namespace detail

/// Spherical-head stand-in for an HRTF: ITD = (ear_spacing / c) * sin(az)
/// split symmetrically across the ears as circular fractional delays, plus a
/// frequency-ramped contralateral level shadow.
inline MultiChannelClip binauralize(const MultiChannelClip& mono, double source_azimuth_deg,
                                    const HeadModel& head) {
  mono.validate();
  head.validate();
  if (mono.num_channels() != 1)
    throw NotMono("binauralize needs a mono clip, got " +
                  std::to_string(mono.num_channels()) + " channels");

  const double az = deg2rad(source_azimuth_deg);
  const double s = std::sin(az);
  const double itd = head.ear_spacing / kSpeedOfSound * s;  // right minus left arrival
  const double shadow_left = head.head_shadow_strength * std::max(0.0, -s);
  const double shadow_right = head.head_shadow_strength * std::max(0.0, s);

  const Eigen::VectorXcd base = detail::full_fft(mono.samples.row(0).transpose());
  Eigen::VectorXcd left = base, right = base;
  detail::apply_ear_filter(left, -itd / 2.0, shadow_left, mono.sample_rate);
  detail::apply_ear_filter(right, itd / 2.0, shadow_right, mono.sample_rate);

  MultiChannelClip out;
  out.sample_rate = mono.sample_rate;
  out.samples.resize(2, mono.num_samples());
  out.samples.row(0) = detail::full_ifft_real(left).transpose();
  out.samples.row(1) = detail::full_ifft_real(right).transpose();
  return out;
}

/// GCC-PHAT delay of channel 1 relative to channel 0, with parabolic
/// sub-sample refinement, searched within +-max_lag_s.
inline double gcc_phat_tdoa(const MultiChannelClip& clip, double max_lag_s) {
  clip.validate();
  if (clip.num_channels() != 2) throw NotBinaural("gcc_phat_tdoa needs 2 channels");
  const Eigen::Index n = clip.num_samples();
  Eigen::Index n2 = 1;
  while (n2 < 2 * n) n2 *= 2;

  Eigen::VectorXd a = Eigen::VectorXd::Zero(n2), b = Eigen::VectorXd::Zero(n2);
  a.head(n) = clip.samples.row(0).transpose();
  b.head(n) = clip.samples.row(1).transpose();
  const Eigen::VectorXcd fa = detail::full_fft(a);
  const Eigen::VectorXcd fb = detail::full_fft(b);

  Eigen::VectorXcd g(n2);
  for (Eigen::Index k = 0; k < n2; ++k) {
    const std::complex<double> v = fb[k] * std::conj(fa[k]);
    const double mag = std::abs(v);
    g[k] = mag > 1e-20 ? v / mag : std::complex<double>(0.0, 0.0);
  }
  const Eigen::VectorXd corr = detail::full_ifft_real(g);

  const Eigen::Index max_lag = std::min<Eigen::Index>(
      n - 1, static_cast<Eigen::Index>(std::floor(max_lag_s * clip.sample_rate)));
  Eigen::Index best_lag = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index lag = -max_lag; lag <= max_lag; ++lag) {
    const double v = corr[(lag + n2) % n2];
    if (v > best) {
      best = v;
      best_lag = lag;
    }
  }

  const double cm = corr[(best_lag - 1 + n2) % n2];
  const double c0 = corr[(best_lag + n2) % n2];
  const double cp = corr[(best_lag + 1 + n2) % n2];
  const double denom = (cm + cp) - 2.0 * c0;
  double delta = 0.0;
  if (std::abs(denom) > 1e-18) delta = (cm - cp) / (2.0 * denom);
  if (!(delta >= -0.5 && delta <= 0.5)) delta = 0.0;
  return (static_cast<double>(best_lag) + delta) / clip.sample_rate;
}

/// Analytic binaural cues: energy-weighted per-bin ILD, circular-mean IPD
/// and a GCC-PHAT TDOA.
inline BinauralCues extract_cues(const MultiChannelClip& binaural, const StftConfig& cfg,
                                 double max_lag_s = 1e-3) {
  if (binaural.num_channels() != 2)
    throw NotBinaural("extract_cues needs exactly 2 channels, got " +
                      std::to_string(binaural.num_channels()));
  const Spectrogram spec = stft(binaural, cfg);
  const int fbins = spec.feature_bins();
  constexpr double eps = 1e-12;

  BinauralCues cues;
  cues.ild_db.setZero(fbins);
  cues.ipd_rad.setZero(fbins);
  for (int k = 0; k < fbins; ++k) {
    const Eigen::Index row = k + 1;  // skip DC
    double wsum = 0.0, ild = 0.0;
    std::complex<double> cross(0.0, 0.0);
    for (Eigen::Index f = 0; f < spec.num_frames(); ++f) {
      const std::complex<double> l = spec.channels[0](row, f);
      const std::complex<double> r = spec.channels[1](row, f);
      const double ml = std::abs(l), mr = std::abs(r);
      const double e = ml * ml + mr * mr;
      ild += e * 20.0 * (std::log10(ml + eps) - std::log10(mr + eps));
      wsum += e;
      cross += l * std::conj(r);
    }
    cues.ild_db[k] = wsum > 0.0 ? ild / wsum : 0.0;
    double ipd = cross == std::complex<double>(0.0, 0.0)
                     ? 0.0
                     : std::atan2(cross.imag(), cross.real());
    if (ipd == -kPi) ipd = kPi;
    cues.ipd_rad[k] = ipd;
  }
  cues.tdoa_s = gcc_phat_tdoa(binaural, max_lag_s);
  return cues;
}

/// Concatenated spatial audio feature: [doa(360) || ild(F) || ipd(F) || tdoa],
/// yielding 360 + 2F + 1 values (1385 under the defaults).
inline std::vector<double> fuse_audio_features(const DoaSpectrum& doa,
                                               const BinauralCues& cues) {
  std::vector<double> out;
  out.reserve(360 + cues.ild_db.size() + cues.ipd_rad.size() + 1);
  out.insert(out.end(), doa.values.begin(), doa.values.end());
  out.insert(out.end(), cues.ild_db.data(), cues.ild_db.data() + cues.ild_db.size());
  out.insert(out.end(), cues.ipd_rad.data(), cues.ipd_rad.data() + cues.ipd_rad.size());
  out.push_back(cues.tdoa_s);
  return out;
}

}  // namespace doapose
