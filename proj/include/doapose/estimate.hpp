#pragma once

#include <array>
#include <random>

#include "doapose/doa.hpp"
#include "doapose/sim.hpp"

// Audio-only relative-yaw estimation by circular alignment of DOA spectra,
// and score-level fusion with an external pose prior.

namespace doapose {

/// External belief over the relative rotation (the stand-in for a visual
/// branch). yaw_confidence_deg is the standard deviation of a
/// wrapped-Gaussian over yaw.
struct PosePrior {
  Rotation rotation;
  double yaw_confidence_deg = 1.0;

  void validate() const {
    if (!(yaw_confidence_deg > 0)) throw InvalidConfig("yaw_confidence_deg must be > 0");
  }
};

enum class EstimateMethod { audio_only, prior_only, fused };

inline const char* to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::audio_only: return "audio";
    case EstimateMethod::prior_only: return "prior";
    case EstimateMethod::fused: return "fused";
  }
  return "unknown";
}

/// Relative-yaw hypothesis scores. score_curve[j] is the score of candidate
/// yaw wrap_signed(j) degrees; yaw_deg is its argmax (ties to the smallest
/// |yaw|). flat_flag marks score curves whose raw relative range stayed
/// below 0.2, i.e. scenes without usable directional structure.
struct YawEstimate {
  double yaw_deg = 0.0;
  std::array<double, 360> score_curve{};
  EstimateMethod method = EstimateMethod::audio_only;
  bool flat_flag = false;
};

namespace detail {

inline std::array<double, 360> circular_alignment_raw(const DoaSpectrum& f_s,
                                                      const DoaSpectrum& f_t) {
  // Circular cross-correlation via FFT: score = idft(conj(F_s) . F_t).
  Eigen::VectorXd a(360), b(360);
  for (int i = 0; i < 360; ++i) {
    a[i] = f_s.values[i];
    b[i] = f_t.values[i];
  }
  const Eigen::VectorXcd fa = full_fft(a);
  const Eigen::VectorXcd fb = full_fft(b);
  Eigen::VectorXcd g(360);
  for (int k = 0; k < 360; ++k) g[k] = std::conj(fa[k]) * fb[k];
  const Eigen::VectorXd corr = full_ifft_real(g);
  std::array<double, 360> out{};
  for (int k = 0; k < 360; ++k) out[k] = corr[k];
  return out;
}

inline void minmax_normalize(std::array<double, 360>& v) {
  double lo = v[0], hi = v[0];
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double range = hi - lo;
  if (range < 1e-15) {
    v.fill(0.0);
    return;
  }
  for (double& x : v) x = (x - lo) / range;
}

/// True when (max - min) / max < 0.2, i.e. the curve normalized to peak 1
/// never dips below 0.8.
inline bool is_flat(const std::array<double, 360>& raw) {
  double lo = raw[0], hi = raw[0];
  for (double x : raw) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (hi <= 0.0) return true;
  return (hi - lo) / hi < 0.2;
}

/// Argmax with the documented tie-break: highest score, then smallest
/// absolute candidate yaw, then the positive one.
inline double argmax_yaw(const std::array<double, 360>& score) {
  double best_yaw = 0.0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < 360; ++j) {
    const double yaw = wrap_deg_signed(static_cast<double>(j));
    const double v = score[j];
    if (v > best_val ||
        (v == best_val && (std::abs(yaw) < std::abs(best_yaw) ||
                           (std::abs(yaw) == std::abs(best_yaw) && yaw > best_yaw)))) {
      best_val = v;
      best_yaw = yaw;
    }
  }
  return best_yaw;
}

}  // namespace detail

/// score[k] = sum_i f_s[i] * f_t[(i + k) mod 360], min-max normalized to
/// [0, 1]. Index k is the circular shift of the target spectrum relative to
/// the source; the camera yaw consistent with shift k is -k.
inline std::array<double, 360> circular_alignment(const DoaSpectrum& f_s,
                                                  const DoaSpectrum& f_t) {
  std::array<double, 360> score = detail::circular_alignment_raw(f_s, f_t);
  detail::minmax_normalize(score);
  return score;
}

/// DOA spectra of both clips, circular alignment, argmax. The score curve is
/// re-indexed from spectrum shift to candidate camera yaw (yaw = -shift).
inline YawEstimate estimate_yaw_audio(const CapturePair& pair, const ArrayGeometry& geom,
                                      const MusicConfig& cfg,
                                      const StftConfig& stft_cfg = StftConfig{}) {
  const DoaSpectrum f_s = music_spectrum(feature_spectrogram(pair.clip_source, stft_cfg),
                                         geom, cfg);
  const DoaSpectrum f_t = music_spectrum(feature_spectrogram(pair.clip_target, stft_cfg),
                                         geom, cfg);
  const std::array<double, 360> raw = detail::circular_alignment_raw(f_s, f_t);

  YawEstimate est;
  est.method = EstimateMethod::audio_only;
  est.flat_flag = detail::is_flat(raw);
  for (int j = 0; j < 360; ++j) est.score_curve[j] = raw[(360 - j) % 360];
  detail::minmax_normalize(est.score_curve);
  est.yaw_deg = detail::argmax_yaw(est.score_curve);
  return est;
}

/// fused[j] = weight * audio[j] + (1 - weight) * wrapped-Gaussian prior
/// kernel centered on the prior yaw. weight = 1 reproduces the audio argmax,
/// weight = 0 the prior mode (on the 1-degree grid).
inline YawEstimate fuse_with_prior(const YawEstimate& audio, const PosePrior& prior,
                                   double weight) {
  prior.validate();
  if (!(weight >= 0.0 && weight <= 1.0)) throw InvalidConfig("weight must be in [0, 1]");
  const double prior_yaw = yaw_of(prior.rotation);
  const double sigma = prior.yaw_confidence_deg;

  YawEstimate out;
  out.method = EstimateMethod::fused;
  out.flat_flag = audio.flat_flag;
  for (int j = 0; j < 360; ++j) {
    const double d = wrap_deg_signed(static_cast<double>(j) - prior_yaw) / sigma;
    out.score_curve[j] =
        weight * audio.score_curve[j] + (1.0 - weight) * std::exp(-0.5 * d * d);
  }
  out.yaw_deg = detail::argmax_yaw(out.score_curve);
  return out;
}

/// Prior centered on the truth yaw plus wrapped-Gaussian noise of the given
/// sigma; models a corrupted visual estimate. Deterministic per seed.
inline PosePrior corrupt_prior(const RelativePose& truth, double sigma_deg,
                               std::uint64_t seed) {
  if (!(sigma_deg >= 0)) throw InvalidConfig("sigma_deg must be >= 0");
  double noise = 0.0;
  if (sigma_deg > 0) {
    std::mt19937_64 rng(derive_seed(seed, 0x7072696fULL));
    std::normal_distribution<double> dist(0.0, sigma_deg);
    noise = dist(rng);
  }
  PosePrior prior;
  prior.rotation = Rotation::yaw_deg(wrap_deg_signed(yaw_of(truth.rotation) + noise));
  prior.yaw_confidence_deg = std::max(sigma_deg, 1e-3);
  return prior;
}

}  // namespace doapose
