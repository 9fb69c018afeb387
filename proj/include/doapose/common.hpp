#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace doapose {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfSound = 343.0;   // m/s, dry air ~20 C
inline constexpr double kDefaultSampleRate = 48000.0;

// Bumped on breaking changes to any on-disk format. Readers accept any
// minor revision of the same major version.
inline constexpr const char* kFormatVersion = "1.0";

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wrap an angle in degrees to [-180, 180).
inline double wrap_deg_signed(double deg) {
  double w = std::fmod(deg + 180.0, 360.0);
  if (w < 0.0) w += 360.0;
  return w - 180.0;
}

/// Wrap an angle in degrees to [0, 360).
inline double wrap_deg_unsigned(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  return w;
}

/// Absolute circular distance between two angles, in [0, 180].
inline double wrap_abs_deg(double deg) { return std::abs(wrap_deg_signed(deg)); }

// ---------------------------------------------------------------------------
// Error taxonomy. Names follow the per-operation error contracts.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define DOAPOSE_DEFINE_ERROR(Name)                                      \
  struct Name : Error {                                                 \
    explicit Name(const std::string& msg) : Error(#Name ": " + msg) {}  \
  }

DOAPOSE_DEFINE_ERROR(EmptyInput);
DOAPOSE_DEFINE_ERROR(GimbalDegenerate);
DOAPOSE_DEFINE_ERROR(ClipTooShort);
DOAPOSE_DEFINE_ERROR(NonInvertibleConfig);
DOAPOSE_DEFINE_ERROR(NotBinaural);
DOAPOSE_DEFINE_ERROR(NotMono);
DOAPOSE_DEFINE_ERROR(ShapeMismatch);
DOAPOSE_DEFINE_ERROR(TooFewChannels);
DOAPOSE_DEFINE_ERROR(EmptyBand);
DOAPOSE_DEFINE_ERROR(InvalidConfig);
DOAPOSE_DEFINE_ERROR(SourceInsideArray);
DOAPOSE_DEFINE_ERROR(NonPositiveTau);
DOAPOSE_DEFINE_ERROR(IdMismatch);
DOAPOSE_DEFINE_ERROR(IoError);
DOAPOSE_DEFINE_ERROR(SchemaError);
DOAPOSE_DEFINE_ERROR(FileParseError);
DOAPOSE_DEFINE_ERROR(IncompatibleRuns);

#undef DOAPOSE_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Deterministic RNG stream keying. splitmix64 is the usual mixer for turning
// (seed, index, role) tuples into independent engine seeds.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

}  // namespace doapose
