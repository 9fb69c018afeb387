#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doapose/dsp.hpp"

// RIFF/WAVE reader and writer: PCM 16-bit and IEEE float 32-bit, up to 16
// channels. No resampling anywhere; a caller that needs a specific rate
// checks and fails.

namespace doapose {

enum class WavFormat { pcm16, float32 };

inline constexpr int kMaxWavChannels = 16;

namespace detail {

inline void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_u16(std::string& s, std::uint16_t v) {
  for (int i = 0; i < 2; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct ByteReader {
  const std::uint8_t* p;
  size_t n;
  size_t pos = 0;

  bool need(size_t k) const { return pos + k <= n; }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[pos++]) << (8 * i);
    return v;
  }
  std::uint16_t u16() {
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(p[pos++]) << (8 * i);
    return v;
  }
};

}  // namespace detail

inline void write_wav(const std::filesystem::path& path, const MultiChannelClip& clip,
                      WavFormat format = WavFormat::float32) {
  clip.validate();
  const int channels = clip.num_channels();
  if (channels > kMaxWavChannels)
    throw InvalidConfig("WAV writer supports at most 16 channels");
  const Eigen::Index frames = clip.num_samples();
  const std::uint16_t bytes_per_sample = format == WavFormat::pcm16 ? 2 : 4;
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bytes_per_sample);
  const std::uint32_t sample_rate = static_cast<std::uint32_t>(clip.sample_rate);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames) * block_align;

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  detail::put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  detail::put_u32(out, 16);
  detail::put_u16(out, format == WavFormat::pcm16 ? 1 : 3);
  detail::put_u16(out, static_cast<std::uint16_t>(channels));
  detail::put_u32(out, sample_rate);
  detail::put_u32(out, sample_rate * block_align);
  detail::put_u16(out, block_align);
  detail::put_u16(out, static_cast<std::uint16_t>(8 * bytes_per_sample));
  out += "data";
  detail::put_u32(out, data_bytes);

  for (Eigen::Index i = 0; i < frames; ++i) {
    for (int c = 0; c < channels; ++c) {
      const double v = clip.samples(c, i);
      if (format == WavFormat::pcm16) {
        const double clamped = std::clamp(v, -1.0, 1.0);
        const std::int16_t q = static_cast<std::int16_t>(std::lrint(clamped * 32767.0));
        detail::put_u16(out, static_cast<std::uint16_t>(q));
      } else {
        const float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        detail::put_u32(out, bits);
      }
    }
  }

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("short write to " + path.string());
}

inline MultiChannelClip read_wav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string() + " for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  detail::ByteReader r{bytes.data(), bytes.size()};

  auto fail = [&](const std::string& why) -> void {
    throw FileParseError(path.string() + ": " + why);
  };
  if (!r.need(12)) fail("truncated RIFF header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    fail("not a RIFF/WAVE file");
  r.pos = 12;

  std::uint16_t fmt_tag = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  bool have_fmt = false;
  size_t data_pos = 0, data_len = 0;

  while (r.need(8)) {
    char id[4];
    std::memcpy(id, bytes.data() + r.pos, 4);
    r.pos += 4;
    const std::uint32_t len = r.u32();
    if (!r.need(len)) fail("truncated chunk");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) fail("fmt chunk too short");
      const size_t start = r.pos;
      fmt_tag = r.u16();
      channels = r.u16();
      sample_rate = r.u32();
      r.u32();
      r.u16();
      bits = r.u16();
      r.pos = start + len;
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_pos = r.pos;
      data_len = len;
      r.pos += len;
    } else {
      r.pos += len;
    }
    if (len % 2 == 1 && r.need(1)) ++r.pos;  // chunk padding
  }

  if (!have_fmt) fail("missing fmt chunk");
  if (data_pos == 0 && data_len == 0) fail("missing data chunk");
  if (channels < 1 || channels > kMaxWavChannels)
    fail("unsupported channel count " + std::to_string(channels));

  const bool pcm16 = fmt_tag == 1 && bits == 16;
  const bool f32 = fmt_tag == 3 && bits == 32;
  if (!pcm16 && !f32) fail("unsupported sample format (need PCM16 or float32)");

  const int bytes_per_sample = pcm16 ? 2 : 4;
  const size_t frame_bytes = static_cast<size_t>(channels) * bytes_per_sample;
  const size_t frames = data_len / frame_bytes;

  MultiChannelClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(channels, static_cast<Eigen::Index>(frames));
  const std::uint8_t* d = bytes.data() + data_pos;
  for (size_t i = 0; i < frames; ++i) {
    for (int c = 0; c < channels; ++c) {
      const std::uint8_t* s = d + i * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        std::int16_t q;
        std::memcpy(&q, s, 2);
        clip.samples(c, static_cast<Eigen::Index>(i)) = q / 32767.0;
      } else {
        float f;
        std::memcpy(&f, s, 4);
        clip.samples(c, static_cast<Eigen::Index>(i)) = f;
      }
    }
  }
  return clip;
}

}  // namespace doapose
