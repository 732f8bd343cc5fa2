#pragma once

// Minimal RIFF/WAVE codec for 16-bit PCM. Multi-channel input is downmixed to mono.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "cibnet/error.hpp"

namespace cibnet {

struct WavAudio {
  std::uint32_t sample_rate = 0;
  std::uint16_t channels = 0;
  std::vector<float> samples;  // mono, [-1, 1)
};

namespace detail {

inline std::uint32_t le32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}
inline std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}
inline void put_le32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}
inline void put_le16(std::ostream& out, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace detail

inline WavAudio read_wav(std::istream& in) {
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw DataError("not a RIFF/WAVE stream");
  }
  WavAudio audio;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = detail::le32(&bytes[pos + 4]);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw DataError("truncated WAV chunk");
    if (std::memcmp(&bytes[pos], "fmt ", 4) == 0) {
      if (size < 16) throw DataError("short fmt chunk");
      const std::uint16_t format = detail::le16(&bytes[body]);
      audio.channels = detail::le16(&bytes[body + 2]);
      audio.sample_rate = detail::le32(&bytes[body + 4]);
      bits = detail::le16(&bytes[body + 14]);
      if (format != 1 || bits != 16) throw DataError("only 16-bit PCM WAV is supported");
      if (audio.channels == 0 || audio.sample_rate == 0) throw DataError("invalid WAV format header");
      have_fmt = true;
    } else if (std::memcmp(&bytes[pos], "data", 4) == 0) {
      if (!have_fmt) throw DataError("WAV data chunk before fmt chunk");
      const std::size_t frames = size / (2u * audio.channels);
      audio.samples.resize(frames);
      for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::size_t c = 0; c < audio.channels; ++c) {
          const auto raw = static_cast<std::int16_t>(detail::le16(&bytes[body + 2 * (f * audio.channels + c)]));
          acc += raw / 32768.0;
        }
        audio.samples[f] = static_cast<float>(acc / audio.channels);
      }
      return audio;
    }
    pos = body + size + (size & 1u);
  }
  throw DataError("WAV stream has no data chunk");
}

inline WavAudio read_wav_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read_wav(in);
}

/// Writes mono 16-bit PCM; samples are clipped to [-1, 1].
inline void write_wav(std::ostream& out, const std::vector<float>& samples, std::uint32_t sample_rate) {
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  out.write("RIFF", 4);
  detail::put_le32(out, 36 + data_bytes);
  out.write("WAVEfmt ", 8);
  detail::put_le32(out, 16);
  detail::put_le16(out, 1);
  detail::put_le16(out, 1);
  detail::put_le32(out, sample_rate);
  detail::put_le32(out, sample_rate * 2);
  detail::put_le16(out, 2);
  detail::put_le16(out, 16);
  out.write("data", 4);
  detail::put_le32(out, data_bytes);
  for (float s : samples) {
    const double clipped = std::clamp(static_cast<double>(s), -1.0, 1.0);
    const auto v = static_cast<std::int16_t>(std::lround(clipped * 32767.0));
    detail::put_le16(out, static_cast<std::uint16_t>(v));
  }
}

}  // namespace cibnet
