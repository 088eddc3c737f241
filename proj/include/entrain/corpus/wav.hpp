#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "entrain/corpus/audio.hpp"
#include "entrain/error.hpp"

namespace entrain::corpus {

namespace detail {

inline std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace detail

/// Decodes a RIFF/WAVE byte buffer. Accepts mono PCM at 8/16/24/32-bit
/// integer or 32-bit IEEE float, including WAVE_FORMAT_EXTENSIBLE headers.
inline AudioTrack decode_wav(const std::vector<unsigned char>& bytes, const std::string& speaker_id = {}) {
  const auto fail = [](const std::string& why) { throw FormatError("wav: " + why); };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    fail("missing RIFF/WAVE header");
  }
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    const std::uint32_t len = detail::read_u32(hdr + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (len < 16 || body + len > bytes.size()) fail("truncated fmt chunk");
      const unsigned char* f = bytes.data() + body;
      format = detail::read_u16(f);
      channels = detail::read_u16(f + 2);
      rate = detail::read_u32(f + 4);
      block_align = detail::read_u16(f + 12);
      bits = detail::read_u16(f + 14);
      if (format == 0xFFFE) {
        if (len < 40) fail("truncated extensible fmt chunk");
        format = detail::read_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = std::min<std::size_t>(len, bytes.size() - body);
      break;
    }
    pos = body + len + (len & 1u);
  }
  if (!have_fmt) fail("missing fmt chunk");
  if (data == nullptr) fail("missing data chunk");
  if (channels != 1) throw ValidationError("wav: mono required (got " + std::to_string(channels) + " channels)");
  if (rate == 0) fail("zero sample rate");
  const bool is_int = format == 1 && (bits == 8 || bits == 16 || bits == 24 || bits == 32);
  const bool is_float = format == 3 && bits == 32;
  if (!is_int && !is_float) {
    fail("unsupported encoding (format " + std::to_string(format) + ", " + std::to_string(bits) + " bits)");
  }
  const std::size_t width = bits / 8;
  if (block_align != width) fail("inconsistent block alignment");

  AudioTrack track;
  track.sample_rate = static_cast<int>(rate);
  track.speaker_id = speaker_id;
  const std::size_t n = data_len / width;
  track.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* p = data + i * width;
    double v = 0.0;
    if (is_float) {
      float f;
      std::memcpy(&f, p, 4);
      v = f;
    } else if (bits == 8) {
      v = (static_cast<int>(p[0]) - 128) / 128.0;
    } else if (bits == 16) {
      v = static_cast<std::int16_t>(detail::read_u16(p)) / 32768.0;
    } else if (bits == 24) {
      std::int32_t s = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (s & 0x800000) s -= 0x1000000;
      v = s / 8388608.0;
    } else {
      v = static_cast<std::int32_t>(detail::read_u32(p)) / 2147483648.0;
    }
    track.samples[i] = v;
  }
  return track;
}

inline AudioTrack read_wav(const std::filesystem::path& path, const std::string& speaker_id = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("wav: cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes, speaker_id);
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + " in " + path.string());
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + " in " + path.string());
  }
}

enum class WavEncoding { Pcm16, Float32 };

inline std::string encode_wav(const std::vector<double>& samples, int sample_rate,
                              WavEncoding enc = WavEncoding::Pcm16, int channels = 1) {
  const std::uint16_t bits = enc == WavEncoding::Pcm16 ? 16 : 32;
  const std::uint16_t width = bits / 8;
  const auto data_len = static_cast<std::uint32_t>(samples.size() * width);
  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  detail::put_u32(out, 36 + data_len);
  out += "WAVEfmt ";
  detail::put_u32(out, 16);
  detail::put_u16(out, enc == WavEncoding::Pcm16 ? 1 : 3);
  detail::put_u16(out, static_cast<std::uint16_t>(channels));
  detail::put_u32(out, static_cast<std::uint32_t>(sample_rate));
  detail::put_u32(out, static_cast<std::uint32_t>(sample_rate * width * channels));
  detail::put_u16(out, static_cast<std::uint16_t>(width * channels));
  detail::put_u16(out, bits);
  out += "data";
  detail::put_u32(out, data_len);
  for (double v : samples) {
    if (enc == WavEncoding::Pcm16) {
      const double c = std::clamp(v, -1.0, 32767.0 / 32768.0);
      detail::put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(c * 32768.0))));
    } else {
      const float f = static_cast<float>(v);
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      detail::put_u32(out, u);
    }
  }
  return out;
}

inline void write_wav(const std::filesystem::path& path, const std::vector<double>& samples, int sample_rate,
                      WavEncoding enc = WavEncoding::Pcm16) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("wav: cannot write " + path.string());
  const auto bytes = encode_wav(samples, sample_rate, enc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace entrain::corpus
