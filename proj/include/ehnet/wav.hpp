// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_WAV_HPP_
#define EHNET_WAV_HPP_

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "ehnet/common.hpp"

namespace ehnet {

// Mono time-domain signal. Samples are dimensionless amplitudes, nominally
// in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  Index length() const { return static_cast<Index>(samples.size()); }
};

inline void validate(const Waveform& w) {
  if (w.sample_rate <= 0) {
    throw ConfigError("waveform sample rate must be positive");
  }
  if (w.samples.empty()) {
    throw ConfigError("waveform must contain at least one sample");
  }
  for (double s : w.samples) {
    if (!std::isfinite(s)) {
      throw NumericError("waveform contains non-finite samples");
    }
  }
}

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32le(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xFF));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xFF));
}

inline void put_u16le(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
}

}  // namespace detail

// Reads a mono PCM WAV file. 16-bit and 24-bit integer encodings are
// accepted and normalized to [-1, 1] (divisors 2^15 and 2^23).
inline Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open WAV file: " + path);
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw IoError("not a RIFF/WAVE file: " + path);
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t len = detail::read_u32le(bytes.data() + pos + 4);
    pos += 8;
    if (pos + len > bytes.size()) {
      throw IoError("truncated WAV chunk in " + path);
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) {
        throw IoError("malformed fmt chunk in " + path);
      }
      format = detail::read_u16le(bytes.data() + pos);
      channels = detail::read_u16le(bytes.data() + pos + 2);
      sample_rate = detail::read_u32le(bytes.data() + pos + 4);
      bits = detail::read_u16le(bytes.data() + pos + 14);
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + pos;
      data_len = len;
    }
    pos += len + (len & 1);  // chunks are word-aligned
  }

  if (format != 1) {
    throw IoError("only integer PCM WAV is supported: " + path);
  }
  if (channels != 1) {
    throw IoError("only mono WAV is supported: " + path);
  }
  if (bits != 16 && bits != 24) {
    throw IoError("only 16-bit and 24-bit PCM are supported: " + path);
  }
  if (data == nullptr || data_len == 0) {
    throw IoError("WAV file has no data chunk: " + path);
  }

  Waveform w;
  w.sample_rate = static_cast<int>(sample_rate);
  const std::size_t bytes_per = bits / 8;
  const std::size_t n = data_len / bytes_per;
  w.samples.resize(n);
  if (bits == 16) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::int16_t v =
          static_cast<std::int16_t>(data[2 * i] | (data[2 * i + 1] << 8));
      w.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::int32_t v = static_cast<std::int32_t>(data[3 * i]) |
                       (static_cast<std::int32_t>(data[3 * i + 1]) << 8) |
                       (static_cast<std::int32_t>(data[3 * i + 2]) << 16);
      if (v & 0x800000) {
        v |= ~0xFFFFFF;  // sign-extend
      }
      w.samples[i] = static_cast<double>(v) / 8388608.0;
    }
  }
  validate(w);
  return w;
}

// Writes mono PCM. Samples are clamped to [-1, 1] before quantization.
inline void write_wav(const std::string& path, const Waveform& w, int bits = 16) {
  if (bits != 16 && bits != 24) {
    throw ConfigError("WAV writer supports 16 or 24 bits");
  }
  validate(w);
  const std::uint32_t n = static_cast<std::uint32_t>(w.samples.size());
  const std::uint32_t bytes_per = static_cast<std::uint32_t>(bits / 8);
  const std::uint32_t data_len = n * bytes_per;

  std::vector<unsigned char> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  detail::put_u32le(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  detail::put_u32le(out, 16);
  detail::put_u16le(out, 1);  // PCM
  detail::put_u16le(out, 1);  // mono
  detail::put_u32le(out, static_cast<std::uint32_t>(w.sample_rate));
  detail::put_u32le(out, static_cast<std::uint32_t>(w.sample_rate) * bytes_per);
  detail::put_u16le(out, static_cast<std::uint16_t>(bytes_per));
  detail::put_u16le(out, static_cast<std::uint16_t>(bits));
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  detail::put_u32le(out, data_len);

  const double full = (bits == 16) ? 32768.0 : 8388608.0;
  const std::int32_t qmax = (bits == 16) ? 32767 : 8388607;
  for (double s : w.samples) {
    double x = s < -1.0 ? -1.0 : (s > 1.0 ? 1.0 : s);
    std::int32_t q = static_cast<std::int32_t>(std::lrint(x * full));
    q = q < -qmax - 1 ? -qmax - 1 : (q > qmax ? qmax : q);
    out.push_back(static_cast<unsigned char>(q & 0xFF));
    out.push_back(static_cast<unsigned char>((q >> 8) & 0xFF));
    if (bits == 24) {
      out.push_back(static_cast<unsigned char>((q >> 16) & 0xFF));
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw IoError("cannot open for writing: " + path);
  }
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) {
    throw IoError("write failed: " + path);
  }
}

}  // namespace ehnet

#endif  // EHNET_WAV_HPP_
