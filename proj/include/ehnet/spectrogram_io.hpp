// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_SPECTROGRAM_IO_HPP_
#define EHNET_SPECTROGRAM_IO_HPP_

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ehnet/common.hpp"

namespace ehnet {

// CSV dump: one row per frequency bin, one column per frame.
inline void write_spectrogram_csv(const std::string& path, const Mat<double>& mag) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  char buf[40];
  for (Index r = 0; r < mag.rows(); ++r) {
    for (Index c = 0; c < mag.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.9g", mag(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

// Binary dump: 8-byte header (d: u32 LE, t: u32 LE) followed by d*t
// little-endian f32 values in row-major order.
inline void write_spectrogram_bin(const std::string& path, const Mat<double>& mag) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  const std::uint32_t d = static_cast<std::uint32_t>(mag.rows());
  const std::uint32_t t = static_cast<std::uint32_t>(mag.cols());
  unsigned char hdr[8] = {
      static_cast<unsigned char>(d & 0xFF),  static_cast<unsigned char>((d >> 8) & 0xFF),
      static_cast<unsigned char>((d >> 16) & 0xFF), static_cast<unsigned char>((d >> 24) & 0xFF),
      static_cast<unsigned char>(t & 0xFF),  static_cast<unsigned char>((t >> 8) & 0xFF),
      static_cast<unsigned char>((t >> 16) & 0xFF), static_cast<unsigned char>((t >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(hdr), 8);
  std::vector<float> row(static_cast<std::size_t>(t));
  for (Index r = 0; r < mag.rows(); ++r) {
    for (Index c = 0; c < mag.cols(); ++c) {
      row[static_cast<std::size_t>(c)] = static_cast<float>(mag(r, c));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(float) * row.size()));
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

inline Mat<float> read_spectrogram_bin(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open: " + path);
  }
  unsigned char hdr[8];
  in.read(reinterpret_cast<char*>(hdr), 8);
  if (!in) {
    throw IoError("truncated spectrogram header: " + path);
  }
  const std::uint32_t d = static_cast<std::uint32_t>(hdr[0]) | (hdr[1] << 8) |
                          (hdr[2] << 16) | (static_cast<std::uint32_t>(hdr[3]) << 24);
  const std::uint32_t t = static_cast<std::uint32_t>(hdr[4]) | (hdr[5] << 8) |
                          (hdr[6] << 16) | (static_cast<std::uint32_t>(hdr[7]) << 24);
  Mat<float> mag(static_cast<Index>(d), static_cast<Index>(t));
  std::vector<float> row(t);
  for (std::uint32_t r = 0; r < d; ++r) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(sizeof(float) * t));
    if (!in) {
      throw IoError("truncated spectrogram data: " + path);
    }
    for (std::uint32_t c = 0; c < t; ++c) {
      mag(static_cast<Index>(r), static_cast<Index>(c)) = row[c];
    }
  }
  return mag;
}

}  // namespace ehnet

#endif  // EHNET_SPECTROGRAM_IO_HPP_
