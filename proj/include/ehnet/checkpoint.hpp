// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_CHECKPOINT_HPP_
#define EHNET_CHECKPOINT_HPP_

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ehnet/common.hpp"
#include "ehnet/model.hpp"
#include "ehnet/stft.hpp"

namespace ehnet {

// Binary checkpoint, little-endian throughout:
//   magic "EHN1", version u32, kv-text length u32, kv text (key=value per
//   line), then named tensors until EOF: name length u16, name bytes,
//   rank u8, dims u32 each, f32 data row-major.

namespace detail {

inline void put_u16(std::ostream& out, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v & 0xFF),
                              static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                              static_cast<unsigned char>((v >> 8) & 0xFF),
                              static_cast<unsigned char>((v >> 16) & 0xFF),
                              static_cast<unsigned char>((v >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline bool get_u16(std::istream& in, std::uint16_t* v) {
  unsigned char b[2];
  if (!in.read(reinterpret_cast<char*>(b), 2)) return false;
  *v = static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  return true;
}

inline bool get_u32(std::istream& in, std::uint32_t* v) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
  *v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
       (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

template <class S>
void put_tensor(std::ostream& out, const std::string& name, const Mat<S>& t) {
  put_u16(out, static_cast<std::uint16_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  const bool vector_like = t.cols() == 1;
  out.put(vector_like ? 1 : 2);
  put_u32(out, static_cast<std::uint32_t>(t.rows()));
  if (!vector_like) {
    put_u32(out, static_cast<std::uint32_t>(t.cols()));
  }
  std::vector<float> row(static_cast<std::size_t>(t.cols()));
  for (Index r = 0; r < t.rows(); ++r) {
    for (Index c = 0; c < t.cols(); ++c) {
      row[static_cast<std::size_t>(c)] = static_cast<float>(t(r, c));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(float) * row.size()));
  }
}

}  // namespace detail

template <class S>
struct Checkpoint {
  ModelParams<S> params;
  StftConfig stft;
  int sample_rate = 16000;
  Index epoch = 0;
};

template <class S>
void save_checkpoint(const Checkpoint<S>& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write checkpoint: " + path);
  }
  out.write("EHN1", 4);
  detail::put_u32(out, 1);  // version

  const Hyper& h = ckpt.params.hyper;
  std::ostringstream kv;
  kv << "bins=" << h.bins << '\n';
  kv << "kernel_count=" << h.kernel_count << '\n';
  kv << "kernel_height=" << h.kernel_height << '\n';
  kv << "kernel_width=" << h.kernel_width << '\n';
  kv << "freq_stride=" << h.freq_stride << '\n';
  kv << "hidden=";
  for (std::size_t i = 0; i < h.hidden.size(); ++i) {
    kv << (i ? "," : "") << h.hidden[i];
  }
  kv << '\n';
  kv << "input_scale=" << h.input_scale << '\n';
  kv << "epoch=" << ckpt.epoch << '\n';
  kv << "sample_rate=" << ckpt.sample_rate << '\n';
  kv << "fft_size=" << ckpt.stft.fft_size << '\n';
  kv << "hop_size=" << ckpt.stft.hop_size << '\n';
  kv << "window=" << ckpt.stft.window << '\n';
  kv << "bins_kept=" << ckpt.stft.bins_kept << '\n';
  const std::string kv_text = kv.str();
  detail::put_u32(out, static_cast<std::uint32_t>(kv_text.size()));
  out.write(kv_text.data(), static_cast<std::streamsize>(kv_text.size()));

  visit_tensors(
      [&out](const char* name, const Mat<S>& t) { detail::put_tensor(out, name, t); },
      ckpt.params);
  if (!out) {
    throw IoError("checkpoint write failed: " + path);
  }
}

template <class S>
Checkpoint<S> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open checkpoint: " + path);
  }
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "EHN1", 4) != 0) {
    throw IoError("not an EHN1 checkpoint: " + path);
  }
  std::uint32_t version = 0, kv_len = 0;
  if (!detail::get_u32(in, &version) || version != 1) {
    throw IoError("unsupported checkpoint version in " + path);
  }
  if (!detail::get_u32(in, &kv_len)) {
    throw IoError("truncated checkpoint header: " + path);
  }
  std::string kv_text(kv_len, '\0');
  if (!in.read(kv_text.data(), kv_len)) {
    throw IoError("truncated checkpoint header: " + path);
  }

  std::map<std::string, std::string> kv;
  std::istringstream kv_in(kv_text);
  std::string line;
  while (std::getline(kv_in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  const auto need = [&kv, &path](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      throw IoError("checkpoint is missing key '" + key + "': " + path);
    }
    return it->second;
  };

  Checkpoint<S> ckpt;
  Hyper h;
  try {
    h.bins = std::stoll(need("bins"));
    h.kernel_count = std::stoll(need("kernel_count"));
    h.kernel_height = std::stoll(need("kernel_height"));
    h.kernel_width = std::stoll(need("kernel_width"));
    h.freq_stride = std::stoll(need("freq_stride"));
    h.hidden.clear();
    std::istringstream hs(need("hidden"));
    std::string tok;
    while (std::getline(hs, tok, ',')) {
      h.hidden.push_back(std::stoll(tok));
    }
    h.input_scale = std::stod(need("input_scale"));
    ckpt.epoch = std::stoll(need("epoch"));
    ckpt.sample_rate = std::stoi(need("sample_rate"));
    ckpt.stft.fft_size = std::stoll(need("fft_size"));
    ckpt.stft.hop_size = std::stoll(need("hop_size"));
    ckpt.stft.window = need("window");
    ckpt.stft.bins_kept = std::stoll(need("bins_kept"));
  } catch (const IoError&) {
    throw;
  } catch (const std::exception&) {
    throw IoError("malformed checkpoint header value in " + path);
  }
  validate_hyper(h);  // rejects inconsistent dimension chains
  ckpt.params = zero_params<S>(h);

  std::map<std::string, Mat<S>*> expected;
  visit_tensors([&expected](const char* name, Mat<S>& t) { expected[name] = &t; },
                ckpt.params);

  std::set<std::string> seen;
  std::uint16_t name_len = 0;
  while (detail::get_u16(in, &name_len)) {
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) {
      throw IoError("truncated tensor name in " + path);
    }
    int rank = in.get();
    if (rank != 1 && rank != 2) {
      throw IoError("unsupported tensor rank in " + path);
    }
    std::uint32_t rows = 0, cols = 1;
    if (!detail::get_u32(in, &rows) || (rank == 2 && !detail::get_u32(in, &cols))) {
      throw IoError("truncated tensor dims in " + path);
    }
    const auto it = expected.find(name);
    if (it == expected.end()) {
      throw IoError("unexpected tensor '" + name + "' in " + path);
    }
    Mat<S>& dst = *it->second;
    if (dst.rows() != static_cast<Index>(rows) || dst.cols() != static_cast<Index>(cols)) {
      throw IoError("tensor '" + name + "' does not match the dimension chain in " + path);
    }
    if (!seen.insert(name).second) {
      throw IoError("duplicate tensor '" + name + "' in " + path);
    }
    std::vector<float> row(cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
      if (!in.read(reinterpret_cast<char*>(row.data()),
                   static_cast<std::streamsize>(sizeof(float) * cols))) {
        throw IoError("truncated tensor data in " + path);
      }
      for (std::uint32_t c = 0; c < cols; ++c) {
        dst(static_cast<Index>(r), static_cast<Index>(c)) = static_cast<S>(row[c]);
      }
    }
  }
  if (seen.size() != expected.size()) {
    throw IoError("checkpoint is missing tensors: " + path);
  }
  return ckpt;
}

}  // namespace ehnet

#endif  // EHNET_CHECKPOINT_HPP_
