// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_CORPUS_HPP_
#define EHNET_CORPUS_HPP_

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ehnet/common.hpp"
#include "ehnet/mixing.hpp"
#include "ehnet/rng.hpp"
#include "ehnet/wav.hpp"

namespace ehnet {

// One synthetic recording: clean source, additive noise, optional room
// impulse response, target SNR (dB, +inf disables mixing), per-record seed
// and an output level offset applied to both signals after mixing.
struct MixSpec {
  std::string id;
  std::string clean_path;
  std::string noise_path;
  std::string rir_path;  // empty = none
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  double gain_db = 0.0;
};

struct DatasetManifest {
  std::string split = "train";
  int sample_rate = 16000;
  std::string rng_name = CounterRng::name();
  std::vector<MixSpec> specs;
  std::string base_dir;  // directory that relative source paths resolve against
};

namespace detail {

inline std::string resolve_path(const std::string& base, const std::string& path) {
  if (path.empty() || std::filesystem::path(path).is_absolute() || base.empty()) {
    return path;
  }
  return (std::filesystem::path(base) / path).string();
}

inline double parse_snr_field(const std::string& field) {
  if (field == "inf" || field == "+inf") {
    return std::numeric_limits<double>::infinity();
  }
  return std::stod(field);
}

}  // namespace detail

// Tab-separated records under a '#'-prefixed header:
//   id  clean  noise  rir('-' for none)  snr_db  seed  gain_db
inline DatasetManifest parse_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open manifest: " + path);
  }
  DatasetManifest m;
  m.base_dir = std::filesystem::path(path).parent_path().string();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        std::string value = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
          s.erase(0, s.find_first_not_of(" \t"));
          s.erase(s.find_last_not_of(" \t") + 1);
        };
        trim(key);
        trim(value);
        if (key == "split") m.split = value;
        if (key == "sample_rate") m.sample_rate = std::stoi(value);
        if (key == "rng") m.rng_name = value;
      }
      continue;
    }
    std::istringstream fields(line);
    std::string id, clean, noise, rir, snr, seed, gain;
    if (!std::getline(fields, id, '\t') || !std::getline(fields, clean, '\t') ||
        !std::getline(fields, noise, '\t') || !std::getline(fields, rir, '\t') ||
        !std::getline(fields, snr, '\t') || !std::getline(fields, seed, '\t')) {
      throw IoError("malformed manifest record at line " + std::to_string(lineno) +
                    " of " + path);
    }
    std::getline(fields, gain, '\t');
    MixSpec spec;
    spec.id = id;
    spec.clean_path = clean;
    spec.noise_path = noise;
    spec.rir_path = rir == "-" ? "" : rir;
    try {
      spec.snr_db = detail::parse_snr_field(snr);
      spec.seed = std::stoull(seed);
      spec.gain_db = gain.empty() ? 0.0 : std::stod(gain);
    } catch (const std::exception&) {
      throw IoError("malformed numeric field at line " + std::to_string(lineno) + " of " +
                    path);
    }
    m.specs.push_back(std::move(spec));
  }
  if (m.rng_name != CounterRng::name()) {
    throw ConfigError("manifest requires rng '" + m.rng_name + "'; this build provides '" +
                      CounterRng::name() + "'");
  }
  return m;
}

inline void write_manifest(const DatasetManifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot write manifest: " + path);
  }
  out << "# ehnet-manifest v1\n";
  out << "# split = " << m.split << '\n';
  out << "# sample_rate = " << m.sample_rate << '\n';
  out << "# rng = " << m.rng_name << '\n';
  char num[64];
  for (const auto& s : m.specs) {
    out << s.id << '\t' << s.clean_path << '\t' << s.noise_path << '\t'
        << (s.rir_path.empty() ? "-" : s.rir_path) << '\t';
    if (s.snr_db == std::numeric_limits<double>::infinity()) {
      out << "inf";
    } else {
      std::snprintf(num, sizeof(num), "%.6g", s.snr_db);
      out << num;
    }
    std::snprintf(num, sizeof(num), "%.6g", s.gain_db);
    out << '\t' << s.seed << '\t' << num << '\n';
  }
}

struct IndexEntry {
  std::string id;
  std::string noisy_path;
  std::string clean_path;
  double achieved_snr_db = 0.0;
  bool ok = false;
  std::string error;
};

struct CorpusResult {
  std::vector<IndexEntry> entries;  // manifest order, including skipped records
  std::size_t written = 0;
  std::size_t skipped = 0;
};

namespace detail {

// Renders one record: clean -> optional RIR -> SNR mix -> gain. The clean
// target goes through the same RIR path so the pair stays aligned.
inline IndexEntry render_record(const MixSpec& spec, const DatasetManifest& m,
                                const std::string& out_dir) {
  IndexEntry entry;
  entry.id = spec.id;
  try {
    Waveform clean = read_wav(detail::resolve_path(m.base_dir, spec.clean_path));
    if (clean.sample_rate != m.sample_rate) {
      throw DataError("clean sample rate does not match the manifest");
    }
    if (!spec.rir_path.empty()) {
      const Waveform rir = read_wav(detail::resolve_path(m.base_dir, spec.rir_path));
      clean = apply_rir(clean, rir);
    }
    Waveform noise = read_wav(detail::resolve_path(m.base_dir, spec.noise_path));
    if (noise.sample_rate != m.sample_rate) {
      throw DataError("noise sample rate does not match the manifest");
    }
    CounterRng rng(spec.seed);
    noise = fit_noise_to_length(noise, clean.length(), rng);
    auto [noisy, scaled_noise] = mix_at_snr(clean, noise, spec.snr_db);
    if (spec.gain_db != 0.0) {
      const double g = std::pow(10.0, spec.gain_db / 20.0);
      for (auto& s : noisy.samples) s *= g;
      for (auto& s : clean.samples) s *= g;
    }

    const auto dir = std::filesystem::path(out_dir);
    entry.noisy_path = (dir / (spec.id + ".noisy.wav")).string();
    entry.clean_path = (dir / (spec.id + ".clean.wav")).string();
    write_wav(entry.noisy_path, noisy);
    write_wav(entry.clean_path, clean);

    // re-measure from disk so the recorded SNR reflects quantization
    const Waveform q_noisy = read_wav(entry.noisy_path);
    const Waveform q_clean = read_wav(entry.clean_path);
    double residual = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < q_clean.samples.size(); ++i) {
      const double d = q_noisy.samples[i] - q_clean.samples[i];
      residual += d * d;
      ref += q_clean.samples[i] * q_clean.samples[i];
    }
    entry.achieved_snr_db = residual > 0.0
                                ? 10.0 * std::log10(ref / residual)
                                : std::numeric_limits<double>::infinity();
    entry.ok = true;
  } catch (const std::exception& e) {
    entry.ok = false;
    entry.error = e.what();
  }
  return entry;
}

}  // namespace detail

// Renders every record of the manifest into out_dir and returns the index.
// Invalid records are skipped with their diagnostic kept; more than 10%
// skips abort the run. Rendering is parallel per record; results keep
// manifest order.
inline CorpusResult generate_corpus(const DatasetManifest& m, const std::string& out_dir,
                                    unsigned workers = 1) {
  if (m.specs.empty()) {
    throw DataError("manifest contains no records");
  }
  std::filesystem::create_directories(out_dir);
  CorpusResult result;
  result.entries.resize(m.specs.size());

  workers = std::max(1u, workers);
  workers = std::min<unsigned>(workers, static_cast<unsigned>(m.specs.size()));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < m.specs.size(); i += workers) {
        result.entries[i] = detail::render_record(m.specs[i], m, out_dir);
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }

  for (const auto& e : result.entries) {
    if (e.ok) {
      ++result.written;
    } else {
      ++result.skipped;
    }
  }
  if (result.skipped * 10 > m.specs.size()) {
    throw DataError("more than 10% of manifest records failed (" +
                    std::to_string(result.skipped) + " of " +
                    std::to_string(m.specs.size()) + ")");
  }
  return result;
}

// Index file: maps pair id -> (noisy path, clean path, achieved SNR dB).
inline void write_index(const CorpusResult& corpus, const DatasetManifest& m,
                        const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot write index: " + path);
  }
  out << "# ehnet-index v1\n";
  out << "# split = " << m.split << '\n';
  out << "# sample_rate = " << m.sample_rate << '\n';
  out << "# rng = " << m.rng_name << '\n';
  char num[32];
  for (const auto& e : corpus.entries) {
    if (!e.ok) continue;
    std::snprintf(num, sizeof(num), "%.4f", e.achieved_snr_db);
    out << e.id << '\t' << e.noisy_path << '\t' << e.clean_path << '\t' << num << '\n';
  }
}

struct IndexFile {
  std::string split;
  int sample_rate = 16000;
  std::vector<IndexEntry> entries;
};

inline IndexFile read_index(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open index: " + path);
  }
  IndexFile idx;
  const std::string base = std::filesystem::path(path).parent_path().string();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos && line.find("sample_rate") != std::string::npos) {
        idx.sample_rate = std::stoi(line.substr(eq + 1));
      }
      if (eq != std::string::npos && line.find("split") != std::string::npos) {
        std::string v = line.substr(eq + 1);
        v.erase(0, v.find_first_not_of(" \t"));
        idx.split = v;
      }
      continue;
    }
    std::istringstream fields(line);
    IndexEntry e;
    std::string snr;
    if (!std::getline(fields, e.id, '\t') || !std::getline(fields, e.noisy_path, '\t') ||
        !std::getline(fields, e.clean_path, '\t') || !std::getline(fields, snr, '\t')) {
      throw IoError("malformed index record in " + path);
    }
    e.noisy_path = detail::resolve_path(base, e.noisy_path);
    e.clean_path = detail::resolve_path(base, e.clean_path);
    e.achieved_snr_db = std::stod(snr);
    e.ok = true;
    idx.entries.push_back(std::move(e));
  }
  return idx;
}

// File-name overlap between the noise lists of two manifests; an unseen
// split must report an empty intersection against its training manifest.
inline std::vector<std::string> noise_overlap(const DatasetManifest& a,
                                              const DatasetManifest& b) {
  std::set<std::string> names;
  for (const auto& s : a.specs) {
    names.insert(std::filesystem::path(s.noise_path).filename().string());
  }
  std::set<std::string> hits;
  for (const auto& s : b.specs) {
    const std::string name = std::filesystem::path(s.noise_path).filename().string();
    if (names.count(name)) {
      hits.insert(name);
    }
  }
  return {hits.begin(), hits.end()};
}

}  // namespace ehnet

#endif  // EHNET_CORPUS_HPP_
