// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_CONFIG_HPP_
#define EHNET_CONFIG_HPP_

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ehnet/adadelta.hpp"
#include "ehnet/model.hpp"
#include "ehnet/stft.hpp"
#include "ehnet/train.hpp"

namespace ehnet {

// Flat "key = value" text with '#' comments. Unknown keys are rejected so
// typos surface instead of silently using defaults.
class Config {
 public:
  Config() = default;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  long long get_int(const std::string& key, long long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return std::stoll(it->second);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not an integer: " + it->second);
    }
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not a number: " + it->second);
    }
  }

  const std::map<std::string, std::string>& values() const { return values_; }

  static Config from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
      throw IoError("cannot open config: " + path);
    }
    Config cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) {
        line = line.substr(0, hash);
      }
      const auto trim = [](std::string& s) {
        s.erase(0, s.find_first_not_of(" \t\r"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
      };
      trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(lineno) +
                          " is not 'key = value': " + path);
      }
      std::string key = line.substr(0, eq);
      std::string value = line.substr(eq + 1);
      trim(key);
      trim(value);
      cfg.set(key, value);
    }
    return cfg;
  }

 private:
  std::map<std::string, std::string> values_;
};

inline const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "model.bins",         "model.kernels",     "model.kernel_height",
      "model.kernel_width", "model.freq_stride", "model.hidden",
      "model.input_scale",  "stft.fft_size",     "stft.hop_size",
      "stft.window",        "stft.bins_kept",    "audio.sample_rate",
      "train.epochs",       "train.batch_size",  "train.crop_frames",
      "train.seed",         "train.patience",    "train.val_every",
      "train.rho",          "train.epsilon",     "train.schedule",
      "data.train_index",   "data.val_index",    "out.dir"};
  return keys;
}

inline void reject_unknown_keys(const Config& cfg) {
  const auto& known = known_config_keys();
  for (const auto& [key, value] : cfg.values()) {
    bool ok = false;
    for (const auto& k : known) {
      if (k == key) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ConfigError("unknown config key: " + key);
    }
  }
}

// "0:1.0,60:0.1,120:0.01"
inline LrSchedule parse_schedule(const std::string& text) {
  LrSchedule sched;
  sched.points.clear();
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("schedule entries must be epoch:multiplier, got: " + tok);
    }
    try {
      sched.points.emplace_back(std::stoll(tok.substr(0, colon)),
                                std::stod(tok.substr(colon + 1)));
    } catch (const std::exception&) {
      throw ConfigError("malformed schedule entry: " + tok);
    }
  }
  if (sched.points.empty()) {
    throw ConfigError("schedule must contain at least one entry");
  }
  for (std::size_t i = 1; i < sched.points.size(); ++i) {
    if (sched.points[i].first <= sched.points[i - 1].first) {
      throw ConfigError("schedule epochs must be strictly increasing");
    }
  }
  return sched;
}

inline std::vector<Index> parse_hidden(const std::string& text) {
  std::vector<Index> hidden;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      hidden.push_back(std::stoll(tok));
    } catch (const std::exception&) {
      throw ConfigError("malformed hidden size: " + tok);
    }
  }
  return hidden;
}

struct ResolvedConfig {
  Hyper hyper;
  StftConfig stft;
  int sample_rate = 16000;
  TrainConfig train;
  std::string train_index;
  std::string val_index;
  std::string out_dir;
};

// Applies the file/flag values over the built-in defaults (the full-scale
// architecture and the 200-epoch stepped schedule).
inline ResolvedConfig resolve_config(const Config& cfg) {
  reject_unknown_keys(cfg);
  ResolvedConfig r;
  r.hyper.bins = cfg.get_int("model.bins", 256);
  r.hyper.kernel_count = cfg.get_int("model.kernels", 256);
  r.hyper.kernel_height = cfg.get_int("model.kernel_height", 32);
  r.hyper.kernel_width = cfg.get_int("model.kernel_width", 11);
  r.hyper.freq_stride = cfg.get_int("model.freq_stride", 16);
  r.hyper.hidden = parse_hidden(cfg.get("model.hidden", "1024,1024"));
  r.hyper.input_scale = cfg.get_double("model.input_scale", 1.0);

  r.stft.fft_size = cfg.get_int("stft.fft_size", 512);
  r.stft.hop_size = cfg.get_int("stft.hop_size", 256);
  r.stft.window = cfg.get("stft.window", "hann");
  r.stft.bins_kept = cfg.get_int("stft.bins_kept", 256);
  r.sample_rate = static_cast<int>(cfg.get_int("audio.sample_rate", 16000));

  r.train.epochs = cfg.get_int("train.epochs", 200);
  r.train.batch_size = cfg.get_int("train.batch_size", 4);
  r.train.crop_frames = cfg.get_int("train.crop_frames", 256);
  r.train.seed = static_cast<std::uint64_t>(cfg.get_int("train.seed", 1));
  r.train.patience = cfg.get_int("train.patience", 0);
  r.train.val_every = cfg.get_int("train.val_every", 1);
  r.train.rho = cfg.get_double("train.rho", 0.95);
  r.train.epsilon = cfg.get_double("train.epsilon", 1e-6);
  r.train.schedule = parse_schedule(cfg.get("train.schedule", "0:1.0,60:0.1,120:0.01"));

  r.train_index = cfg.get("data.train_index", "");
  r.val_index = cfg.get("data.val_index", "");
  r.out_dir = cfg.get("out.dir", "out");

  validate_hyper(r.hyper);
  validate(r.stft);
  validate(r.train);
  if (r.hyper.bins != r.stft.bins_kept) {
    throw ConfigError("model.bins must equal stft.bins_kept");
  }
  return r;
}

// One line per effective key, stable order, for run logs.
inline std::string format_effective_config(const ResolvedConfig& r) {
  std::ostringstream out;
  out << "model.bins = " << r.hyper.bins << '\n';
  out << "model.kernels = " << r.hyper.kernel_count << '\n';
  out << "model.kernel_height = " << r.hyper.kernel_height << '\n';
  out << "model.kernel_width = " << r.hyper.kernel_width << '\n';
  out << "model.freq_stride = " << r.hyper.freq_stride << '\n';
  out << "model.hidden = ";
  for (std::size_t i = 0; i < r.hyper.hidden.size(); ++i) {
    out << (i ? "," : "") << r.hyper.hidden[i];
  }
  out << '\n';
  out << "model.input_scale = " << r.hyper.input_scale << '\n';
  out << "stft.fft_size = " << r.stft.fft_size << '\n';
  out << "stft.hop_size = " << r.stft.hop_size << '\n';
  out << "stft.window = " << r.stft.window << '\n';
  out << "stft.bins_kept = " << r.stft.bins_kept << '\n';
  out << "audio.sample_rate = " << r.sample_rate << '\n';
  out << "train.epochs = " << r.train.epochs << '\n';
  out << "train.batch_size = " << r.train.batch_size << '\n';
  out << "train.crop_frames = " << r.train.crop_frames << '\n';
  out << "train.seed = " << r.train.seed << '\n';
  out << "train.patience = " << r.train.patience << '\n';
  out << "train.val_every = " << r.train.val_every << '\n';
  out << "train.rho = " << r.train.rho << '\n';
  out << "train.epsilon = " << r.train.epsilon << '\n';
  out << "train.schedule = ";
  for (std::size_t i = 0; i < r.train.schedule.points.size(); ++i) {
    out << (i ? "," : "") << r.train.schedule.points[i].first << ':'
        << r.train.schedule.points[i].second;
  }
  out << '\n';
  out << "data.train_index = " << r.train_index << '\n';
  out << "data.val_index = " << r.val_index << '\n';
  out << "out.dir = " << r.out_dir << '\n';
  return out.str();
}

}  // namespace ehnet

#endif  // EHNET_CONFIG_HPP_
