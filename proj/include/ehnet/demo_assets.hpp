// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_DEMO_ASSETS_HPP_
#define EHNET_DEMO_ASSETS_HPP_

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "ehnet/corpus.hpp"
#include "ehnet/rng.hpp"
#include "ehnet/wav.hpp"

namespace ehnet {

// Tiny self-contained corpus sources (tones, chirps, white/pink noise,
// exponential-decay impulse responses) so every pipeline stage can run
// hermetically without external audio.

struct DemoAssets {
  std::string root;
  std::string train_manifest;
  std::string unseen_manifest;
  std::vector<std::string> clean;
  std::vector<std::string> noise;
  std::vector<std::string> rirs;
};

namespace detail {

inline Waveform tone(int sample_rate, Index len, double f0, double a0, double f1,
                     double a1) {
  const double pi = 3.141592653589793238462643383279502884;
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(static_cast<std::size_t>(len));
  const Index fade = sample_rate / 200;  // 5 ms
  for (Index i = 0; i < len; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    double s = a0 * std::sin(2.0 * pi * f0 * t) + a1 * std::sin(2.0 * pi * f1 * t);
    if (i < fade) s *= static_cast<double>(i) / fade;
    if (len - 1 - i < fade) s *= static_cast<double>(len - 1 - i) / fade;
    w.samples[static_cast<std::size_t>(i)] = s;
  }
  return w;
}

inline Waveform chirp(int sample_rate, Index len, double f_start, double f_end,
                      double amp) {
  const double pi = 3.141592653589793238462643383279502884;
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(static_cast<std::size_t>(len));
  const double dur = static_cast<double>(len) / sample_rate;
  const Index fade = sample_rate / 200;
  for (Index i = 0; i < len; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double phase =
        2.0 * pi * (f_start * t + 0.5 * (f_end - f_start) / dur * t * t);
    double s = amp * std::sin(phase);
    if (i < fade) s *= static_cast<double>(i) / fade;
    if (len - 1 - i < fade) s *= static_cast<double>(len - 1 - i) / fade;
    w.samples[static_cast<std::size_t>(i)] = s;
  }
  return w;
}

inline Waveform white_noise(int sample_rate, Index len, double amp, std::uint64_t seed) {
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(static_cast<std::size_t>(len));
  CounterRng rng(seed);
  for (auto& s : w.samples) {
    s = rng.next_uniform(-amp, amp);
  }
  return w;
}

// Paul Kellet's economy pink filter over seeded white noise.
inline Waveform pink_noise(int sample_rate, Index len, double rms_target,
                           std::uint64_t seed) {
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(static_cast<std::size_t>(len));
  CounterRng rng(seed);
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (auto& s : w.samples) {
    const double white = rng.next_uniform(-1.0, 1.0);
    b0 = 0.99765 * b0 + white * 0.0990460;
    b1 = 0.96300 * b1 + white * 0.2965164;
    b2 = 0.57000 * b2 + white * 1.0526913;
    s = b0 + b1 + b2 + white * 0.1848;
  }
  double acc = 0.0;
  for (double s : w.samples) acc += s * s;
  const double gain = rms_target / std::sqrt(acc / static_cast<double>(len));
  for (auto& s : w.samples) s *= gain;
  return w;
}

inline Waveform exp_decay_rir(int sample_rate, Index taps, double decay_taps,
                              std::uint64_t seed) {
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(static_cast<std::size_t>(taps));
  CounterRng rng(seed);
  w.samples[0] = 1.0;
  for (Index i = 1; i < taps; ++i) {
    double g = 0.25 * rng.next_gaussian();
    g = g < -0.95 ? -0.95 : (g > 0.95 ? 0.95 : g);
    w.samples[static_cast<std::size_t>(i)] =
        g * std::exp(-static_cast<double>(i) / decay_taps);
  }
  return w;
}

}  // namespace detail

// Writes the demo sources and two manifests (train: 6 records over the
// seen noises; unseen: 2 records over a disjoint noise file). SNR targets
// are drawn uniformly from [0, 30] dB with the given seed.
inline DemoAssets write_demo_assets(const std::string& root, std::uint64_t seed = 1) {
  namespace fs = std::filesystem;
  const int rate = 16000;
  const Index clean_len = 8000;   // 0.5 s
  const Index noise_len = 11200;  // 0.7 s

  DemoAssets assets;
  assets.root = root;
  fs::create_directories(fs::path(root) / "clean");
  fs::create_directories(fs::path(root) / "noise");
  fs::create_directories(fs::path(root) / "rir");

  const auto save = [&](const std::string& rel, const Waveform& w) {
    const std::string path = (fs::path(root) / rel).string();
    write_wav(path, w, 24);
    return path;
  };

  assets.clean.push_back(save("clean/tone_a.wav",
                              detail::tone(rate, clean_len, 500.0, 0.20, 1500.0, 0.10)));
  assets.clean.push_back(save("clean/tone_b.wav",
                              detail::tone(rate, clean_len, 760.0, 0.22, 2280.0, 0.08)));
  assets.clean.push_back(
      save("clean/chirp_a.wav", detail::chirp(rate, clean_len, 300.0, 2000.0, 0.22)));
  assets.clean.push_back(
      save("clean/chirp_b.wav", detail::chirp(rate, clean_len, 1800.0, 400.0, 0.20)));

  assets.noise.push_back(
      save("noise/white_a.wav", detail::white_noise(rate, noise_len, 0.15, seed + 10)));
  assets.noise.push_back(
      save("noise/pink_a.wav", detail::pink_noise(rate, noise_len, 0.08, seed + 11)));
  assets.noise.push_back(
      save("noise/white_b.wav", detail::white_noise(rate, noise_len, 0.12, seed + 12)));

  assets.rirs.push_back(
      save("rir/rir_small.wav", detail::exp_decay_rir(rate, 400, 60.0, seed + 20)));
  assets.rirs.push_back(
      save("rir/rir_large.wav", detail::exp_decay_rir(rate, 1600, 300.0, seed + 21)));

  CounterRng rng(seed);
  const auto snr = [&rng]() { return std::round(rng.next_uniform(0.0, 30.0) * 100.0) / 100.0; };

  DatasetManifest train;
  train.split = "train";
  train.sample_rate = rate;
  const char* cleans[] = {"clean/tone_a.wav", "clean/tone_b.wav", "clean/chirp_a.wav",
                          "clean/chirp_b.wav", "clean/tone_a.wav", "clean/chirp_b.wav"};
  const char* noises[] = {"noise/white_a.wav", "noise/pink_a.wav", "noise/white_a.wav",
                          "noise/pink_a.wav", "noise/pink_a.wav", "noise/white_a.wav"};
  const char* rirs[] = {"-", "rir/rir_small.wav", "-", "rir/rir_large.wav",
                        "rir/rir_small.wav", "-"};
  for (int i = 0; i < 6; ++i) {
    MixSpec s;
    s.id = "demo" + std::to_string(i);
    s.clean_path = cleans[i];
    s.noise_path = noises[i];
    s.rir_path = rirs[i][0] == '-' ? "" : rirs[i];
    s.snr_db = snr();
    s.seed = seed + 100 + static_cast<std::uint64_t>(i);
    train.specs.push_back(std::move(s));
  }
  assets.train_manifest = (fs::path(root) / "demo_train.manifest").string();
  write_manifest(train, assets.train_manifest);

  DatasetManifest unseen;
  unseen.split = "unseen";
  unseen.sample_rate = rate;
  for (int i = 0; i < 2; ++i) {
    MixSpec s;
    s.id = "unseen" + std::to_string(i);
    s.clean_path = i == 0 ? "clean/tone_b.wav" : "clean/chirp_a.wav";
    s.noise_path = "noise/white_b.wav";
    s.rir_path = i == 0 ? "rir/rir_small.wav" : "";
    s.snr_db = snr();
    s.seed = seed + 200 + static_cast<std::uint64_t>(i);
    unseen.specs.push_back(std::move(s));
  }
  assets.unseen_manifest = (fs::path(root) / "demo_unseen.manifest").string();
  write_manifest(unseen, assets.unseen_manifest);
  return assets;
}

}  // namespace ehnet

#endif  // EHNET_DEMO_ASSETS_HPP_
