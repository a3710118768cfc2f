// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "ehnet/corpus.hpp"
#include "ehnet/demo_assets.hpp"
#include "ehnet/mixing.hpp"
#include "oracle_helpers.hpp"

using namespace ehnet;
namespace fs = std::filesystem;

namespace {

Waveform noise_wave(Index len, std::uint64_t seed, double amp = 0.2) {
  Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(static_cast<std::size_t>(len));
  CounterRng rng(seed);
  for (auto& s : w.samples) s = rng.next_uniform(-amp, amp);
  return w;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::current_path() / "test_tmp" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("mix_at_snr hits the requested ratio", "[data]") {
  Waveform clean = noise_wave(4000, 1, 0.25);
  Waveform noise = noise_wave(4000, 2, 0.25);

  SECTION("0 dB equalizes the powers") {
    const auto [noisy, scaled] = mix_at_snr(clean, noise, 0.0);
    REQUIRE(signal_power(scaled) ==
            Catch::Approx(signal_power(clean)).epsilon(1e-6));
    for (std::size_t i = 0; i < noisy.samples.size(); ++i) {
      REQUIRE(noisy.samples[i] ==
              Catch::Approx(clean.samples[i] + scaled.samples[i]).margin(1e-15));
    }
  }
  SECTION("+inf disables mixing") {
    const auto [noisy, scaled] =
        mix_at_snr(clean, noise, std::numeric_limits<double>::infinity());
    REQUIRE(noisy.samples == clean.samples);
    REQUIRE(signal_power(scaled) == 0.0);
  }
  SECTION("hand-computed scale at 10 dB") {
    // clean power 0.04, noise power 0.01, target 10 dB -> alpha^2 = 0.4
    Waveform c = clean, n = noise;
    const double pc = signal_power(c), pn = signal_power(n);
    for (auto& s : c.samples) s *= std::sqrt(0.04 / pc);
    for (auto& s : n.samples) s *= std::sqrt(0.01 / pn);
    const auto [noisy, scaled] = mix_at_snr(c, n, 10.0);
    const double alpha_sq = signal_power(scaled) / signal_power(n);
    REQUIRE(alpha_sq == Catch::Approx(0.4).epsilon(1e-9));
  }
  SECTION("achieved SNR is within 0.01 dB for random targets") {
    CounterRng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      const double target = rng.next_uniform(0.0, 30.0);
      const auto [noisy, scaled] = mix_at_snr(clean, noise, target);
      const double achieved =
          10.0 * std::log10(signal_power(clean) / signal_power(scaled));
      REQUIRE(achieved == Catch::Approx(target).margin(0.01));
    }
  }
  SECTION("degenerate sources are rejected") {
    Waveform silent;
    silent.sample_rate = 16000;
    silent.samples.assign(4000, 0.0);
    REQUIRE_THROWS_WITH(mix_at_snr(silent, noise, 10.0),
                        Catch::Matchers::ContainsSubstring("degenerate source"));
    REQUIRE_THROWS_WITH(mix_at_snr(clean, silent, 10.0),
                        Catch::Matchers::ContainsSubstring("degenerate source"));
  }
}

TEST_CASE("apply_rir basics", "[data]") {
  Waveform clean = noise_wave(512, 3, 0.3);

  SECTION("unit impulse is the identity") {
    Waveform rir;
    rir.sample_rate = 16000;
    rir.samples = {1.0};
    const Waveform out = apply_rir(clean, rir);
    for (std::size_t i = 0; i < clean.samples.size(); ++i) {
      REQUIRE(out.samples[i] == Catch::Approx(clean.samples[i]).margin(1e-12));
    }
  }
  SECTION("delayed impulse shifts the signal") {
    const Index delay = 16;
    Waveform padded = clean;
    // zero tail so the truncated shift preserves energy exactly
    for (Index i = padded.length() - delay; i < padded.length(); ++i) {
      padded.samples[static_cast<std::size_t>(i)] = 0.0;
    }
    Waveform rir;
    rir.sample_rate = 16000;
    rir.samples.assign(static_cast<std::size_t>(delay + 1), 0.0);
    rir.samples.back() = 1.0;
    const Waveform out = apply_rir(padded, rir);
    for (Index i = delay; i < padded.length(); ++i) {
      REQUIRE(out.samples[static_cast<std::size_t>(i)] ==
              Catch::Approx(padded.samples[static_cast<std::size_t>(i - delay)])
                  .margin(1e-9));
    }
  }
  SECTION("random taps match the naive convolution oracle up to the gain") {
    CounterRng rng(7);
    Waveform in;
    in.sample_rate = 16000;
    in.samples.resize(128);
    for (auto& s : in.samples) s = rng.next_uniform(-0.5, 0.5);
    Waveform rir;
    rir.sample_rate = 16000;
    rir.samples.resize(32);
    for (auto& s : rir.samples) s = rng.next_uniform(-0.5, 0.5);

    const Waveform out = apply_rir(in, rir);
    const auto full = oracle::convolve_loop(in.samples, rir.samples);
    double truncated_sq = 0.0, in_sq = 0.0;
    for (std::size_t i = 0; i < in.samples.size(); ++i) {
      truncated_sq += full[i] * full[i];
      in_sq += in.samples[i] * in.samples[i];
    }
    const double gain = std::sqrt(in_sq / truncated_sq);
    for (std::size_t i = 0; i < in.samples.size(); ++i) {
      REQUIRE(out.samples[i] == Catch::Approx(gain * full[i]).margin(1e-12));
    }
  }
  SECTION("renormalization restores the input RMS") {
    Waveform rir;
    rir.sample_rate = 16000;
    rir.samples = {0.2, 0.1, -0.05, 0.02};
    const Waveform out = apply_rir(clean, rir);
    REQUIRE(rms(out) == Catch::Approx(rms(clean)).epsilon(1e-12));
  }
  SECTION("empty or silent responses are rejected") {
    Waveform empty;
    empty.sample_rate = 16000;
    REQUIRE_THROWS_AS(apply_rir(clean, empty), DataError);
    Waveform silent;
    silent.sample_rate = 16000;
    silent.samples.assign(8, 0.0);
    REQUIRE_THROWS_AS(apply_rir(clean, silent), DataError);
  }
}

TEST_CASE("fit_noise_to_length loops and crops deterministically", "[data]") {
  Waveform noise = noise_wave(100, 5);

  CounterRng rng_a(11), rng_b(11);
  const Waveform looped_a = fit_noise_to_length(noise, 250, rng_a);
  const Waveform looped_b = fit_noise_to_length(noise, 250, rng_b);
  REQUIRE(looped_a.length() == 250);
  REQUIRE(looped_a.samples == looped_b.samples);

  CounterRng rng_c(13);
  const Waveform cropped = fit_noise_to_length(noise, 40, rng_c);
  REQUIRE(cropped.length() == 40);
  // a crop is a contiguous run of the source
  bool found = false;
  for (Index off = 0; off + 40 <= 100 && !found; ++off) {
    bool match = true;
    for (Index i = 0; i < 40 && match; ++i) {
      match = cropped.samples[static_cast<std::size_t>(i)] ==
              noise.samples[static_cast<std::size_t>(off + i)];
    }
    found = match;
  }
  REQUIRE(found);
}

TEST_CASE("manifest round trip", "[data]") {
  const auto dir = fresh_dir("manifest_rt");
  DatasetManifest m;
  m.split = "train";
  m.sample_rate = 16000;
  MixSpec a{"p0", "clean/x.wav", "noise/n.wav", "rir/r.wav", 12.25, 42, -3.0};
  MixSpec b{"p1", "clean/y.wav", "noise/n.wav", "", std::numeric_limits<double>::infinity(),
            7, 0.0};
  m.specs = {a, b};
  const std::string path = (dir / "m.manifest").string();
  write_manifest(m, path);

  const DatasetManifest back = parse_manifest(path);
  REQUIRE(back.split == "train");
  REQUIRE(back.sample_rate == 16000);
  REQUIRE(back.specs.size() == 2);
  REQUIRE(back.specs[0].id == "p0");
  REQUIRE(back.specs[0].rir_path == "rir/r.wav");
  REQUIRE(back.specs[0].snr_db == 12.25);
  REQUIRE(back.specs[0].seed == 42);
  REQUIRE(back.specs[0].gain_db == -3.0);
  REQUIRE(back.specs[1].rir_path.empty());
  REQUIRE(back.specs[1].snr_db == std::numeric_limits<double>::infinity());
}

TEST_CASE("demo corpus renders deterministically and on target", "[data]") {
  const auto root = fresh_dir("demo_corpus");
  const DemoAssets assets = write_demo_assets(root.string(), 1);
  const DatasetManifest manifest = parse_manifest(assets.train_manifest);
  REQUIRE(manifest.specs.size() == 6);
  for (const auto& s : manifest.specs) {
    REQUIRE(s.snr_db >= 0.0);
    REQUIRE(s.snr_db <= 30.0);
  }

  const auto out_a = fresh_dir("demo_out_a");
  const CorpusResult corpus = generate_corpus(manifest, out_a.string(), 2);
  REQUIRE(corpus.written == 6);
  REQUIRE(corpus.skipped == 0);

  SECTION("achieved SNR re-measured from disk stays within 0.02 dB") {
    for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
      const auto& e = corpus.entries[i];
      REQUIRE(e.ok);
      REQUIRE(e.achieved_snr_db ==
              Catch::Approx(manifest.specs[i].snr_db).margin(0.02));
    }
  }

  SECTION("regeneration is byte-identical") {
    const auto out_b = fresh_dir("demo_out_b");
    const CorpusResult again = generate_corpus(manifest, out_b.string(), 1);
    for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
      REQUIRE(file_bytes(corpus.entries[i].noisy_path) ==
              file_bytes(again.entries[i].noisy_path));
      REQUIRE(file_bytes(corpus.entries[i].clean_path) ==
              file_bytes(again.entries[i].clean_path));
    }
  }

  SECTION("index round trips") {
    const std::string index_path = (out_a / "index.tsv").string();
    write_index(corpus, manifest, index_path);
    const IndexFile idx = read_index(index_path);
    REQUIRE(idx.entries.size() == 6);
    REQUIRE(idx.sample_rate == 16000);
    REQUIRE(idx.entries[0].id == "demo0");
  }

  SECTION("unseen split shares no noise file with training") {
    const DatasetManifest unseen = parse_manifest(assets.unseen_manifest);
    REQUIRE(noise_overlap(manifest, unseen).empty());
    REQUIRE_FALSE(noise_overlap(manifest, manifest).empty());
  }
}

TEST_CASE("gain shifts both written signals together", "[data]") {
  const auto root = fresh_dir("gain_corpus");
  write_demo_assets(root.string(), 3);
  DatasetManifest m = parse_manifest((root / "demo_train.manifest").string());
  m.specs.resize(1);
  m.specs[0].gain_db = 0.0;
  const auto out_ref = fresh_dir("gain_ref");
  const CorpusResult ref = generate_corpus(m, out_ref.string());

  m.specs[0].gain_db = -6.0;
  const auto out_low = fresh_dir("gain_low");
  const CorpusResult low = generate_corpus(m, out_low.string());

  const Waveform ref_noisy = read_wav(ref.entries[0].noisy_path);
  const Waveform low_noisy = read_wav(low.entries[0].noisy_path);
  const Waveform ref_clean = read_wav(ref.entries[0].clean_path);
  const Waveform low_clean = read_wav(low.entries[0].clean_path);
  const double g = std::pow(10.0, -6.0 / 20.0);
  REQUIRE(rms(low_noisy) == Catch::Approx(g * rms(ref_noisy)).epsilon(1e-3));
  REQUIRE(rms(low_clean) == Catch::Approx(g * rms(ref_clean)).epsilon(1e-3));
  // the SNR is unchanged by a common gain
  REQUIRE(low.entries[0].achieved_snr_db ==
          Catch::Approx(ref.entries[0].achieved_snr_db).margin(0.02));
}

TEST_CASE("skip policy tolerates few bad records and aborts on many", "[data]") {
  const auto root = fresh_dir("skip_corpus");
  write_demo_assets(root.string(), 5);
  DatasetManifest m = parse_manifest((root / "demo_train.manifest").string());

  SECTION("empty manifest aborts") {
    DatasetManifest empty = m;
    empty.specs.clear();
    REQUIRE_THROWS_AS(generate_corpus(empty, (root / "out").string()), DataError);
  }
  SECTION("one bad record out of twelve is skipped with a diagnostic") {
    DatasetManifest padded = m;
    padded.specs.insert(padded.specs.end(), m.specs.begin(), m.specs.end());
    for (std::size_t i = 6; i < padded.specs.size(); ++i) {
      padded.specs[i].id += "_b";
    }
    padded.specs[3].clean_path = "clean/missing.wav";
    const CorpusResult r = generate_corpus(padded, (root / "out1").string());
    REQUIRE(r.skipped == 1);
    REQUIRE(r.written == 11);
    REQUIRE_FALSE(r.entries[3].ok);
    REQUIRE_FALSE(r.entries[3].error.empty());
  }
  SECTION("more than 10% bad records aborts") {
    DatasetManifest bad = m;
    bad.specs[0].clean_path = "clean/missing.wav";
    REQUIRE_THROWS_AS(generate_corpus(bad, (root / "out2").string()), DataError);
  }
}
