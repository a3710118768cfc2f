// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Single command-line entry point for the whole pipeline: corpus synthesis,
// training, enhancement, evaluation, gradient checking and spectrogram
// dumps. Exit codes: 0 success, 1 check failure, 2 usage/input error,
// 3 numeric abort, 64 malformed command line.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "ehnet/checkpoint.hpp"
#include "ehnet/config.hpp"
#include "ehnet/corpus.hpp"
#include "ehnet/demo_assets.hpp"
#include "ehnet/gradcheck.hpp"
#include "ehnet/metrics.hpp"
#include "ehnet/spectrogram_io.hpp"
#include "ehnet/stft.hpp"
#include "ehnet/train.hpp"
#include "ehnet/wav.hpp"

namespace fs = std::filesystem;
using namespace ehnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitUsage = 64;

struct GlobalOpts {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  bool verbose = false;
};

Config load_config(const GlobalOpts& g) {
  Config cfg;
  std::string path = g.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("EHNET_CONFIG")) {
      path = env;
    }
  }
  if (!path.empty()) {
    cfg = Config::from_file(path);
  }
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got: " + kv);
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

void echo_config(const ResolvedConfig& r) {
  std::istringstream lines(format_effective_config(r));
  std::string line;
  while (std::getline(lines, line)) {
    std::cout << "config: " << line << '\n';
  }
}

unsigned default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n ? n : 1;
}

// ---------------------------------------------------------------- synthesize

int cmd_synthesize(const std::string& manifest_path, const std::string& out_dir,
                   unsigned workers, const std::string& disjoint_with) {
  const DatasetManifest manifest = parse_manifest(manifest_path);
  if (!disjoint_with.empty()) {
    const DatasetManifest other = parse_manifest(disjoint_with);
    const auto overlap = noise_overlap(other, manifest);
    if (!overlap.empty()) {
      std::cerr << "error: noise files shared with " << disjoint_with << ":\n";
      for (const auto& name : overlap) {
        std::cerr << "  " << name << '\n';
      }
      return kExitInput;
    }
  }

  const CorpusResult corpus = generate_corpus(manifest, out_dir, workers);
  for (const auto& e : corpus.entries) {
    if (!e.ok) {
      std::cerr << "warning: skipped " << e.id << ": " << e.error << '\n';
    }
  }
  const std::string index_path = (fs::path(out_dir) / "index.tsv").string();
  write_index(corpus, manifest, index_path);

  std::map<int, int> histogram;  // 5 dB buckets
  for (const auto& e : corpus.entries) {
    if (e.ok && std::isfinite(e.achieved_snr_db)) {
      ++histogram[static_cast<int>(std::floor(e.achieved_snr_db / 5.0)) * 5];
    }
  }
  std::cout << "written " << corpus.written << " pairs (" << corpus.skipped
            << " skipped) to " << out_dir << '\n';
  std::cout << "index: " << index_path << '\n';
  std::cout << "achieved SNR histogram (5 dB buckets):\n";
  for (const auto& [lo, count] : histogram) {
    std::cout << "  [" << lo << "," << lo + 5 << ") dB: " << count << '\n';
  }
  return kExitOk;
}

// --------------------------------------------------------------------- train

std::vector<TrainingPair<float>> load_pairs(const std::string& index_path,
                                            const StftConfig& stft_cfg, double input_scale,
                                            int expected_rate) {
  const IndexFile index = read_index(index_path);
  if (index.sample_rate != expected_rate) {
    throw ConfigError("index sample rate does not match audio.sample_rate");
  }
  std::vector<TrainingPair<float>> pairs;
  pairs.reserve(index.entries.size());
  for (const auto& e : index.entries) {
    const Waveform noisy = read_wav(e.noisy_path);
    const Waveform clean = read_wav(e.clean_path);
    TrainingPair<float> pair;
    pair.id = e.id;
    pair.noisy = (stft(noisy, stft_cfg).magnitudes * input_scale).cast<float>();
    pair.clean = (stft(clean, stft_cfg).magnitudes * input_scale).cast<float>();
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

int cmd_train(const GlobalOpts& g, const std::string& resume_path) {
  const Config file_cfg = load_config(g);
  ResolvedConfig r = resolve_config(file_cfg);
  echo_config(r);
  for (const auto& warning : validate_hyper(r.hyper)) {
    std::cerr << "warning: " << warning << '\n';
  }
  if (r.train_index.empty() || r.val_index.empty()) {
    throw ConfigError("train requires data.train_index and data.val_index");
  }

  ModelParams<float> params;
  Index start_epoch = 0;
  if (!resume_path.empty()) {
    const Checkpoint<float> ckpt = load_checkpoint<float>(resume_path);
    params = ckpt.params;
    r.hyper = ckpt.params.hyper;
    r.stft = ckpt.stft;
    start_epoch = ckpt.epoch + 1;
    std::cout << "resuming from " << resume_path << " at epoch " << start_epoch << '\n';
  } else {
    params = init_params<float>(r.hyper, r.train.seed);
  }

  // The spectrogram-domain scale is part of the model configuration; the
  // clean target passes through the same scale so the mapping stays linear
  // at 1:1.
  const auto train_set =
      load_pairs(r.train_index, r.stft, r.hyper.input_scale, r.sample_rate);
  const auto val_set = load_pairs(r.val_index, r.stft, r.hyper.input_scale, r.sample_rate);
  std::cout << "training on " << train_set.size() << " pairs, validating on "
            << val_set.size() << '\n';

  const TrainResult<float> result = train(train_set, val_set, params, r.train, start_epoch);

  fs::create_directories(r.out_dir);
  const std::string log_path = (fs::path(r.out_dir) / "train.log").string();
  append_training_log(log_path, result.log);

  Checkpoint<float> best;
  best.params = result.best;
  best.stft = r.stft;
  best.sample_rate = r.sample_rate;
  best.epoch = result.best_epoch >= 0 ? result.best_epoch : 0;
  const std::string ckpt_path = (fs::path(r.out_dir) / "best.ehn").string();
  save_checkpoint(best, ckpt_path);

  std::cout << "best validation loss " << result.best_val << " at epoch "
            << result.best_epoch << '\n';
  std::cout << "checkpoint: " << ckpt_path << '\n';
  std::cout << "log: " << log_path << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------- enhance

int cmd_enhance(const std::string& ckpt_path, const std::string& in_path,
                const std::string& out_path, bool allow_any_rate) {
  const Checkpoint<float> ckpt = load_checkpoint<float>(ckpt_path);
  const Waveform noisy_wav = read_wav(in_path);
  if (!allow_any_rate && noisy_wav.sample_rate != ckpt.sample_rate) {
    throw ConfigError("input sample rate " + std::to_string(noisy_wav.sample_rate) +
                      " does not match the checkpoint (" +
                      std::to_string(ckpt.sample_rate) + "); use --allow-any-rate");
  }
  const Spectrogram noisy = stft(noisy_wav, ckpt.stft);
  const Mat<float> x =
      (noisy.magnitudes * ckpt.params.hyper.input_scale).cast<float>();
  const Mat<float> pred = forward(x, ckpt.params);
  const Waveform enhanced = reconstruct_with_phase(pred.cast<double>(), noisy);
  write_wav(out_path, enhanced);
  std::cout << "enhanced " << in_path << " -> " << out_path << " ("
            << enhanced.samples.size() << " samples)\n";
  return kExitOk;
}

// ------------------------------------------------------------------ evaluate

int cmd_evaluate(const std::string& index_path, const std::string& enhanced_dir,
                 unsigned workers, const std::string& tsv_path, bool include_noisy) {
  const IndexFile index = read_index(index_path);
  if (index.entries.empty()) {
    throw DataError("index contains no records");
  }
  StftConfig metric_cfg;
  metric_cfg.bins_kept = metric_cfg.fft_size / 2 + 1;

  EvalReport report;
  report.files.resize(index.entries.size());
  workers = std::max(1u, std::min<unsigned>(workers, index.entries.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < index.entries.size(); i += workers) {
        const auto& e = index.entries[i];
        const std::string est_path =
            (fs::path(enhanced_dir) / (e.id + ".wav")).string();
        try {
          const Waveform ref = read_wav(e.clean_path);
          const Waveform est = read_wav(est_path);
          report.files[i] = evaluate_pair(e.id, ref, est, metric_cfg);
        } catch (const std::exception& ex) {
          report.files[i].id = e.id;
          report.files[i].ok = false;
          report.files[i].error = ex.what();
        }
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }

  if (include_noisy) {
    for (const auto& e : index.entries) {
      try {
        const Waveform ref = read_wav(e.clean_path);
        const Waveform noisy = read_wav(e.noisy_path);
        FileMetrics m = evaluate_pair(e.id + ".noisy", ref, noisy, metric_cfg);
        report.files.push_back(std::move(m));
      } catch (const std::exception& ex) {
        FileMetrics m;
        m.id = e.id + ".noisy";
        m.error = ex.what();
        report.files.push_back(std::move(m));
      }
    }
  }

  report.finalize();
  std::cout << format_report_table(report);
  if (!tsv_path.empty()) {
    std::ofstream out(tsv_path, std::ios::trunc);
    if (!out) {
      throw IoError("cannot write report: " + tsv_path);
    }
    out << format_report_tsv(report);
  }
  return report.failed == 0 ? kExitOk : kExitCheckFailed;
}

// ------------------------------------------------------------------ gradcheck

int cmd_gradcheck(const GradCheckSpec& spec, bool single_precision) {
  const GradCheckReport report = single_precision ? run_grad_check<float>(spec)
                                                  : run_grad_check<double>(spec);
  std::printf("%-18s %14s  %s\n", "tensor", "max_rel_err", "status");
  for (const auto& t : report.tensors) {
    std::printf("%-18s %14.6e  %s\n", t.name.c_str(), t.max_rel_err,
                t.pass ? "ok" : "FAIL");
  }
  std::printf("tolerance %.3e, %s precision, %lld trials: %s\n", report.tolerance,
              single_precision ? "single" : "double",
              static_cast<long long>(spec.trials), report.pass ? "PASS" : "FAIL");
  return report.pass ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------- dump-spectrogram

int cmd_dump_spectrogram(const std::string& in_path, const std::string& out_path,
                         std::string format, const StftConfig& cfg) {
  const Waveform w = read_wav(in_path);
  const Spectrogram s = stft(w, cfg);
  if (format.empty()) {
    const std::string ext = fs::path(out_path).extension().string();
    format = ext == ".csv" ? "csv" : "bin";
  }
  if (format == "csv") {
    write_spectrogram_csv(out_path, s.magnitudes);
  } else if (format == "bin") {
    write_spectrogram_bin(out_path, s.magnitudes);
  } else {
    throw ConfigError("unknown dump format: " + format);
  }
  std::cout << "wrote " << s.bins() << "x" << s.frames() << " magnitudes to " << out_path
            << " (" << format << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EHNet speech enhancement pipeline"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "print help for every subcommand");

  GlobalOpts global;
  app.add_option("--config", global.config_path,
                 "config file (falls back to $EHNET_CONFIG)");
  app.add_option("--set", global.overrides, "override a config key (key=value)");
  app.add_flag("--verbose", global.verbose, "chatty diagnostics");

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "render a manifest into paired WAVs");
  std::string manifest_path, out_dir, make_demo_dir, disjoint_with;
  unsigned workers = default_workers();
  std::uint64_t demo_seed = 1;
  synth->add_option("manifest", manifest_path, "manifest file");
  synth->add_option("out_dir", out_dir, "output directory");
  synth->add_option("--workers", workers, "parallel workers");
  synth->add_option("--make-demo", make_demo_dir,
                    "write the bundled demo sources and manifests here, then exit");
  synth->add_option("--demo-seed", demo_seed, "seed for the demo manifests");
  synth->add_option("--disjoint-noise-with", disjoint_with,
                    "fail if any noise file also appears in this manifest");

  // train
  auto* train_cmd = app.add_subcommand("train", "train a model from a corpus index");
  std::string resume_path;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  train_cmd->add_option("--resume", resume_path, "checkpoint to continue from");
  train_cmd->add_option("--seed", seed_override, "shortcut for --set train.seed=N")
      ->each([&seed_given](const std::string&) { seed_given = true; });

  // enhance
  auto* enhance = app.add_subcommand("enhance", "denoise one WAV with a checkpoint");
  std::string ckpt_path, in_wav, out_wav;
  bool allow_any_rate = false;
  enhance->add_option("checkpoint", ckpt_path, "model checkpoint")->required();
  enhance->add_option("input", in_wav, "noisy input WAV")->required();
  enhance->add_option("output", out_wav, "enhanced output WAV")->required();
  enhance->add_flag("--allow-any-rate", allow_any_rate,
                    "skip the sample-rate consistency check");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score enhanced files against an index");
  std::string eval_index, enhanced_dir, tsv_path;
  unsigned eval_workers = default_workers();
  bool include_noisy = false;
  evaluate->add_option("index", eval_index, "corpus index")->required();
  evaluate->add_option("enhanced_dir", enhanced_dir, "directory of <id>.wav estimates")
      ->required();
  evaluate->add_option("--workers", eval_workers, "parallel workers");
  evaluate->add_option("--tsv", tsv_path, "also write the report as TSV");
  evaluate->add_flag("--with-noisy-baseline", include_noisy,
                     "score the unenhanced noisy files too");

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  GradCheckSpec spec;
  bool single_precision = false;
  gradcheck->add_option("--trials", spec.trials, "random (params, input, target) draws");
  gradcheck->add_option("--step", spec.step, "central difference step");
  gradcheck->add_option("--tolerance", spec.tolerance, "max relative error");
  gradcheck->add_option("--seed", spec.seed, "base seed");
  gradcheck->add_option("--frames", spec.frames, "input frames");
  gradcheck->add_option("--max-coords", spec.max_coords_per_tensor,
                        "random coordinate subset per tensor (0 = all)");
  gradcheck->add_flag("--single-precision", single_precision,
                      "check the float instantiation instead of double");
  gradcheck->add_flag("--inject-sign-flip", spec.inject_sign_flip,
                      "fault-injection hook: corrupt one tensor and expect failure");

  // dump-spectrogram
  auto* dump = app.add_subcommand("dump-spectrogram", "write STFT magnitudes to disk");
  std::string dump_in, dump_out, dump_format;
  StftConfig dump_cfg;
  dump_cfg.bins_kept = 0;  // resolved to full spectrum below unless set
  dump->add_option("input", dump_in, "input WAV")->required();
  dump->add_option("output", dump_out, "output file (.csv or .bin)")->required();
  dump->add_option("--format", dump_format, "csv or bin (default: by extension)");
  dump->add_option("--fft-size", dump_cfg.fft_size, "analysis size");
  dump->add_option("--hop", dump_cfg.hop_size, "hop size");
  dump->add_option("--window", dump_cfg.window, "analysis window (hann, rect)");
  dump->add_option("--bins", dump_cfg.bins_kept, "bins kept (default fft/2+1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (synth->parsed()) {
      if (!make_demo_dir.empty()) {
        const DemoAssets assets = write_demo_assets(make_demo_dir, demo_seed);
        std::cout << "demo sources under " << assets.root << '\n';
        std::cout << "train manifest: " << assets.train_manifest << '\n';
        std::cout << "unseen manifest: " << assets.unseen_manifest << '\n';
        if (manifest_path.empty()) {
          return kExitOk;
        }
      }
      if (manifest_path.empty() || out_dir.empty()) {
        std::cerr << "error: synthesize requires <manifest> <out_dir>\n";
        return kExitUsage;
      }
      return cmd_synthesize(manifest_path, out_dir, workers, disjoint_with);
    }
    if (train_cmd->parsed()) {
      if (seed_given) {
        global.overrides.push_back("train.seed=" + std::to_string(seed_override));
      }
      return cmd_train(global, resume_path);
    }
    if (enhance->parsed()) {
      return cmd_enhance(ckpt_path, in_wav, out_wav, allow_any_rate);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(eval_index, enhanced_dir, eval_workers, tsv_path, include_noisy);
    }
    if (gradcheck->parsed()) {
      return cmd_gradcheck(spec, single_precision);
    }
    if (dump->parsed()) {
      if (dump_cfg.bins_kept == 0) {
        dump_cfg.bins_kept = dump_cfg.fft_size / 2 + 1;
      }
      return cmd_dump_spectrogram(dump_in, dump_out, dump_format, dump_cfg);
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}
