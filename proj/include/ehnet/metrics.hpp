// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_METRICS_HPP_
#define EHNET_METRICS_HPP_

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ehnet/common.hpp"
#include "ehnet/stft.hpp"
#include "ehnet/wav.hpp"

namespace ehnet {

inline constexpr double kSnrCapDb = 100.0;
inline constexpr double kLsdFloor = 1e-8;

// Trims both signals to their common length. Length differences beyond
// `tolerance` samples (default: one FFT frame) are treated as a pairing
// mistake rather than synthesis padding.
inline void align(Waveform* reference, Waveform* estimate, Index tolerance = 512) {
  const Index lr = reference->length();
  const Index le = estimate->length();
  const Index diff = lr > le ? lr - le : le - lr;
  if (diff > tolerance) {
    throw DataError("signal lengths differ by " + std::to_string(diff) +
                    " samples, beyond the aligner tolerance");
  }
  const Index n = std::min(lr, le);
  reference->samples.resize(static_cast<std::size_t>(n));
  estimate->samples.resize(static_cast<std::size_t>(n));
}

// 10*log10(sum ref^2 / sum (ref-est)^2), capped at +100 dB when the
// residual underflows.
inline double snr_db(const Waveform& reference, const Waveform& estimate) {
  if (reference.length() != estimate.length()) {
    throw DataError("snr operands must have equal lengths; run the aligner first");
  }
  double ref = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < reference.samples.size(); ++i) {
    const double r = reference.samples[i];
    const double d = r - estimate.samples[i];
    ref += r * r;
    residual += d * d;
  }
  if (ref <= 0.0) {
    throw DataError("snr reference has zero power");
  }
  if (residual <= 0.0) {
    return kSnrCapDb;
  }
  const double value = 10.0 * std::log10(ref / residual);
  return value > kSnrCapDb ? kSnrCapDb : value;
}

// Mean over frames of the RMS (across bins) of 20*log10 magnitude ratios,
// with a 1e-8 floor inside the logarithm.
inline double lsd(const Spectrogram& reference, const Spectrogram& estimate) {
  const Mat<double>& r = reference.magnitudes;
  const Mat<double>& e = estimate.magnitudes;
  if (r.rows() != e.rows() || r.cols() != e.cols()) {
    throw DataError("lsd operands must have equal shapes");
  }
  double acc = 0.0;
  for (Index c = 0; c < r.cols(); ++c) {
    double frame = 0.0;
    for (Index b = 0; b < r.rows(); ++b) {
      const double ratio =
          20.0 * std::log10((r(b, c) + kLsdFloor) / (e(b, c) + kLsdFloor));
      frame += ratio * ratio;
    }
    acc += std::sqrt(frame / static_cast<double>(r.rows()));
  }
  return acc / static_cast<double>(r.cols());
}

inline double time_mse(const Waveform& reference, const Waveform& estimate) {
  if (reference.length() != estimate.length()) {
    throw DataError("mse operands must have equal lengths; run the aligner first");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < reference.samples.size(); ++i) {
    const double d = reference.samples[i] - estimate.samples[i];
    acc += d * d;
  }
  return acc / static_cast<double>(reference.samples.size());
}

struct FileMetrics {
  std::string id;
  double snr_db = 0.0;
  double lsd = 0.0;
  double time_mse = 0.0;
  bool ok = false;
  std::string error;
};

struct EvalReport {
  std::vector<FileMetrics> files;
  double mean_snr_db = 0.0;
  double mean_lsd = 0.0;
  double mean_time_mse = 0.0;
  std::size_t evaluated = 0;
  std::size_t failed = 0;

  void finalize() {
    double s = 0.0, l = 0.0, m = 0.0;
    evaluated = 0;
    failed = 0;
    for (const auto& f : files) {
      if (!f.ok) {
        ++failed;
        continue;
      }
      s += f.snr_db;
      l += f.lsd;
      m += f.time_mse;
      ++evaluated;
    }
    const double n = evaluated ? static_cast<double>(evaluated) : 1.0;
    mean_snr_db = s / n;
    mean_lsd = l / n;
    mean_time_mse = m / n;
  }
};

// Metrics for one (reference, estimate) pair; LSD is computed on magnitude
// spectrograms under the given analysis config.
inline FileMetrics evaluate_pair(const std::string& id, Waveform reference,
                                 Waveform estimate, const StftConfig& cfg) {
  FileMetrics out;
  out.id = id;
  try {
    align(&reference, &estimate, cfg.fft_size);
    out.snr_db = snr_db(reference, estimate);
    out.time_mse = time_mse(reference, estimate);
    out.lsd = lsd(stft(reference, cfg), stft(estimate, cfg));
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

inline std::string format_report_tsv(const EvalReport& report) {
  std::string out = "id\tsnr_db\tlsd\ttime_mse\n";
  char buf[160];
  for (const auto& f : report.files) {
    if (f.ok) {
      std::snprintf(buf, sizeof(buf), "%s\t%.4f\t%.4f\t%.8f\n", f.id.c_str(), f.snr_db,
                    f.lsd, f.time_mse);
      out += buf;
    } else {
      out += f.id + "\tERROR\t" + f.error + "\n";
    }
  }
  std::snprintf(buf, sizeof(buf), "mean\t%.4f\t%.4f\t%.8f\n", report.mean_snr_db,
                report.mean_lsd, report.mean_time_mse);
  out += buf;
  return out;
}

inline std::string format_report_table(const EvalReport& report) {
  char buf[160];
  std::string out;
  std::snprintf(buf, sizeof(buf), "%-16s %10s %10s %12s\n", "id", "SNR(dB)", "LSD", "MSE");
  out += buf;
  for (const auto& f : report.files) {
    if (f.ok) {
      std::snprintf(buf, sizeof(buf), "%-16s %10.4f %10.4f %12.8f\n", f.id.c_str(),
                    f.snr_db, f.lsd, f.time_mse);
    } else {
      std::snprintf(buf, sizeof(buf), "%-16s      ERROR  (%s)\n", f.id.c_str(),
                    f.error.c_str());
    }
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "%-16s %10.4f %10.4f %12.8f\n", "mean",
                report.mean_snr_db, report.mean_lsd, report.mean_time_mse);
  out += buf;
  return out;
}

}  // namespace ehnet

#endif  // EHNET_METRICS_HPP_
