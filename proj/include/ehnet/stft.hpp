// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_STFT_HPP_
#define EHNET_STFT_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "ehnet/common.hpp"
#include "ehnet/fft.hpp"
#include "ehnet/wav.hpp"

namespace ehnet {

// Analysis/synthesis configuration. `window` names the effective window,
// i.e. the product of the analysis and synthesis windows: both sides apply
// its square root. With "hann" at hop = fft_size/2 the shifted squares of
// the analysis window sum to exactly 1, which is what the overlap-add
// validation below checks.
struct StftConfig {
  Index fft_size = 512;
  Index hop_size = 256;
  std::string window = "hann";
  Index bins_kept = 257;  // <= fft_size/2 + 1; the model default drops Nyquist (256)
};

// Analysis window coefficients (square root of the effective window).
inline std::vector<double> analysis_window(const StftConfig& cfg) {
  const Index n = cfg.fft_size;
  std::vector<double> w(static_cast<std::size_t>(n));
  if (cfg.window == "hann") {
    const double pi = 3.141592653589793238462643383279502884;
    for (Index i = 0; i < n; ++i) {
      const double h = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(i) /
                                              static_cast<double>(n)));
      w[static_cast<std::size_t>(i)] = std::sqrt(h);
    }
  } else if (cfg.window == "rect") {
    for (Index i = 0; i < n; ++i) {
      w[static_cast<std::size_t>(i)] = 1.0;
    }
  } else {
    throw ConfigError("unknown window: " + cfg.window);
  }
  return w;
}

// Sum of shifted squared analysis windows, evaluated over one hop period in
// the fully overlapped interior. Constant iff the pair reconstructs without
// amplitude modulation.
inline std::pair<double, double> overlap_add_extrema(const StftConfig& cfg) {
  const std::vector<double> w = analysis_window(cfg);
  const Index n = cfg.fft_size;
  const Index hop = cfg.hop_size;
  double lo = 0.0, hi = 0.0;
  for (Index off = 0; off < hop; ++off) {
    double s = 0.0;
    for (Index start = off - n + 1; start <= off; ++start) {
      // window instance covering sample `off` begins at k*hop == start
      if (start % hop != 0) continue;
      const double v = w[static_cast<std::size_t>(off - start)];
      s += v * v;
    }
    if (off == 0) {
      lo = hi = s;
    } else {
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  }
  return {lo, hi};
}

inline void validate(const StftConfig& cfg) {
  if (!is_power_of_two(static_cast<std::size_t>(cfg.fft_size))) {
    throw ConfigError("fft_size must be a power of two");
  }
  if (cfg.hop_size <= 0 || cfg.hop_size > cfg.fft_size) {
    throw ConfigError("hop_size must satisfy 0 < hop <= fft_size");
  }
  if (cfg.bins_kept < 1 || cfg.bins_kept > cfg.fft_size / 2 + 1) {
    throw ConfigError("bins_kept must be in [1, fft_size/2 + 1]");
  }
  const auto [lo, hi] = overlap_add_extrema(cfg);
  if (lo <= 0.0 || (hi - lo) / hi > 1e-6) {
    throw ConfigError("window/hop pair is not constant-overlap-add: " + cfg.window +
                      " with hop " + std::to_string(cfg.hop_size));
  }
}

// Magnitude/phase time-frequency representation; rows are frequency bins,
// columns are frames.
struct Spectrogram {
  Mat<double> magnitudes;  // bins_kept x t, nonnegative
  Mat<double> phases;      // bins_kept x t, radians in (-pi, pi]
  StftConfig config;
  int sample_rate = 16000;

  Index bins() const { return magnitudes.rows(); }
  Index frames() const { return magnitudes.cols(); }
};

inline Spectrogram stft(const Waveform& w, const StftConfig& cfg) {
  validate(cfg);
  const Index n = cfg.fft_size;
  const Index hop = cfg.hop_size;
  const Index len = w.length();
  if (len < n) {
    throw ConfigError("insufficient samples: waveform shorter than one frame");
  }
  const Index t = (len - n) / hop + 1;
  const std::vector<double> win = analysis_window(cfg);
  const double pi = 3.141592653589793238462643383279502884;

  Spectrogram s;
  s.config = cfg;
  s.sample_rate = w.sample_rate;
  s.magnitudes.resize(cfg.bins_kept, t);
  s.phases.resize(cfg.bins_kept, t);

  std::vector<Cpx> frame(static_cast<std::size_t>(n));
  for (Index v = 0; v < t; ++v) {
    const Index off = v * hop;
    for (Index i = 0; i < n; ++i) {
      frame[static_cast<std::size_t>(i)] =
          Cpx(w.samples[static_cast<std::size_t>(off + i)] *
                  win[static_cast<std::size_t>(i)],
              0.0);
    }
    fft_inplace(frame);
    for (Index b = 0; b < cfg.bins_kept; ++b) {
      const Cpx x = frame[static_cast<std::size_t>(b)];
      s.magnitudes(b, v) = std::abs(x);
      double ph = std::atan2(x.imag(), x.real());
      if (ph <= -pi) ph = pi;
      s.phases(b, v) = ph;
    }
  }
  return s;
}

// Weighted overlap-add synthesis: each frame is inverse-transformed,
// multiplied by the synthesis window (same as analysis) and accumulated;
// the result is divided pointwise by the sum of squared windows. Bins
// beyond bins_kept are synthesized as zero. Output length is
// (t - 1) * hop + fft_size.
inline Waveform istft(const Spectrogram& s) {
  validate(s.config);
  if (s.magnitudes.rows() != s.phases.rows() || s.magnitudes.cols() != s.phases.cols()) {
    throw ConfigError("magnitude/phase shape mismatch");
  }
  if (s.frames() < 1) {
    throw ConfigError("spectrogram must have at least one frame");
  }
  const Index n = s.config.fft_size;
  const Index hop = s.config.hop_size;
  const Index t = s.frames();
  const Index kept = s.config.bins_kept;
  if (s.bins() != kept) {
    throw ConfigError("spectrogram rows do not match config bins_kept");
  }
  const std::vector<double> win = analysis_window(s.config);
  const Index out_len = (t - 1) * hop + n;

  std::vector<double> acc(static_cast<std::size_t>(out_len), 0.0);
  std::vector<double> wsum(static_cast<std::size_t>(out_len), 0.0);
  std::vector<Cpx> frame(static_cast<std::size_t>(n));

  for (Index v = 0; v < t; ++v) {
    for (Index i = 0; i < n; ++i) {
      frame[static_cast<std::size_t>(i)] = Cpx(0.0, 0.0);
    }
    for (Index b = 0; b < kept; ++b) {
      const double m = s.magnitudes(b, v);
      const double ph = s.phases(b, v);
      Cpx x(m * std::cos(ph), m * std::sin(ph));
      if (b == 0 || b == n / 2) {
        x = Cpx(x.real(), 0.0);  // DC and Nyquist are real for real signals
      }
      frame[static_cast<std::size_t>(b)] = x;
      if (b > 0 && b < n / 2) {
        frame[static_cast<std::size_t>(n - b)] = std::conj(x);
      }
    }
    ifft_inplace(frame);
    const Index off = v * hop;
    for (Index i = 0; i < n; ++i) {
      const double wi = win[static_cast<std::size_t>(i)];
      acc[static_cast<std::size_t>(off + i)] +=
          frame[static_cast<std::size_t>(i)].real() * wi;
      wsum[static_cast<std::size_t>(off + i)] += wi * wi;
    }
  }

  Waveform out;
  out.sample_rate = s.sample_rate;
  out.samples.resize(static_cast<std::size_t>(out_len));
  for (Index i = 0; i < out_len; ++i) {
    const double d = wsum[static_cast<std::size_t>(i)];
    out.samples[static_cast<std::size_t>(i)] =
        d > 1e-12 ? acc[static_cast<std::size_t>(i)] / d : 0.0;
  }
  return out;
}

// Synthesizes a waveform from an estimated magnitude matrix using the phase
// of the noisy observation.
inline Waveform reconstruct_with_phase(const Mat<double>& clean_mag,
                                       const Spectrogram& noisy) {
  if (clean_mag.rows() != noisy.magnitudes.rows() ||
      clean_mag.cols() != noisy.magnitudes.cols()) {
    throw ConfigError("magnitude shape does not match the noisy spectrogram");
  }
  Spectrogram s;
  s.magnitudes = clean_mag;
  s.phases = noisy.phases;
  s.config = noisy.config;
  s.sample_rate = noisy.sample_rate;
  return istft(s);
}

}  // namespace ehnet

#endif  // EHNET_STFT_HPP_
