// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_MIXING_HPP_
#define EHNET_MIXING_HPP_

#include <cmath>
#include <limits>
#include <utility>

#include "ehnet/common.hpp"
#include "ehnet/rng.hpp"
#include "ehnet/wav.hpp"

namespace ehnet {

// Mean squared amplitude over the whole signal.
inline double signal_power(const Waveform& w) {
  double acc = 0.0;
  for (double s : w.samples) {
    acc += s * s;
  }
  return acc / static_cast<double>(w.samples.size());
}

inline double rms(const Waveform& w) { return std::sqrt(signal_power(w)); }

// Length-matches noise to `target_len`: shorter noise is looped from a
// seeded offset, longer noise is cropped at a seeded offset.
inline Waveform fit_noise_to_length(const Waveform& noise, Index target_len,
                                    CounterRng& rng) {
  const Index n = noise.length();
  Waveform out;
  out.sample_rate = noise.sample_rate;
  out.samples.resize(static_cast<std::size_t>(target_len));
  if (n >= target_len) {
    const Index max_off = n - target_len;
    const Index off = max_off > 0 ? static_cast<Index>(rng.next_below(
                                        static_cast<std::uint64_t>(max_off + 1)))
                                  : 0;
    for (Index i = 0; i < target_len; ++i) {
      out.samples[static_cast<std::size_t>(i)] =
          noise.samples[static_cast<std::size_t>(off + i)];
    }
  } else {
    const Index off = static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(n)));
    for (Index i = 0; i < target_len; ++i) {
      out.samples[static_cast<std::size_t>(i)] =
          noise.samples[static_cast<std::size_t>((off + i) % n)];
    }
  }
  return out;
}

// Scales noise so that 10*log10(P_clean / P_scaled_noise) equals snr_db,
// with powers measured over the whole clean signal, and adds it to the
// clean signal. A +infinity target disables mixing. Returns the mixture
// and the scaled noise.
inline std::pair<Waveform, Waveform> mix_at_snr(const Waveform& clean,
                                                const Waveform& noise, double snr_db) {
  if (clean.sample_rate != noise.sample_rate) {
    throw DataError("clean and noise sample rates differ");
  }
  if (noise.length() < clean.length()) {
    throw DataError("noise must be at least as long as the clean signal");
  }
  if (snr_db == std::numeric_limits<double>::infinity()) {
    Waveform silent;
    silent.sample_rate = clean.sample_rate;
    silent.samples.assign(clean.samples.size(), 0.0);
    return {clean, silent};
  }
  if (!std::isfinite(snr_db)) {
    throw DataError("target SNR must be finite or +inf");
  }
  const double p_clean = signal_power(clean);
  Waveform cut = noise;
  cut.samples.resize(clean.samples.size());
  const double p_noise = signal_power(cut);
  if (p_clean <= 0.0 || p_noise <= 0.0) {
    throw DataError("degenerate source: zero-power clean or noise signal");
  }
  const double alpha = std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));

  Waveform scaled = cut;
  for (auto& s : scaled.samples) {
    s *= alpha;
  }
  Waveform noisy = clean;
  for (std::size_t i = 0; i < noisy.samples.size(); ++i) {
    noisy.samples[i] += scaled.samples[i];
  }
  return {std::move(noisy), std::move(scaled)};
}

// Full linear convolution with the impulse response, truncated to the input
// length and rescaled to the input's RMS.
inline Waveform apply_rir(const Waveform& clean, const Waveform& rir) {
  if (clean.sample_rate != rir.sample_rate) {
    throw DataError("clean and impulse response sample rates differ");
  }
  if (rir.samples.empty()) {
    throw DataError("empty impulse response");
  }
  const Index n = clean.length();
  const Index m = rir.length();
  Waveform out;
  out.sample_rate = clean.sample_rate;
  out.samples.assign(static_cast<std::size_t>(n), 0.0);
  for (Index i = 0; i < n; ++i) {
    const double x = clean.samples[static_cast<std::size_t>(i)];
    if (x == 0.0) continue;
    const Index last = std::min(m, n - i);
    for (Index j = 0; j < last; ++j) {
      out.samples[static_cast<std::size_t>(i + j)] +=
          x * rir.samples[static_cast<std::size_t>(j)];
    }
  }
  const double out_rms = rms(out);
  if (out_rms <= 0.0) {
    throw DataError("impulse response has no energy");
  }
  const double gain = rms(clean) / out_rms;
  for (auto& s : out.samples) {
    s *= gain;
  }
  return out;
}

}  // namespace ehnet

#endif  // EHNET_MIXING_HPP_
