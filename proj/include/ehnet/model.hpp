// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_MODEL_HPP_
#define EHNET_MODEL_HPP_

#include <cmath>
#include <cstdio>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "ehnet/common.hpp"
#include "ehnet/conv.hpp"
#include "ehnet/lstm.hpp"
#include "ehnet/rng.hpp"

namespace ehnet {

// Architecture description. Defaults are the full-scale configuration:
// 256 kernels of size 32x11 with stride 16x1 and two bidirectional layers
// of 1024 hidden units over 256-bin spectrograms.
struct Hyper {
  Index bins = 256;          // d: rows of input and output spectrograms
  Index kernel_count = 256;  // k
  Index kernel_height = 32;  // b
  Index kernel_width = 11;   // w (odd)
  Index freq_stride = 16;
  std::vector<Index> hidden = {1024, 1024};
  double input_scale = 1.0;  // optional global input scaling; 1 = off

  Index positions() const { return (bins - kernel_height) / freq_stride + 1; }
  Index lstm_input_size() const { return positions() * kernel_count; }
  Index output_width() const { return 2 * hidden.back(); }  // q
};

// Throws on inconsistent dimensions; returns human-readable warnings for
// legal-but-suspicious settings.
inline std::vector<std::string> validate_hyper(const Hyper& h) {
  if (h.bins < 1 || h.kernel_count < 1) {
    throw ConfigError("bins and kernel_count must be positive");
  }
  if (h.kernel_width % 2 == 0) {
    throw ConfigError("kernel width must be odd");
  }
  if (h.bins < h.kernel_height) {
    throw ConfigError("kernel height exceeds the number of frequency bins");
  }
  if (h.freq_stride < 1) {
    throw ConfigError("freq_stride must be >= 1");
  }
  if (h.hidden.empty()) {
    throw ConfigError("at least one recurrent layer is required");
  }
  for (Index size : h.hidden) {
    if (size < 1) {
      throw ConfigError("hidden sizes must be positive");
    }
  }
  if (!(h.input_scale > 0.0) || !std::isfinite(h.input_scale)) {
    throw ConfigError("input_scale must be positive and finite");
  }
  std::vector<std::string> warnings;
  if ((h.bins - h.kernel_height) % h.freq_stride != 0) {
    warnings.push_back("freq_stride does not divide (bins - kernel_height); "
                       "the lowest positions of the top bins are never covered");
  }
  return warnings;
}

template <class S>
struct OutputParams {
  Mat<S> w;  // d x q
  Mat<S> b;  // d x 1
};

// Frame-wise affine map truncated at zero.
template <class S>
Mat<S> output_forward(const Mat<S>& htilde, const OutputParams<S>& out,
                      Mat<S>* pre_out = nullptr) {
  if (out.w.cols() != htilde.rows()) {
    throw ConfigError("output layer width does not match recurrent output");
  }
  Mat<S> pre = out.w * htilde;
  pre += out.b.replicate(1, htilde.cols());
  if (pre_out) {
    *pre_out = pre;
  }
  return pre.cwiseMax(S(0));
}

template <class S>
struct ModelParams {
  ConvParams<S> conv;
  std::vector<LstmLayerParams<S>> lstm;
  OutputParams<S> out;
  Hyper hyper;
};

namespace detail {

template <class S>
LstmDirParams<S> make_dir(Index hidden, Index input) {
  LstmDirParams<S> d;
  d.w_xi = Mat<S>::Zero(hidden, input);
  d.w_xf = Mat<S>::Zero(hidden, input);
  d.w_xc = Mat<S>::Zero(hidden, input);
  d.w_xo = Mat<S>::Zero(hidden, input);
  d.w_hi = Mat<S>::Zero(hidden, hidden);
  d.w_hf = Mat<S>::Zero(hidden, hidden);
  d.w_hc = Mat<S>::Zero(hidden, hidden);
  d.w_ho = Mat<S>::Zero(hidden, hidden);
  d.p_ci = Mat<S>::Zero(hidden, 1);
  d.p_cf = Mat<S>::Zero(hidden, 1);
  d.p_co = Mat<S>::Zero(hidden, 1);
  return d;
}

}  // namespace detail

// All-zero parameter set with the shapes implied by the architecture.
template <class S>
ModelParams<S> zero_params(const Hyper& hyper) {
  validate_hyper(hyper);
  ModelParams<S> m;
  m.hyper = hyper;
  m.conv.freq_stride = hyper.freq_stride;
  m.conv.kernels.assign(static_cast<std::size_t>(hyper.kernel_count),
                        Mat<S>::Zero(hyper.kernel_height, hyper.kernel_width));
  Index input = hyper.lstm_input_size();
  for (Index size : hyper.hidden) {
    LstmLayerParams<S> layer;
    layer.fwd = detail::make_dir<S>(size, input);
    layer.bwd = detail::make_dir<S>(size, input);
    m.lstm.push_back(std::move(layer));
    input = 2 * size;
  }
  m.out.w = Mat<S>::Zero(hyper.bins, hyper.output_width());
  m.out.b = Mat<S>::Zero(hyper.bins, 1);
  return m;
}

// Applies f(name, tensor...) to every trainable tensor of each model in the
// pack, in a fixed order. All models must share one architecture.
template <class F, class M, class... Rest>
void visit_tensors(F&& f, M& first, Rest&... rest) {
  char name[64];
  for (std::size_t j = 0; j < first.conv.kernels.size(); ++j) {
    std::snprintf(name, sizeof(name), "conv.kernel%03zu", j);
    f(name, first.conv.kernels[j], rest.conv.kernels[j]...);
  }
  using Sc = typename std::decay_t<decltype(first.out.w(0, 0))>;
  static const std::pair<const char*, Mat<Sc> LstmDirParams<Sc>::*> kDirTensors[] = {
      {"w_xi", &LstmDirParams<Sc>::w_xi}, {"w_xf", &LstmDirParams<Sc>::w_xf},
      {"w_xc", &LstmDirParams<Sc>::w_xc}, {"w_xo", &LstmDirParams<Sc>::w_xo},
      {"w_hi", &LstmDirParams<Sc>::w_hi}, {"w_hf", &LstmDirParams<Sc>::w_hf},
      {"w_hc", &LstmDirParams<Sc>::w_hc}, {"w_ho", &LstmDirParams<Sc>::w_ho},
      {"p_ci", &LstmDirParams<Sc>::p_ci}, {"p_cf", &LstmDirParams<Sc>::p_cf},
      {"p_co", &LstmDirParams<Sc>::p_co}};
  for (std::size_t l = 0; l < first.lstm.size(); ++l) {
    for (const auto& [tag, member] : kDirTensors) {
      std::snprintf(name, sizeof(name), "lstm%zu.fwd.%s", l, tag);
      f(name, first.lstm[l].fwd.*member, rest.lstm[l].fwd.*member...);
      std::snprintf(name, sizeof(name), "lstm%zu.bwd.%s", l, tag);
      f(name, first.lstm[l].bwd.*member, rest.lstm[l].bwd.*member...);
    }
  }
  f("out.w", first.out.w, rest.out.w...);
  f("out.b", first.out.b, rest.out.b...);
}

// Seeded initialization: weights uniform in +-sqrt(6/(fan_in + fan_out)),
// peepholes and output bias zero.
template <class S>
ModelParams<S> init_params(const Hyper& hyper, std::uint64_t seed) {
  ModelParams<S> m = zero_params<S>(hyper);
  CounterRng rng(seed);
  auto fill = [&rng](Mat<S>& t, double limit) {
    for (Index r = 0; r < t.rows(); ++r) {
      for (Index c = 0; c < t.cols(); ++c) {
        t(r, c) = static_cast<S>(rng.next_uniform(-limit, limit));
      }
    }
  };
  const double conv_limit = std::sqrt(
      6.0 / static_cast<double>(hyper.kernel_height * hyper.kernel_width +
                                hyper.kernel_count));
  for (auto& z : m.conv.kernels) {
    fill(z, conv_limit);
  }
  for (auto& layer : m.lstm) {
    for (auto* dir : {&layer.fwd, &layer.bwd}) {
      const double in_limit =
          std::sqrt(6.0 / static_cast<double>(dir->input_size() + dir->hidden_size()));
      const double rec_limit =
          std::sqrt(6.0 / static_cast<double>(2 * dir->hidden_size()));
      fill(dir->w_xi, in_limit);
      fill(dir->w_xf, in_limit);
      fill(dir->w_xc, in_limit);
      fill(dir->w_xo, in_limit);
      fill(dir->w_hi, rec_limit);
      fill(dir->w_hf, rec_limit);
      fill(dir->w_hc, rec_limit);
      fill(dir->w_ho, rec_limit);
      // peepholes stay zero
    }
  }
  const double out_limit = std::sqrt(
      6.0 / static_cast<double>(hyper.output_width() + hyper.bins));
  fill(m.out.w, out_limit);
  return m;
}

// Everything the backward pass needs from one training-mode forward call.
template <class S>
struct ForwardCache {
  Mat<S> x_scaled;               // d x t, input after the optional global scale
  Mat<S> x_padded;               // d x (t + w - 1)
  std::vector<Mat<S>> conv_pre;  // k maps of p x t, pre-activation
  Mat<S> stacked;                // pk x t, after ReLU and stacking
  std::vector<Mat<S>> layer_inputs;
  std::vector<LstmLayerCache<S>> lstm;
  Mat<S> htilde;   // q x t
  Mat<S> out_pre;  // d x t before truncation
  Mat<S> pred;     // d x t
  long clip_events = 0;
};

// Full forward pass. Pass a cache to run in training mode.
template <class S>
Mat<S> forward(const Mat<S>& x, const ModelParams<S>& m, ForwardCache<S>* cache = nullptr) {
  if (x.rows() != m.hyper.bins) {
    throw ConfigError("input bin count does not match the model");
  }
  if (x.cols() < 1) {
    throw ConfigError("input must contain at least one frame");
  }
  Mat<S> scaled = x;
  if (m.hyper.input_scale != 1.0) {
    scaled *= static_cast<S>(m.hyper.input_scale);
  }
  Mat<S> padded = pad_time(scaled, m.hyper.kernel_width);
  std::vector<Mat<S>> pre = conv_preactivations(padded, m.conv, x.cols());
  std::vector<Mat<S>> maps;
  maps.reserve(pre.size());
  for (const auto& p : pre) {
    maps.push_back(p.cwiseMax(S(0)));
  }
  Mat<S> stacked = stack_features(maps);

  std::vector<LstmLayerCache<S>>* lstm_caches = cache ? &cache->lstm : nullptr;
  std::vector<Mat<S>>* layer_inputs = cache ? &cache->layer_inputs : nullptr;
  if (cache) {
    cache->layer_inputs.clear();
  }
  Mat<S> htilde = bilstm_forward(m.lstm, stacked, lstm_caches, layer_inputs);

  Mat<S> out_pre;
  Mat<S> predmat = output_forward(htilde, m.out, cache ? &out_pre : nullptr);

  if (cache) {
    cache->x_scaled = std::move(scaled);
    cache->x_padded = std::move(padded);
    cache->conv_pre = std::move(pre);
    cache->stacked = std::move(stacked);
    cache->htilde = std::move(htilde);
    cache->out_pre = std::move(out_pre);
    cache->pred = predmat;
    cache->clip_events = 0;
    for (const auto& lc : cache->lstm) {
      cache->clip_events += lc.fwd.clip_events + lc.bwd.clip_events;
    }
  }
  return predmat;
}

}  // namespace ehnet

#endif  // EHNET_MODEL_HPP_
