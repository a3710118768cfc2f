// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_BACKPROP_HPP_
#define EHNET_BACKPROP_HPP_

#include <vector>

#include "ehnet/common.hpp"
#include "ehnet/model.hpp"

namespace ehnet {

// Gradients share the parameter layout; hyper rides along for shape checks.
template <class S>
using GradientSet = ModelParams<S>;

// Exact gradient of mse_loss(forward(x), target) with respect to every
// trainable tensor, for a single utterance. Frames at and beyond
// valid_frames are masked out of both loss and gradient. Minibatch
// averaging is the caller's job.
template <class S>
GradientSet<S> backward(const ModelParams<S>& m, const ForwardCache<S>& cache,
                        const Mat<S>& target, Index valid_frames = -1) {
  if (target.rows() != cache.pred.rows() || target.cols() != cache.pred.cols()) {
    throw ConfigError("target shape does not match the cached prediction");
  }
  const Index t = cache.pred.cols();
  const Index cols = valid_frames < 0 ? t : valid_frames;
  if (cols > t) {
    throw ConfigError("valid frame count exceeds the cached width");
  }

  GradientSet<S> grads = zero_params<S>(m.hyper);

  // Output layer: truncation mask, then the affine map's gradients.
  Mat<S> d_pre = Mat<S>::Zero(m.hyper.bins, t);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < m.hyper.bins; ++r) {
      if (cache.out_pre(r, c) > S(0)) {
        d_pre(r, c) = cache.pred(r, c) - target(r, c);
      }
    }
  }
  grads.out.w = d_pre * cache.htilde.transpose();
  grads.out.b = d_pre.rowwise().sum();

  // Through the recurrent stack, top down.
  Mat<S> d_cur = m.out.w.transpose() * d_pre;
  for (std::size_t l = m.lstm.size(); l-- > 0;) {
    d_cur = bilstm_layer_backward(m.lstm[l], cache.layer_inputs[l], cache.lstm[l],
                                  d_cur, &grads.lstm[l]);
  }

  // Un-stack into per-map gradients, then the strided kernels.
  std::vector<Mat<S>> d_maps = unstack_features(d_cur, m.conv.count());
  grads.conv.kernels =
      conv_kernel_gradients(cache.x_padded, m.conv, cache.conv_pre, d_maps);
  grads.conv.freq_stride = m.conv.freq_stride;

  // The optional global input scale sits below the kernels; kernel
  // gradients already see the scaled input through the cache, so nothing
  // else depends on it.
  return grads;
}

}  // namespace ehnet

#endif  // EHNET_BACKPROP_HPP_
