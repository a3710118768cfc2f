// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_CONV_HPP_
#define EHNET_CONV_HPP_

#include <vector>

#include "ehnet/common.hpp"

namespace ehnet {

// Frequency-strided convolution bank. Kernels slide with stride
// `freq_stride` along frequency and stride 1 along time; "convolution" is
// cross-correlation (no kernel flip), the usual network convention.
template <class S>
struct ConvParams {
  std::vector<Mat<S>> kernels;  // each kernel_height x kernel_width
  Index freq_stride = 1;

  Index count() const { return static_cast<Index>(kernels.size()); }
  Index kernel_height() const { return kernels.empty() ? 0 : kernels.front().rows(); }
  Index kernel_width() const { return kernels.empty() ? 0 : kernels.front().cols(); }
};

inline Index conv_positions(Index bins, Index kernel_height, Index freq_stride) {
  if (bins < kernel_height) {
    throw ConfigError("input has fewer bins than the kernel height");
  }
  if (freq_stride < 1) {
    throw ConfigError("freq_stride must be >= 1");
  }
  return (bins - kernel_height) / freq_stride + 1;
}

// Zero-pads floor(w/2) frames on each side so that a width-w kernel with
// unit time stride preserves the frame count.
template <class S>
Mat<S> pad_time(const Mat<S>& x, Index kernel_width) {
  if (kernel_width % 2 == 0) {
    throw ConfigError("kernel width must be odd");
  }
  const Index half = kernel_width / 2;
  Mat<S> out = Mat<S>::Zero(x.rows(), x.cols() + 2 * half);
  out.block(0, half, x.rows(), x.cols()) = x;
  return out;
}

// Pre-activation feature maps over an already padded input.
// maps[j](u, v) = sum_{m,n} x_padded(u*stride + m, v + n) * kernel_j(m, n)
template <class S>
std::vector<Mat<S>> conv_preactivations(const Mat<S>& x_padded, const ConvParams<S>& cp,
                                        Index frames) {
  const Index b = cp.kernel_height();
  const Index w = cp.kernel_width();
  const Index p = conv_positions(x_padded.rows(), b, cp.freq_stride);
  if (x_padded.cols() != frames + w - 1) {
    throw ConfigError("padded input width does not match kernel width");
  }
  std::vector<Mat<S>> maps;
  maps.reserve(static_cast<std::size_t>(cp.count()));
  for (Index j = 0; j < cp.count(); ++j) {
    const Mat<S>& z = cp.kernels[static_cast<std::size_t>(j)];
    Mat<S> pre(p, frames);
    for (Index u = 0; u < p; ++u) {
      for (Index v = 0; v < frames; ++v) {
        pre(u, v) = x_padded.block(u * cp.freq_stride, v, b, w).cwiseProduct(z).sum();
      }
    }
    maps.push_back(std::move(pre));
  }
  return maps;
}

// Forward pass: pad, correlate, ReLU. Returns k maps of shape p x t.
template <class S>
std::vector<Mat<S>> conv_forward(const Mat<S>& x, const ConvParams<S>& cp) {
  const Mat<S> padded = pad_time(x, cp.kernel_width());
  std::vector<Mat<S>> maps = conv_preactivations(padded, cp, x.cols());
  for (auto& m : maps) {
    m = m.cwiseMax(S(0));
  }
  return maps;
}

// Vertical concatenation of the k feature maps: row j*p + r holds row r of
// map j.
template <class S>
Mat<S> stack_features(const std::vector<Mat<S>>& maps) {
  if (maps.empty()) {
    throw ConfigError("no feature maps to stack");
  }
  const Index p = maps.front().rows();
  const Index t = maps.front().cols();
  Mat<S> h(static_cast<Index>(maps.size()) * p, t);
  for (std::size_t j = 0; j < maps.size(); ++j) {
    h.block(static_cast<Index>(j) * p, 0, p, t) = maps[j];
  }
  return h;
}

template <class S>
std::vector<Mat<S>> unstack_features(const Mat<S>& h, Index map_count) {
  const Index p = h.rows() / map_count;
  std::vector<Mat<S>> maps;
  maps.reserve(static_cast<std::size_t>(map_count));
  for (Index j = 0; j < map_count; ++j) {
    maps.push_back(h.block(j * p, 0, p, h.cols()));
  }
  return maps;
}

// Kernel gradients for the strided correlation with the ReLU mask applied.
// d_maps holds dL/d(activated map); entries where the pre-activation is not
// strictly positive contribute nothing (subgradient 0 at the kink).
template <class S>
std::vector<Mat<S>> conv_kernel_gradients(const Mat<S>& x_padded, const ConvParams<S>& cp,
                                          const std::vector<Mat<S>>& preacts,
                                          const std::vector<Mat<S>>& d_maps) {
  const Index b = cp.kernel_height();
  const Index w = cp.kernel_width();
  std::vector<Mat<S>> grads;
  grads.reserve(static_cast<std::size_t>(cp.count()));
  for (Index j = 0; j < cp.count(); ++j) {
    const Mat<S>& pre = preacts[static_cast<std::size_t>(j)];
    const Mat<S>& dm = d_maps[static_cast<std::size_t>(j)];
    Mat<S> g = Mat<S>::Zero(b, w);
    for (Index u = 0; u < pre.rows(); ++u) {
      for (Index v = 0; v < pre.cols(); ++v) {
        if (pre(u, v) > S(0)) {
          g += dm(u, v) * x_padded.block(u * cp.freq_stride, v, b, w);
        }
      }
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

}  // namespace ehnet

#endif  // EHNET_CONV_HPP_
