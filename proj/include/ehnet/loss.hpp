// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_LOSS_HPP_
#define EHNET_LOSS_HPP_

#include "ehnet/common.hpp"

namespace ehnet {

// Half squared Frobenius distance over the first valid_frames columns
// (all columns when valid_frames < 0). Accumulates in double regardless of
// the storage precision.
template <class S>
double mse_loss(const Mat<S>& pred, const Mat<S>& target, Index valid_frames = -1) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw ConfigError("loss operands must have equal shapes");
  }
  const Index cols = valid_frames < 0 ? pred.cols() : valid_frames;
  if (cols > pred.cols()) {
    throw ConfigError("valid frame count exceeds the matrix width");
  }
  double acc = 0.0;
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < pred.rows(); ++r) {
      const double d = static_cast<double>(pred(r, c)) - static_cast<double>(target(r, c));
      acc += d * d;
    }
  }
  return 0.5 * acc;
}

}  // namespace ehnet

#endif  // EHNET_LOSS_HPP_
