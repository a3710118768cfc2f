// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_ADADELTA_HPP_
#define EHNET_ADADELTA_HPP_

#include <utility>
#include <vector>

#include "ehnet/backprop.hpp"
#include "ehnet/common.hpp"
#include "ehnet/model.hpp"

namespace ehnet {

// Piecewise-constant multiplier on the AdaDelta step. The default trace is
// 1.0 from epoch 0, 0.1 from epoch 60 and 0.01 from epoch 120 onward.
struct LrSchedule {
  std::vector<std::pair<Index, double>> points{{0, 1.0}, {60, 0.1}, {120, 0.01}};

  double multiplier_at(Index epoch) const {
    double mult = 1.0;
    for (const auto& [threshold, value] : points) {
      if (epoch >= threshold) {
        mult = value;
      } else {
        break;
      }
    }
    return mult;
  }
};

// Running averages of squared gradients and squared updates, one entry per
// trainable tensor.
template <class S>
struct OptimizerState {
  GradientSet<S> grad_sq;
  GradientSet<S> delta_sq;
  double rho = 0.95;
  double epsilon = 1e-6;
};

template <class S>
OptimizerState<S> make_optimizer_state(const ModelParams<S>& params, double rho = 0.95,
                                       double epsilon = 1e-6) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw ConfigError("adadelta rho must lie in (0, 1)");
  }
  if (!(epsilon > 0.0)) {
    throw ConfigError("adadelta epsilon must be positive");
  }
  OptimizerState<S> st;
  st.grad_sq = zero_params<S>(params.hyper);
  st.delta_sq = zero_params<S>(params.hyper);
  st.rho = rho;
  st.epsilon = epsilon;
  return st;
}

// One update:
//   E[g^2]  <- rho E[g^2] + (1-rho) g^2
//   dx      = -(RMS(dx) / RMS(g)) * g * lr_multiplier
//   E[dx^2] <- rho E[dx^2] + (1-rho) dx^2
//   theta  += dx
// with RMS(z) = sqrt(E[z^2] + epsilon). A non-finite gradient rejects the
// whole step.
template <class S>
void adadelta_step(ModelParams<S>* params, const GradientSet<S>& grads,
                   OptimizerState<S>* state, double lr_multiplier) {
  bool finite = true;
  visit_tensors([&finite](const char*, const Mat<S>& g) { finite = finite && g.allFinite(); },
                grads);
  if (!finite) {
    throw NumericError("non-finite gradient: optimizer step rejected");
  }
  const S rho = static_cast<S>(state->rho);
  const S eps = static_cast<S>(state->epsilon);
  const S lr = static_cast<S>(lr_multiplier);
  visit_tensors(
      [rho, eps, lr](const char*, Mat<S>& p, const Mat<S>& g, Mat<S>& eg2, Mat<S>& edx2) {
        eg2.array() = rho * eg2.array() + (S(1) - rho) * g.array().square();
        Mat<S> dx = (-(edx2.array() + eps).sqrt() / (eg2.array() + eps).sqrt() *
                     g.array() * lr)
                        .matrix();
        edx2.array() = rho * edx2.array() + (S(1) - rho) * dx.array().square();
        p += dx;
      },
      *params, grads, state->grad_sq, state->delta_sq);
}

}  // namespace ehnet

#endif  // EHNET_ADADELTA_HPP_
