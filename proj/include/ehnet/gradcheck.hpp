// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_GRADCHECK_HPP_
#define EHNET_GRADCHECK_HPP_

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "ehnet/backprop.hpp"
#include "ehnet/common.hpp"
#include "ehnet/loss.hpp"
#include "ehnet/model.hpp"
#include "ehnet/rng.hpp"

namespace ehnet {

inline Hyper tiny_hyper() {
  Hyper h;
  h.bins = 8;
  h.kernel_count = 3;
  h.kernel_height = 4;
  h.kernel_width = 3;
  h.freq_stride = 2;
  h.hidden = {5};
  return h;
}

struct GradCheckSpec {
  Hyper hyper = tiny_hyper();
  Index frames = 6;
  Index trials = 20;
  double step = 1e-4;
  double tolerance = 1e-4;
  std::uint64_t seed = 1;
  Index max_coords_per_tensor = 0;  // 0 = every coordinate
  bool inject_sign_flip = false;    // test hook: corrupts one analytic tensor
};

struct GradCheckReport {
  struct TensorStat {
    std::string name;
    double max_rel_err = 0.0;
    bool pass = true;
  };
  std::vector<TensorStat> tensors;
  double tolerance = 0.0;
  bool pass = true;

  const TensorStat* find(const std::string& name) const {
    for (const auto& t : tensors) {
      if (t.name == name) return &t;
    }
    return nullptr;
  }
};

// Compares backward() to central finite differences of the loss for
// randomly drawn parameters, inputs and targets. Relative error uses
// |a - n| / max(|a|, |n|, 1e-6).
template <class S>
GradCheckReport run_grad_check(const GradCheckSpec& spec) {
  validate_hyper(spec.hyper);
  std::map<std::string, double> worst;

  for (Index trial = 0; trial < spec.trials; ++trial) {
    CounterRng rng(spec.seed + static_cast<std::uint64_t>(trial));
    ModelParams<S> params = zero_params<S>(spec.hyper);
    visit_tensors(
        [&rng](const char*, Mat<S>& t) {
          for (Index r = 0; r < t.rows(); ++r) {
            for (Index c = 0; c < t.cols(); ++c) {
              t(r, c) = static_cast<S>(rng.next_uniform(-0.5, 0.5));
            }
          }
        },
        params);

    Mat<S> x(spec.hyper.bins, spec.frames);
    Mat<S> target(spec.hyper.bins, spec.frames);
    for (Index r = 0; r < spec.hyper.bins; ++r) {
      for (Index c = 0; c < spec.frames; ++c) {
        x(r, c) = static_cast<S>(rng.next_uniform(0.0, 1.0));
        target(r, c) = static_cast<S>(rng.next_uniform(0.0, 1.0));
      }
    }

    ForwardCache<S> cache;
    forward(x, params, &cache);
    GradientSet<S> analytic = backward(params, cache, target);
    if (spec.inject_sign_flip) {
      analytic.conv.kernels.front() *= S(-1);
    }

    visit_tensors(
        [&](const char* name, Mat<S>& p, const Mat<S>& a) {
          const Index total = p.size();
          Index count = total;
          if (spec.max_coords_per_tensor > 0) {
            count = std::min(total, spec.max_coords_per_tensor);
          }
          for (Index pick = 0; pick < count; ++pick) {
            Index flat = pick;
            if (count < total) {
              flat = static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(total)));
            }
            const Index r = flat % p.rows();
            const Index c = flat / p.rows();
            const S saved = p(r, c);
            p(r, c) = saved + static_cast<S>(spec.step);
            const double loss_plus = mse_loss(forward(x, params), target);
            p(r, c) = saved - static_cast<S>(spec.step);
            const double loss_minus = mse_loss(forward(x, params), target);
            p(r, c) = saved;
            const double numeric = (loss_plus - loss_minus) / (2.0 * spec.step);
            const double av = static_cast<double>(a(r, c));
            const double denom = std::max({std::abs(av), std::abs(numeric), 1e-6});
            const double rel = std::abs(av - numeric) / denom;
            auto [it, inserted] = worst.emplace(name, rel);
            if (!inserted) {
              it->second = std::max(it->second, rel);
            }
          }
        },
        params, analytic);
  }

  GradCheckReport report;
  report.tolerance = spec.tolerance;
  for (const auto& [name, err] : worst) {
    GradCheckReport::TensorStat stat;
    stat.name = name;
    stat.max_rel_err = err;
    stat.pass = err <= spec.tolerance;
    report.pass = report.pass && stat.pass;
    report.tensors.push_back(std::move(stat));
  }
  return report;
}

}  // namespace ehnet

#endif  // EHNET_GRADCHECK_HPP_
