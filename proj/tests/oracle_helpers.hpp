// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Independent naive-loop reference implementations used by the test and
// acceptance suites. These deliberately avoid the library's computation
// paths (no FFT, no Eigen products, no batched projections) so that an
// agreement check is meaningful.

#ifndef EHNET_TESTS_ORACLE_HELPERS_HPP_
#define EHNET_TESTS_ORACLE_HELPERS_HPP_

#include <cmath>
#include <complex>
#include <vector>

#include "ehnet/common.hpp"
#include "ehnet/rng.hpp"

namespace oracle {

using ehnet::Index;
using ehnet::Mat;
using ehnet::Vec;

// O(n^2) DFT of a real frame.
inline std::vector<std::complex<double>> dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  const double pi = 3.141592653589793238462643383279502884;
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double ang = -2.0 * pi * static_cast<double>(k) *
                         static_cast<double>(i) / static_cast<double>(n);
      acc += x[i] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

// Triple-loop strided cross-correlation with ReLU, one kernel.
inline Mat<double> conv_map(const Mat<double>& x_padded, const Mat<double>& kernel,
                            Index freq_stride, Index t) {
  const Index b = kernel.rows();
  const Index w = kernel.cols();
  const Index p = (x_padded.rows() - b) / freq_stride + 1;
  Mat<double> out(p, t);
  for (Index u = 0; u < p; ++u) {
    for (Index v = 0; v < t; ++v) {
      double acc = 0.0;
      for (Index m = 0; m < b; ++m) {
        for (Index n = 0; n < w; ++n) {
          acc += x_padded(u * freq_stride + m, v + n) * kernel(m, n);
        }
      }
      out(u, v) = acc > 0.0 ? acc : 0.0;
    }
  }
  return out;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Scalar (non-vectorized) peephole LSTM recurrence over one sequence.
// Weights are addressed entry by entry; no matrix ops.
struct LstmWeights {
  Mat<double> w_xi, w_xf, w_xc, w_xo;
  Mat<double> w_hi, w_hf, w_hc, w_ho;
  Vec<double> p_ci, p_cf, p_co;
};

inline void lstm_scalar_step(const LstmWeights& p, const Vec<double>& x,
                             const Vec<double>& h_prev, const Vec<double>& c_prev,
                             Vec<double>* h_out, Vec<double>* c_out) {
  const Index hidden = p.w_xi.rows();
  const Index in = p.w_xi.cols();
  Vec<double> i(hidden), f(hidden), g(hidden), o(hidden);
  Vec<double> c(hidden), h(hidden);
  for (Index r = 0; r < hidden; ++r) {
    double ai = 0.0, af = 0.0, ag = 0.0, ao = 0.0;
    for (Index cidx = 0; cidx < in; ++cidx) {
      ai += p.w_xi(r, cidx) * x(cidx);
      af += p.w_xf(r, cidx) * x(cidx);
      ag += p.w_xc(r, cidx) * x(cidx);
      ao += p.w_xo(r, cidx) * x(cidx);
    }
    for (Index cidx = 0; cidx < hidden; ++cidx) {
      ai += p.w_hi(r, cidx) * h_prev(cidx);
      af += p.w_hf(r, cidx) * h_prev(cidx);
      ag += p.w_hc(r, cidx) * h_prev(cidx);
      ao += p.w_ho(r, cidx) * h_prev(cidx);
    }
    ai += p.p_ci(r) * c_prev(r);
    af += p.p_cf(r) * c_prev(r);
    i(r) = sigmoid(ai);
    f(r) = sigmoid(af);
    g(r) = std::tanh(ag);
    c(r) = f(r) * c_prev(r) + i(r) * g(r);
    ao += p.p_co(r) * c(r);
    o(r) = sigmoid(ao);
    h(r) = o(r) * std::tanh(c(r));
  }
  *h_out = h;
  *c_out = c;
}

// Runs the scalar recurrence across a whole sequence in one direction.
// If reverse is true the scan starts at the last column.
inline Mat<double> lstm_scalar_scan(const LstmWeights& p, const Mat<double>& x,
                                    bool reverse) {
  const Index hidden = p.w_xi.rows();
  const Index t = x.cols();
  Mat<double> h_all(hidden, t);
  Vec<double> h = Vec<double>::Zero(hidden);
  Vec<double> c = Vec<double>::Zero(hidden);
  for (Index step = 0; step < t; ++step) {
    const Index v = reverse ? t - 1 - step : step;
    Vec<double> h_next, c_next;
    lstm_scalar_step(p, x.col(v), h, c, &h_next, &c_next);
    h = h_next;
    c = c_next;
    h_all.col(v) = h;
  }
  return h_all;
}

// Direct elementwise stats used against vectorized reductions.
inline double mse_loss_loop(const Mat<double>& pred, const Mat<double>& target) {
  double acc = 0.0;
  for (Index r = 0; r < pred.rows(); ++r) {
    for (Index c = 0; c < pred.cols(); ++c) {
      const double d = pred(r, c) - target(r, c);
      acc += d * d;
    }
  }
  return 0.5 * acc;
}

inline double lsd_loop(const Mat<double>& ref, const Mat<double>& est, double floor_eps) {
  double frame_acc = 0.0;
  for (Index c = 0; c < ref.cols(); ++c) {
    double bin_acc = 0.0;
    for (Index r = 0; r < ref.rows(); ++r) {
      const double ratio = 20.0 * std::log10((ref(r, c) + floor_eps) / (est(r, c) + floor_eps));
      bin_acc += ratio * ratio;
    }
    frame_acc += std::sqrt(bin_acc / static_cast<double>(ref.rows()));
  }
  return frame_acc / static_cast<double>(ref.cols());
}

// O(n*m) direct linear convolution.
inline std::vector<double> convolve_loop(const std::vector<double>& x,
                                         const std::vector<double>& h) {
  std::vector<double> out(x.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < h.size(); ++j) {
      out[i + j] += x[i] * h[j];
    }
  }
  return out;
}

inline Mat<double> random_matrix(ehnet::CounterRng& rng, Index rows, Index cols,
                                 double lo, double hi) {
  Mat<double> m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = rng.next_uniform(lo, hi);
    }
  }
  return m;
}

inline Vec<double> random_vector(ehnet::CounterRng& rng, Index n, double lo, double hi) {
  Vec<double> v(n);
  for (Index i = 0; i < n; ++i) {
    v(i) = rng.next_uniform(lo, hi);
  }
  return v;
}

}  // namespace oracle

#endif  // EHNET_TESTS_ORACLE_HELPERS_HPP_
