// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef EHNET_LSTM_HPP_
#define EHNET_LSTM_HPP_

#include <utility>
#include <vector>

#include "ehnet/common.hpp"

namespace ehnet {

// Peephole LSTM weights for one scan direction. Gates carry no bias terms;
// peepholes are diagonal (stored as hidden-length columns). The cell is
//   i = s(W_xi x + W_hi h' + p_ci . c')
//   f = s(W_xf x + W_hf h' + p_cf . c')
//   c = f . c' + i . tanh(W_xc x + W_hc h')
//   o = s(W_xo x + W_ho h' + p_co . c)
//   h = o . tanh(c)
template <class S>
struct LstmDirParams {
  Mat<S> w_xi, w_xf, w_xc, w_xo;  // hidden x input
  Mat<S> w_hi, w_hf, w_hc, w_ho;  // hidden x hidden
  Mat<S> p_ci, p_cf, p_co;        // hidden x 1

  Index hidden_size() const { return w_xi.rows(); }
  Index input_size() const { return w_xi.cols(); }
};

template <class S>
struct LstmLayerParams {
  LstmDirParams<S> fwd;
  LstmDirParams<S> bwd;
};

// Cell states are clamped to this magnitude; the clamp is treated as
// pass-through in the backward pass and every activation is counted so
// callers can log it.
inline constexpr double kCellClip = 50.0;

template <class S>
struct LstmDirCache {
  Mat<S> i, f, g, o;  // gate activations / candidate, hidden x t
  Mat<S> c;           // cell states after clamping, hidden x t
  Mat<S> tc;          // tanh(c)
  Mat<S> h;           // hidden outputs, hidden x t
  long clip_events = 0;
};

template <class S>
struct LstmLayerCache {
  LstmDirCache<S> fwd, bwd;
};

namespace detail {

// One step given already-projected input contributions (columns of W_x* x).
template <class S>
void lstm_step_preprojected(const LstmDirParams<S>& p, const Vec<S>& ax_i,
                            const Vec<S>& ax_f, const Vec<S>& ax_c, const Vec<S>& ax_o,
                            const Vec<S>& h_prev, const Vec<S>& c_prev, Vec<S>* h_out,
                            Vec<S>* c_out, Vec<S>* i_out, Vec<S>* f_out, Vec<S>* g_out,
                            Vec<S>* o_out, long* clip_events) {
  const Index n = p.hidden_size();
  Vec<S> a_i = ax_i + p.w_hi * h_prev + p.p_ci.col(0).cwiseProduct(c_prev);
  Vec<S> a_f = ax_f + p.w_hf * h_prev + p.p_cf.col(0).cwiseProduct(c_prev);
  Vec<S> a_g = ax_c + p.w_hc * h_prev;

  Vec<S> i(n), f(n), g(n), c(n);
  for (Index r = 0; r < n; ++r) {
    i(r) = stable_sigmoid(a_i(r));
    f(r) = stable_sigmoid(a_f(r));
    g(r) = std::tanh(a_g(r));
    S cr = f(r) * c_prev(r) + i(r) * g(r);
    if (cr > S(kCellClip)) {
      cr = S(kCellClip);
      if (clip_events) ++*clip_events;
    } else if (cr < S(-kCellClip)) {
      cr = S(-kCellClip);
      if (clip_events) ++*clip_events;
    }
    c(r) = cr;
  }

  Vec<S> a_o = ax_o + p.w_ho * h_prev + p.p_co.col(0).cwiseProduct(c);
  Vec<S> o(n), h(n);
  for (Index r = 0; r < n; ++r) {
    o(r) = stable_sigmoid(a_o(r));
    h(r) = o(r) * std::tanh(c(r));
  }
  if (!h.allFinite() || !c.allFinite()) {
    throw NumericError("numeric overflow in cell");
  }
  *h_out = std::move(h);
  *c_out = std::move(c);
  if (i_out) *i_out = std::move(i);
  if (f_out) *f_out = std::move(f);
  if (g_out) *g_out = std::move(g);
  if (o_out) *o_out = std::move(o);
}

}  // namespace detail

// Single cell update from raw inputs.
template <class S>
std::pair<Vec<S>, Vec<S>> lstm_cell_step(const LstmDirParams<S>& p, const Vec<S>& x,
                                         const Vec<S>& h_prev, const Vec<S>& c_prev) {
  if (x.size() != p.input_size() || h_prev.size() != p.hidden_size() ||
      c_prev.size() != p.hidden_size()) {
    throw ConfigError("lstm cell input shapes are inconsistent");
  }
  Vec<S> h, c;
  detail::lstm_step_preprojected<S>(p, p.w_xi * x, p.w_xf * x, p.w_xc * x, p.w_xo * x,
                                    h_prev, c_prev, &h, &c, nullptr, nullptr, nullptr,
                                    nullptr, nullptr);
  return {std::move(h), std::move(c)};
}

// Scans a whole sequence in one direction (zero initial state). The input
// projections are batched into four matrix products; the recurrence itself
// is inherently sequential.
template <class S>
Mat<S> lstm_dir_forward(const LstmDirParams<S>& p, const Mat<S>& x, bool reverse,
                        LstmDirCache<S>* cache = nullptr) {
  const Index t = x.cols();
  const Index n = p.hidden_size();
  const Mat<S> ax_i = p.w_xi * x;
  const Mat<S> ax_f = p.w_xf * x;
  const Mat<S> ax_c = p.w_xc * x;
  const Mat<S> ax_o = p.w_xo * x;

  Mat<S> h_all(n, t);
  if (cache) {
    cache->i.resize(n, t);
    cache->f.resize(n, t);
    cache->g.resize(n, t);
    cache->o.resize(n, t);
    cache->c.resize(n, t);
    cache->tc.resize(n, t);
    cache->h.resize(n, t);
    cache->clip_events = 0;
  }

  Vec<S> h = Vec<S>::Zero(n);
  Vec<S> c = Vec<S>::Zero(n);
  long clip_events = 0;
  for (Index step = 0; step < t; ++step) {
    const Index v = reverse ? t - 1 - step : step;
    Vec<S> h_next, c_next, i, f, g, o;
    detail::lstm_step_preprojected<S>(p, ax_i.col(v), ax_f.col(v), ax_c.col(v),
                                      ax_o.col(v), h, c, &h_next, &c_next,
                                      cache ? &i : nullptr, cache ? &f : nullptr,
                                      cache ? &g : nullptr, cache ? &o : nullptr,
                                      &clip_events);
    h = std::move(h_next);
    c = std::move(c_next);
    h_all.col(v) = h;
    if (cache) {
      cache->i.col(v) = i;
      cache->f.col(v) = f;
      cache->g.col(v) = g;
      cache->o.col(v) = o;
      cache->c.col(v) = c;
      cache->tc.col(v) = c.array().tanh();
      cache->h.col(v) = h;
    }
  }
  if (cache) {
    cache->clip_events = clip_events;
  }
  return h_all;
}

// Bidirectional layer: forward scan stacked on top of backward scan.
template <class S>
Mat<S> bilstm_layer_forward(const LstmLayerParams<S>& layer, const Mat<S>& x,
                            LstmLayerCache<S>* cache = nullptr) {
  if (layer.fwd.input_size() != x.rows() || layer.bwd.input_size() != x.rows()) {
    throw ConfigError("lstm layer input size does not match its weights");
  }
  const Index n = layer.fwd.hidden_size();
  Mat<S> out(2 * n, x.cols());
  out.topRows(n) = lstm_dir_forward(layer.fwd, x, false, cache ? &cache->fwd : nullptr);
  out.bottomRows(n) = lstm_dir_forward(layer.bwd, x, true, cache ? &cache->bwd : nullptr);
  return out;
}

// Deep bidirectional scan; each layer consumes the previous concatenation.
template <class S>
Mat<S> bilstm_forward(const std::vector<LstmLayerParams<S>>& layers, const Mat<S>& x,
                      std::vector<LstmLayerCache<S>>* caches = nullptr,
                      std::vector<Mat<S>>* layer_inputs = nullptr) {
  if (layers.empty()) {
    throw ConfigError("at least one lstm layer is required");
  }
  if (caches) {
    caches->resize(layers.size());
  }
  Mat<S> cur = x;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layer_inputs) {
      layer_inputs->push_back(cur);
    }
    cur = bilstm_layer_forward(layers[l], cur, caches ? &(*caches)[l] : nullptr);
  }
  return cur;
}

// Gradients of one direction's scan. dh_out is dL/dh for this direction's
// outputs. Returns dL/dx and accumulates parameter gradients into *grads
// (which must be zero-initialized to the right shapes by the caller).
template <class S>
Mat<S> lstm_dir_backward(const LstmDirParams<S>& p, const Mat<S>& x,
                         const LstmDirCache<S>& cache, const Mat<S>& dh_out, bool reverse,
                         LstmDirParams<S>* grads) {
  const Index t = x.cols();
  const Index n = p.hidden_size();
  Mat<S> dx = Mat<S>::Zero(x.rows(), t);
  Vec<S> dh_rec = Vec<S>::Zero(n);
  Vec<S> dc_rec = Vec<S>::Zero(n);
  const Vec<S> zero = Vec<S>::Zero(n);

  for (Index step = t - 1; step >= 0; --step) {
    const Index v = reverse ? t - 1 - step : step;
    const bool has_prev = step > 0;
    const Index vp = reverse ? v + 1 : v - 1;
    const Vec<S> c_prev = has_prev ? Vec<S>(cache.c.col(vp)) : zero;
    const Vec<S> h_prev = has_prev ? Vec<S>(cache.h.col(vp)) : zero;

    const auto i = cache.i.col(v).array();
    const auto f = cache.f.col(v).array();
    const auto g = cache.g.col(v).array();
    const auto o = cache.o.col(v).array();
    const auto tc = cache.tc.col(v).array();

    const Vec<S> dh = dh_out.col(v) + dh_rec;
    const Vec<S> da_o = (dh.array() * tc * o * (S(1) - o)).matrix();
    const Vec<S> dc = (dh.array() * o * (S(1) - tc * tc)).matrix() +
                      da_o.cwiseProduct(p.p_co.col(0)) + dc_rec;
    const Vec<S> da_i = (dc.array() * g * i * (S(1) - i)).matrix();
    const Vec<S> da_f = (dc.array() * c_prev.array() * f * (S(1) - f)).matrix();
    const Vec<S> da_g = (dc.array() * i * (S(1) - g * g)).matrix();

    grads->w_xi += da_i * x.col(v).transpose();
    grads->w_xf += da_f * x.col(v).transpose();
    grads->w_xc += da_g * x.col(v).transpose();
    grads->w_xo += da_o * x.col(v).transpose();
    if (has_prev) {
      grads->w_hi += da_i * h_prev.transpose();
      grads->w_hf += da_f * h_prev.transpose();
      grads->w_hc += da_g * h_prev.transpose();
      grads->w_ho += da_o * h_prev.transpose();
      grads->p_ci.col(0) += da_i.cwiseProduct(c_prev);
      grads->p_cf.col(0) += da_f.cwiseProduct(c_prev);
    }
    grads->p_co.col(0) += da_o.cwiseProduct(cache.c.col(v));

    dx.col(v) = p.w_xi.transpose() * da_i + p.w_xf.transpose() * da_f +
                p.w_xc.transpose() * da_g + p.w_xo.transpose() * da_o;
    dh_rec = p.w_hi.transpose() * da_i + p.w_hf.transpose() * da_f +
             p.w_hc.transpose() * da_g + p.w_ho.transpose() * da_o;
    dc_rec = dc.cwiseProduct(cache.f.col(v)) + da_i.cwiseProduct(p.p_ci.col(0)) +
             da_f.cwiseProduct(p.p_cf.col(0));
  }
  return dx;
}

template <class S>
Mat<S> bilstm_layer_backward(const LstmLayerParams<S>& layer, const Mat<S>& x,
                             const LstmLayerCache<S>& cache, const Mat<S>& d_out,
                             LstmLayerParams<S>* grads) {
  const Index n = layer.fwd.hidden_size();
  Mat<S> dx = lstm_dir_backward(layer.fwd, x, cache.fwd,
                                Mat<S>(d_out.topRows(n)), false, &grads->fwd);
  dx += lstm_dir_backward(layer.bwd, x, cache.bwd, Mat<S>(d_out.bottomRows(n)), true,
                          &grads->bwd);
  return dx;
}

}  // namespace ehnet

#endif  // EHNET_LSTM_HPP_
