// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ehnet/lstm.hpp"
#include "ehnet/rng.hpp"
#include "oracle_helpers.hpp"

using namespace ehnet;

namespace {

LstmDirParams<double> random_dir(CounterRng& rng, Index hidden, Index input,
                                 double span = 0.5) {
  LstmDirParams<double> d;
  d.w_xi = oracle::random_matrix(rng, hidden, input, -span, span);
  d.w_xf = oracle::random_matrix(rng, hidden, input, -span, span);
  d.w_xc = oracle::random_matrix(rng, hidden, input, -span, span);
  d.w_xo = oracle::random_matrix(rng, hidden, input, -span, span);
  d.w_hi = oracle::random_matrix(rng, hidden, hidden, -span, span);
  d.w_hf = oracle::random_matrix(rng, hidden, hidden, -span, span);
  d.w_hc = oracle::random_matrix(rng, hidden, hidden, -span, span);
  d.w_ho = oracle::random_matrix(rng, hidden, hidden, -span, span);
  d.p_ci = oracle::random_matrix(rng, hidden, 1, -span, span);
  d.p_cf = oracle::random_matrix(rng, hidden, 1, -span, span);
  d.p_co = oracle::random_matrix(rng, hidden, 1, -span, span);
  return d;
}

oracle::LstmWeights to_oracle(const LstmDirParams<double>& d) {
  oracle::LstmWeights w;
  w.w_xi = d.w_xi;
  w.w_xf = d.w_xf;
  w.w_xc = d.w_xc;
  w.w_xo = d.w_xo;
  w.w_hi = d.w_hi;
  w.w_hf = d.w_hf;
  w.w_hc = d.w_hc;
  w.w_ho = d.w_ho;
  w.p_ci = d.p_ci.col(0);
  w.p_cf = d.p_cf.col(0);
  w.p_co = d.p_co.col(0);
  return w;
}

LstmDirParams<double> zero_dir(Index hidden, Index input) {
  LstmDirParams<double> d;
  d.w_xi = Mat<double>::Zero(hidden, input);
  d.w_xf = Mat<double>::Zero(hidden, input);
  d.w_xc = Mat<double>::Zero(hidden, input);
  d.w_xo = Mat<double>::Zero(hidden, input);
  d.w_hi = Mat<double>::Zero(hidden, hidden);
  d.w_hf = Mat<double>::Zero(hidden, hidden);
  d.w_hc = Mat<double>::Zero(hidden, hidden);
  d.w_ho = Mat<double>::Zero(hidden, hidden);
  d.p_ci = Mat<double>::Zero(hidden, 1);
  d.p_cf = Mat<double>::Zero(hidden, 1);
  d.p_co = Mat<double>::Zero(hidden, 1);
  return d;
}

}  // namespace

TEST_CASE("zero weights give zero state regardless of input", "[lstm]") {
  const Index hidden = 4, input = 3;
  LstmDirParams<double> p = zero_dir(hidden, input);
  CounterRng rng(5);
  const Vec<double> x = oracle::random_vector(rng, input, -2.0, 2.0);
  const auto [h, c] =
      lstm_cell_step(p, x, Vec<double>::Zero(hidden).eval(), Vec<double>::Zero(hidden).eval());
  REQUIRE(h.cwiseAbs().maxCoeff() == 0.0);  // i=f=o=0.5 but tanh terms vanish
  REQUIRE(c.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gate activations stay strictly inside (0, 1)", "[lstm]") {
  CounterRng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    LstmDirParams<double> p = random_dir(rng, 5, 4, 2.0);
    Mat<double> x = oracle::random_matrix(rng, 4, 6, -3.0, 3.0);
    LstmDirCache<double> cache;
    lstm_dir_forward(p, x, false, &cache);
    for (const Mat<double>* gate : {&cache.i, &cache.f, &cache.o}) {
      REQUIRE(gate->minCoeff() > 0.0);
      REQUIRE(gate->maxCoeff() < 1.0);
    }
    REQUIRE(cache.g.minCoeff() > -1.0);
    REQUIRE(cache.g.maxCoeff() < 1.0);
  }
}

TEST_CASE("cell recurrence matches the scalar oracle over 4 steps", "[lstm]") {
  CounterRng rng(31);
  const Index hidden = 3, input = 2, steps = 4;
  LstmDirParams<double> p = random_dir(rng, hidden, input);
  const oracle::LstmWeights ow = to_oracle(p);

  Mat<double> x = oracle::random_matrix(rng, input, steps, -1.0, 1.0);
  Vec<double> h = Vec<double>::Zero(hidden);
  Vec<double> c = Vec<double>::Zero(hidden);
  Vec<double> oh = h, oc = c;
  for (Index v = 0; v < steps; ++v) {
    auto [h2, c2] = lstm_cell_step(p, Vec<double>(x.col(v)), h, c);
    Vec<double> oh2, oc2;
    oracle::lstm_scalar_step(ow, x.col(v), oh, oc, &oh2, &oc2);
    REQUIRE((h2 - oh2).cwiseAbs().maxCoeff() <= 1e-12);
    REQUIRE((c2 - oc2).cwiseAbs().maxCoeff() <= 1e-12);
    h = h2;
    c = c2;
    oh = oh2;
    oc = oc2;
  }
}

TEST_CASE("single-frame bilstm is the concatenation of one step per direction", "[lstm]") {
  CounterRng rng(7);
  const Index hidden = 4, input = 3;
  LstmLayerParams<double> layer;
  layer.fwd = random_dir(rng, hidden, input);
  layer.bwd = random_dir(rng, hidden, input);
  Mat<double> x = oracle::random_matrix(rng, input, 1, -1.0, 1.0);

  const Mat<double> out = bilstm_layer_forward(layer, x);
  const auto [hf, cf] = lstm_cell_step(layer.fwd, Vec<double>(x.col(0)),
                                       Vec<double>::Zero(hidden).eval(), Vec<double>::Zero(hidden).eval());
  const auto [hb, cb] = lstm_cell_step(layer.bwd, Vec<double>(x.col(0)),
                                       Vec<double>::Zero(hidden).eval(), Vec<double>::Zero(hidden).eval());
  REQUIRE((out.topRows(hidden).col(0) - hf).cwiseAbs().maxCoeff() <= 1e-15);
  REQUIRE((out.bottomRows(hidden).col(0) - hb).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("time reversal with swapped directions reverses the output", "[lstm]") {
  CounterRng rng(13);
  const Index hidden = 3, input = 4, t = 5;
  LstmLayerParams<double> layer;
  layer.fwd = random_dir(rng, hidden, input);
  layer.bwd = random_dir(rng, hidden, input);
  Mat<double> x = oracle::random_matrix(rng, input, t, -1.0, 1.0);

  LstmLayerParams<double> swapped;
  swapped.fwd = layer.bwd;
  swapped.bwd = layer.fwd;
  Mat<double> x_rev = x.rowwise().reverse();

  const Mat<double> out = bilstm_layer_forward(layer, x);
  const Mat<double> out_swapped = bilstm_layer_forward(swapped, x_rev);

  // reversing time and swapping direction weights swaps the halves and
  // reverses the frame order
  const Mat<double> expect_top = out.bottomRows(hidden).rowwise().reverse();
  const Mat<double> expect_bottom = out.topRows(hidden).rowwise().reverse();
  REQUIRE((out_swapped.topRows(hidden) - expect_top).cwiseAbs().maxCoeff() <= 1e-12);
  REQUIRE((out_swapped.bottomRows(hidden) - expect_bottom).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("two stacked layers equal repeated single-layer application", "[lstm]") {
  CounterRng rng(23);
  const Index hidden = 4, input = 3, t = 3;
  std::vector<LstmLayerParams<double>> layers(2);
  layers[0].fwd = random_dir(rng, hidden, input);
  layers[0].bwd = random_dir(rng, hidden, input);
  layers[1].fwd = random_dir(rng, hidden, 2 * hidden);
  layers[1].bwd = random_dir(rng, hidden, 2 * hidden);
  Mat<double> x = oracle::random_matrix(rng, input, t, -1.0, 1.0);

  const Mat<double> deep = bilstm_forward(layers, x);
  const Mat<double> mid = bilstm_layer_forward(layers[0], x);
  const Mat<double> two = bilstm_layer_forward(layers[1], mid);
  REQUIRE((deep - two).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("direction scan matches the scalar scan oracle", "[lstm]") {
  CounterRng rng(37);
  for (bool reverse : {false, true}) {
    LstmDirParams<double> p = random_dir(rng, 4, 3);
    Mat<double> x = oracle::random_matrix(rng, 3, 6, -1.0, 1.0);
    const Mat<double> got = lstm_dir_forward(p, x, reverse);
    const Mat<double> want = oracle::lstm_scalar_scan(to_oracle(p), x, reverse);
    REQUIRE((got - want).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("shape mismatches and overflow are reported", "[lstm]") {
  CounterRng rng(41);
  LstmLayerParams<double> layer;
  layer.fwd = random_dir(rng, 3, 4);
  layer.bwd = random_dir(rng, 3, 4);
  Mat<double> bad = oracle::random_matrix(rng, 5, 2, -1.0, 1.0);
  REQUIRE_THROWS_AS(bilstm_layer_forward(layer, bad), ConfigError);

  Mat<double> x = oracle::random_matrix(rng, 4, 2, -1.0, 1.0);
  x(0, 0) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_WITH(bilstm_layer_forward(layer, x),
                      Catch::Matchers::ContainsSubstring("numeric overflow in cell"));
}

TEST_CASE("cell state clamp engages on runaway accumulation", "[lstm]") {
  const Index hidden = 1, input = 1;
  LstmDirParams<double> p = zero_dir(hidden, input);
  // forget gate saturated open, input gate saturated open, candidate driven
  // to +1 by a huge input weight: the cell integrates ~1 per step
  p.w_xf(0, 0) = 60.0;
  p.w_xi(0, 0) = 60.0;
  p.w_xc(0, 0) = 60.0;
  Mat<double> x = Mat<double>::Ones(1, 80);
  LstmDirCache<double> cache;
  lstm_dir_forward(p, x, false, &cache);
  REQUIRE(cache.clip_events > 0);
  REQUIRE(cache.c.maxCoeff() <= kCellClip);
}
