// Copyright 2026 The EHNet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <catch2/catch_amalgamated.hpp>

#include "ehnet/conv.hpp"
#include "ehnet/gradcheck.hpp"
#include "ehnet/model.hpp"
#include "ehnet/rng.hpp"
#include "oracle_helpers.hpp"

using namespace ehnet;

TEST_CASE("pad_time widths and content", "[conv]") {
  CounterRng rng(3);
  Mat<double> x = oracle::random_matrix(rng, 4, 5, -1.0, 1.0);

  SECTION("w = 11 pads to t + 10 and the kernel restores t") {
    const Mat<double> padded = pad_time(x, 11);
    REQUIRE(padded.cols() == 15);
    REQUIRE(padded.cols() - 11 + 1 == 5);
    REQUIRE(padded.block(0, 5, 4, 5) == x);
    REQUIRE(padded.leftCols(5).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(padded.rightCols(5).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("w = 1 is the identity") {
    REQUIRE(pad_time(x, 1) == x);
  }
  SECTION("even widths are rejected") {
    REQUIRE_THROWS_WITH(pad_time(x, 4),
                        Catch::Matchers::ContainsSubstring("kernel width must be odd"));
  }
  SECTION("padding preserves the total sum") {
    REQUIRE(pad_time(x, 7).sum() == Catch::Approx(x.sum()).margin(1e-15));
  }
}

TEST_CASE("position count follows the stride law", "[conv]") {
  REQUIRE(conv_positions(256, 32, 16) == 15);

  CounterRng rng(11);
  for (int i = 0; i < 30; ++i) {
    const Index d = 4 + static_cast<Index>(rng.next_below(60));
    const Index b = 1 + static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(d)));
    const Index stride = 1 + static_cast<Index>(rng.next_below(8));
    // enumeration oracle: count offsets u with u*stride + b <= d
    Index count = 0;
    for (Index u = 0;; ++u) {
      if (u * stride + b > d) break;
      ++count;
    }
    REQUIRE(conv_positions(d, b, stride) == count);
  }
  REQUIRE_THROWS_AS(conv_positions(4, 8, 1), ConfigError);
}

TEST_CASE("1x1 unit kernel with unit stride is the identity on nonneg input", "[conv]") {
  CounterRng rng(5);
  Mat<double> x = oracle::random_matrix(rng, 6, 4, 0.0, 2.0);
  ConvParams<double> cp;
  cp.freq_stride = 1;
  cp.kernels = {Mat<double>::Ones(1, 1)};
  const auto maps = conv_forward(x, cp);
  REQUIRE(maps.size() == 1);
  REQUIRE(maps[0] == x);
}

TEST_CASE("conv_forward matches the triple-loop oracle", "[conv]") {
  CounterRng rng(17);
  for (int instance = 0; instance < 8; ++instance) {
    Mat<double> x = oracle::random_matrix(rng, 6, 7, -1.0, 1.0);
    ConvParams<double> cp;
    cp.freq_stride = 1 + static_cast<Index>(rng.next_below(2));
    cp.kernels = {oracle::random_matrix(rng, 2, 3, -1.0, 1.0),
                  oracle::random_matrix(rng, 2, 3, -1.0, 1.0)};
    const Mat<double> padded = pad_time(x, 3);
    const auto maps = conv_forward(x, cp);
    for (std::size_t j = 0; j < cp.kernels.size(); ++j) {
      const Mat<double> ref = oracle::conv_map(padded, cp.kernels[j], cp.freq_stride, 7);
      REQUIRE((maps[j] - ref).cwiseAbs().maxCoeff() <= 1e-12);
      REQUIRE(maps[j].minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("stack_features layout", "[conv]") {
  SECTION("single map passes through") {
    CounterRng rng(2);
    std::vector<Mat<double>> maps = {oracle::random_matrix(rng, 3, 4, 0.0, 1.0)};
    REQUIRE(stack_features(maps) == maps[0]);
  }
  SECTION("two maps concatenate kernel-major") {
    Mat<double> a(2, 1), b(2, 1);
    a << 1.0, 2.0;
    b << 3.0, 4.0;
    const Mat<double> h = stack_features(std::vector<Mat<double>>{a, b});
    REQUIRE(h.rows() == 4);
    REQUIRE(h(0, 0) == 1.0);
    REQUIRE(h(1, 0) == 2.0);
    REQUIRE(h(2, 0) == 3.0);
    REQUIRE(h(3, 0) == 4.0);
  }
  SECTION("entry count is preserved and unstack inverts") {
    CounterRng rng(9);
    std::vector<Mat<double>> maps;
    for (int j = 0; j < 3; ++j) {
      maps.push_back(oracle::random_matrix(rng, 4, 5, 0.0, 1.0));
    }
    const Mat<double> h = stack_features(maps);
    REQUIRE(h.size() == 3 * 4 * 5);
    const auto back = unstack_features(h, 3);
    for (int j = 0; j < 3; ++j) {
      REQUIRE(back[static_cast<std::size_t>(j)] == maps[static_cast<std::size_t>(j)]);
    }
  }
}

TEST_CASE("hyper validation flags a non-dividing stride", "[conv]") {
  Hyper h = tiny_hyper();
  REQUIRE(validate_hyper(h).empty());
  h.freq_stride = 3;  // (8 - 4) % 3 != 0
  const auto warnings = validate_hyper(h);
  REQUIRE(warnings.size() == 1);

  Hyper bad = tiny_hyper();
  bad.kernel_width = 4;
  REQUIRE_THROWS_AS(validate_hyper(bad), ConfigError);
  bad = tiny_hyper();
  bad.kernel_height = 16;
  REQUIRE_THROWS_AS(validate_hyper(bad), ConfigError);
}
