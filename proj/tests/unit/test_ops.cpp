// Copyright 2026 The BSMamba Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "bsm/ops.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace bsm;

namespace {

template <typename T>
double max_abs_diff(const Tensor<T>& a, const Tensor<T>& b) {
  REQUIRE(a.dims() == b.dims());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
  }
  return worst;
}

}  // namespace

TEST_SUITE("tensor") {
  TEST_CASE("construction and indexing") {
    TensorD t({2, 3}, 1.5);
    CHECK(t.size() == 6);
    t.at(1, 2) = 4.0;
    CHECK(t[5] == 4.0);
    CHECK_THROWS_AS(TensorD({2, 0}), DimensionError);
    CHECK_THROWS_AS(TensorD({2, 2}, std::vector<double>(3)), DimensionError);
    CHECK(t.reshaped({3, 2})[5] == 4.0);
    CHECK_THROWS_AS(t.reshaped({4, 2}), DimensionError);
  }

  TEST_CASE("non-finite results are reported") {
    TensorD t({2}, 0.0);
    t[1] = std::nan("");
    CHECK_THROWS_AS(ensure_finite(t, "test"), NumericError);
  }
}

TEST_SUITE("ops") {
  TEST_CASE("conv2d identity kernel") {
    oracle::Rng rng(1);
    const TensorD x = rng.tensor<double>({1, 1, 3, 3}, -1, 1);
    CHECK(conv2d(x, TensorD({1, 1, 1, 1}, 1.0), TensorD({1})) == x);
  }

  TEST_CASE("conv2d hand sum") {
    const TensorD x({1, 1, 2, 2}, {1, 2, 3, 4});
    const TensorD y = conv2d(x, TensorD({1, 1, 2, 2}, 1.0), TensorD({1}));
    CHECK(y.dims() == Shape{1, 1, 1, 1});
    CHECK(y[0] == 10.0);
  }

  TEST_CASE("depthwise zero kernel gives bias") {
    const TensorD x({2, 3, 4, 5}, 7.0);
    const TensorD y = conv2d(x, TensorD({3, 1, 3, 3}), TensorD({3}, {0.5, -1, 2}),
                             Conv2dParams{1, 1, 3});
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < 20; ++i) CHECK(y.at(1, c, i / 5, i % 5) == y.at(0, c, 0, 0));
    }
    CHECK(y.at(0, 2, 3, 4) == 2.0);
  }

  TEST_CASE("conv2d matches the direct-sum oracle") {
    oracle::Rng rng(2);
    struct Case {
      std::size_t c, o, h, w, k, stride, pad, groups;
    };
    for (const Case& cs : {Case{3, 4, 7, 6, 3, 1, 1, 1}, Case{4, 4, 8, 8, 3, 2, 1, 4},
                           Case{3, 16, 16, 16, 4, 4, 0, 1}, Case{6, 4, 5, 9, 3, 1, 0, 2},
                           Case{2, 2, 1, 1, 3, 1, 1, 1}}) {
      const TensorD x = rng.tensor<double>({2, cs.c, cs.h, cs.w}, -1, 1);
      const TensorD k = rng.tensor<double>({cs.o, cs.c / cs.groups, cs.k, cs.k}, -1, 1);
      const TensorD b = rng.tensor<double>({cs.o}, -1, 1);
      const TensorD got = conv2d(x, k, b, Conv2dParams{cs.stride, cs.pad, cs.groups});
      const TensorD want = oracle::naive_conv2d(x, k, b, cs.stride, cs.pad, cs.groups);
      CHECK(max_abs_diff(got, want) < 1e-12);

      const TensorF got_f = conv2d(x.cast<float>(), k.cast<float>(), b.cast<float>(),
                                   Conv2dParams{cs.stride, cs.pad, cs.groups});
      CHECK(max_abs_diff(got_f.cast<double>(), want) < 1e-4);
    }
  }

  TEST_CASE("conv2d shape errors") {
    const TensorD x({1, 3, 4, 4});
    CHECK_THROWS_AS(conv2d(x, TensorD({2, 2, 3, 3}), TensorD({2})), DimensionError);
    CHECK_THROWS_AS(conv2d(x, TensorD({2, 3, 5, 5}), TensorD({2})), DimensionError);
    CHECK_THROWS_AS(conv2d(x, TensorD({2, 1, 3, 3}), TensorD({2}), Conv2dParams{1, 0, 3}),
                    DimensionError);
  }

  TEST_CASE("avg_pool2d") {
    CHECK(avg_pool2d(TensorD({1, 1, 2, 2}, {1, 2, 3, 4}), 2, 2)[0] == 2.5);
    TensorD ramp({1, 1, 4, 4});
    for (std::size_t i = 0; i < 16; ++i) ramp[i] = static_cast<double>(i);
    const TensorD pooled = avg_pool2d(ramp, 2, 2);
    CHECK(pooled == TensorD({1, 1, 2, 2}, {2.5, 4.5, 10.5, 12.5}));
    CHECK(avg_pool2d(TensorD({1, 2, 6, 4}, 3.25), 2, 2) == TensorD({1, 2, 3, 2}, 3.25));
    CHECK_THROWS_AS(avg_pool2d(TensorD({1, 1, 1, 4}), 2, 2), DimensionError);

    oracle::Rng rng(3);
    const TensorD x = rng.tensor<double>({2, 3, 8, 6}, -5, 5);
    CHECK(max_abs_diff(avg_pool2d(x, 2, 2), oracle::naive_avg_pool(x, 2, 2)) < 1e-12);
    double m_in = 0, m_out = 0;
    const TensorD p = avg_pool2d(x, 2, 2);
    for (double v : x.data()) m_in += v;
    for (double v : p.data()) m_out += v;
    CHECK(std::abs(m_in / x.size() - m_out / p.size()) <= 1e-6 * std::abs(m_in / x.size()));
  }

  TEST_CASE("bilinear_resize") {
    const TensorD x({1, 1, 2, 2}, {0, 1, 0, 1});
    const TensorD up = bilinear_resize(x, 2, 4);
    CHECK(up == TensorD({1, 1, 2, 4}, {0, 0.25, 0.75, 1, 0, 0.25, 0.75, 1}));

    oracle::Rng rng(4);
    const TensorD r = rng.tensor<double>({2, 3, 5, 7}, -1, 1);
    CHECK(bilinear_resize(r, 5, 7) == r);
    CHECK(bilinear_resize(TensorD({1, 2, 3, 3}, 0.7), 11, 4) == TensorD({1, 2, 11, 4}, 0.7));
    for (auto [h, w] : {std::pair{10, 14}, {3, 2}, {1, 1}, {5, 21}}) {
      const TensorD got = bilinear_resize(r, h, w);
      CHECK(max_abs_diff(got, oracle::naive_bilinear(r, h, w)) < 1e-12);
    }
  }

  TEST_CASE("activations") {
    CHECK(activate(Activation::relu, -1.0) == 0.0);
    CHECK(activate(Activation::relu, 2.0) == 2.0);
    CHECK(activate(Activation::silu, 0.0) == 0.0);
    CHECK(activate(Activation::sigmoid, 0.0) == 0.5);
    CHECK(activate(Activation::softplus, 0.0) == doctest::Approx(std::log(2.0)));
    CHECK(activate(Activation::sigmoid, -800.0) >= 0.0);
    CHECK(activate(Activation::softplus, 100.0) == 100.0);
  }

  TEST_CASE("layer_norm standardizes each row") {
    oracle::Rng rng(5);
    const TensorD x = rng.tensor<double>({3, 4, 9}, -4, 6);
    const TensorD y = layer_norm(x, TensorD({9}, 1.0), TensorD({9}));
    for (std::size_t r = 0; r < 12; ++r) {
      double mean = 0, var = 0;
      for (std::size_t i = 0; i < 9; ++i) mean += y[r * 9 + i];
      mean /= 9;
      for (std::size_t i = 0; i < 9; ++i) var += (y[r * 9 + i] - mean) * (y[r * 9 + i] - mean);
      var /= 9;
      CHECK(std::abs(mean) < 1e-5);
      CHECK(std::abs(var - 1.0) < 1e-3);  // eps shrinks the variance slightly
    }
  }

  TEST_CASE("linear") {
    const TensorD x({2, 3}, {1, 2, 3, 4, 5, 6});
    const TensorD w({2, 3}, {1, 0, -1, 0.5, 0.5, 0.5});
    const TensorD y = linear(x, w, TensorD({2}, {1, 0}));
    CHECK(y == TensorD({2, 2}, {-1, 3, -1, 7.5}));
    CHECK_THROWS_AS(linear(x, TensorD({2, 2}), TensorD({2})), DimensionError);
  }

  TEST_CASE("softmax_channel") {
    const TensorD eq = softmax_channel(TensorD({1, 2, 3, 3}, 4.0));
    for (double v : eq.data()) CHECK(v == 0.5);
    oracle::Rng rng(6);
    const TensorD logits = rng.tensor<double>({2, 2, 16, 16}, -20, 20);
    const TensorD p = softmax_channel(logits);
    for (std::size_t b = 0; b < 2; ++b) {
      for (std::size_t i = 0; i < 256; ++i) {
        const double a = p[(b * 2) * 256 + i], c = p[(b * 2 + 1) * 256 + i];
        CHECK(a >= 0.0);
        CHECK(c >= 0.0);
        CHECK(std::abs(a + c - 1.0) <= 1e-6);
      }
    }
  }

  TEST_CASE("channel helpers") {
    const TensorD x({1, 2, 1, 2}, {1, 2, 3, 4});
    CHECK(global_avg_pool(x) == TensorD({1, 2}, {1.5, 3.5}));
    CHECK(channel_mean(x) == TensorD({1, 1, 1, 2}, {2, 3}));
    CHECK(concat_channels(x, x).dim(1) == 4);
    CHECK(from_tokens(to_tokens(x), 1, 2) == x);
    CHECK(scale_channels(x, TensorD({1, 2}, {2, 0})) == TensorD({1, 2, 1, 2}, {2, 4, 0, 0}));
    CHECK(channel_affine(x, TensorD({2}, {1, 2}), TensorD({2}, {1, 0})) ==
          TensorD({1, 2, 1, 2}, {2, 3, 6, 8}));
  }
}
