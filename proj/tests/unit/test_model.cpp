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
#include <set>

#include "bsm/model.hpp"
#include "bsm/ops.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace bsm;

namespace {

ModelConfig toy_config() {
  ModelConfig cfg;
  cfg.base_channels = 4;
  cfg.state_dim = 4;
  return cfg;
}

}  // namespace

TEST_SUITE("encoder") {
  TEST_CASE("conv stage") {
    oracle::Rng rng(50);
    ConvStageWeights<double> w{TensorD({2, 1, 3, 3}, 1.0), TensorD({2}), TensorD({2, 2, 3, 3}),
                               TensorD({2})};
    // second conv picks channel 0 with a centre tap so the first conv is visible
    w.conv2_w.at(0, 0, 1, 1) = 1.0;
    const TensorD out = conv_stage(TensorD({1, 1, 8, 8}, 2.0), w);
    CHECK(out.dims() == Shape{1, 2, 4, 4});
    CHECK(out.at(0, 0, 1, 1) == 18.0);  // interior: 9·c
    CHECK(out.at(0, 1, 1, 1) == 0.0);

    const ConvStageWeights<double> zero{TensorD({2, 1, 3, 3}), TensorD({2}), TensorD({2, 2, 3, 3}),
                                        TensorD({2})};
    const TensorD zero_out = conv_stage(rng.tensor<double>({1, 1, 8, 8}, -1, 1), zero);
    for (double v : zero_out.data()) CHECK(v == 0.0);
    CHECK_THROWS_AS(conv_stage(TensorD({1, 1, 7, 8}), zero), DomainError);
  }

  TEST_CASE("branch scales") {
    const ModelConfig cfg = toy_config();
    const auto w = init_model(cfg, 1).cast<double>();
    const TensorD img({1, 3, 64, 64}, 0.5);
    const auto conv = conv_branch(img, w.encoder);
    const auto mamba = mamba_branch(img, w.encoder, cfg);
    for (std::size_t i = 0; i < kStages; ++i) {
      CHECK(conv[i].dim(2) == (32u >> i));
      CHECK(mamba[i].dim(2) == (16u >> i));
      CHECK(conv[i].dim(1) == cfg.stage_channels(i));
      CHECK(mamba[i].dim(1) == cfg.stage_channels(i));
    }
  }

  TEST_CASE("zero weights give zero features") {
    const ModelConfig cfg = toy_config();
    const auto w = BsMambaWeights<float>::zeros(cfg);
    const auto enc = encode(TensorF({1, 3, 64, 64}), w.encoder, cfg);
    for (const auto& t : enc.mamba_raw) for (float v : t.data()) CHECK(v == 0.0f);
    for (const auto& t : enc.conv_raw) for (float v : t.data()) CHECK(v == 0.0f);
  }

  TEST_CASE("stage features share one shape") {
    const ModelConfig cfg = toy_config();
    const auto w = init_model(cfg, 2);
    oracle::Rng rng(51);
    const auto enc = encode(rng.tensor<float>({2, 3, 64, 64}, 0, 1), w.encoder, cfg);
    for (std::size_t i = 0; i < kStages; ++i) {
      const auto& s = enc.stages[i];
      CHECK(s.f_conv.dims() == s.f_ssm.dims());
      CHECK(s.f_fused.dims() == s.f_conv.dims());
      CHECK(s.scale_denominator == (2u << i));
      CHECK(s.f_fused.dim(2) * s.scale_denominator == 64);
    }
  }

  TEST_CASE("enhancement and fusion") {
    oracle::Rng rng(52);
    const std::size_t c = 4;
    EnhanceWeights<double> w{TensorD({c, c, 3, 3}), TensorD({c}), rng.tensor<double>({1, c}, -1, 1),
                             TensorD({1}), rng.tensor<double>({c, 1}, -1, 1), TensorD({c})};
    const TensorD f_ssm = rng.tensor<double>({2, c, 6, 6}, -1, 1);
    const TensorD f_conv = rng.tensor<double>({2, c, 12, 12}, -1, 1);

    const TensorD att = channel_attention_weights(f_ssm, w);
    for (double v : att.data()) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }

    // identity conv and saturated attention: fused = upsampled ssm + raw conv
    for (std::size_t i = 0; i < c; ++i) w.conv_w.at(i, i, 1, 1) = 1.0;
    std::fill(w.se_fc2_b.data().begin(), w.se_fc2_b.data().end(), 800.0);
    std::fill(w.se_fc2_w.data().begin(), w.se_fc2_w.data().end(), 0.0);
    const auto s = align_and_enhance(f_ssm, f_conv, w);
    CHECK(s.f_fused == add(bilinear_resize(f_ssm, 12, 12), f_conv));
    CHECK(add(s.f_ssm, s.f_conv) == add(s.f_conv, s.f_ssm));

    const auto zero_ssm = align_and_enhance(TensorD({2, c, 6, 6}), f_conv, w);
    CHECK(zero_ssm.f_fused == zero_ssm.f_conv);

    CHECK_THROWS_AS(align_and_enhance(TensorD({2, c + 1, 6, 6}), f_conv, w), DimensionError);
  }
}

TEST_SUITE("decoder") {
  TEST_CASE("zero head gives one half everywhere") {
    const ModelConfig cfg = toy_config();
    auto w = init_model(cfg, 3);
    std::fill(w.decoder.head_w.data().begin(), w.decoder.head_w.data().end(), 0.0f);
    std::fill(w.decoder.head_b.data().begin(), w.decoder.head_b.data().end(), 0.0f);
    const TensorF p = forward(TensorF({1, 3, 64, 64}, 0.2f), w, cfg);
    for (float v : p.data()) CHECK(v == 0.5f);
  }

  TEST_CASE("output covers the input with a total labeling") {
    const ModelConfig cfg = toy_config();
    const auto w = init_model(cfg, 4);
    oracle::Rng rng(53);
    for (auto [h, wd] : {std::pair{64, 64}, {32, 96}}) {
      const TensorF img = rng.tensor<float>({2, 3, static_cast<std::size_t>(h), static_cast<std::size_t>(wd)}, 0, 1);
      const TensorF p = forward(img, w, cfg);
      CHECK(p.dims() == Shape{2, 2, img.dim(2), img.dim(3)});
      const std::size_t plane = img.dim(2) * img.dim(3);
      double worst = 0;
      for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t i = 0; i < plane; ++i)
          worst = std::max(worst, std::abs(double(p[2 * b * plane + i]) + p[(2 * b + 1) * plane + i] - 1.0));
      CHECK(worst <= 1e-6);
    }
  }

  TEST_CASE("input size contract") {
    const ModelConfig cfg = toy_config();
    const auto w = init_model(cfg, 5);
    CHECK_THROWS_AS(forward(TensorF({1, 3, 48, 64}), w, cfg), DimensionError);
    CHECK_THROWS_AS(forward(TensorF({1, 1, 64, 64}), w, cfg), DimensionError);
  }

  TEST_CASE("float and double paths agree") {
    const ModelConfig cfg = toy_config();
    const auto wf = init_model(cfg, 6);
    const auto wd = wf.cast<double>();
    oracle::Rng rng(54);
    const TensorD img = rng.tensor<double>({1, 3, 32, 32}, 0, 1);
    const TensorF pf = forward(img.cast<float>(), wf, cfg);
    const TensorD pd = forward(img, wd, cfg);
    double worst = 0;
    for (std::size_t i = 0; i < pd.size(); ++i) worst = std::max(worst, std::abs(pf[i] - pd[i]));
    CHECK(worst < 1e-4);
  }
}

TEST_SUITE("model") {
  TEST_CASE("initialization") {
    const ModelConfig cfg;
    const ModelWeights a = init_weights(cfg, 42);
    CHECK(a == init_weights(cfg, 42));
    CHECK_FALSE(a == init_weights(cfg, 43));
    CHECK(a.at("encoder.conv1.conv1.weight").dims() == Shape{16, 3, 3, 3});

    std::set<std::string> names;
    for (const auto& [name, t] : a.entries()) {
      CHECK(names.insert(name).second);
      CHECK(t.all_finite());
    }
    auto w = init_model(cfg, 42);
    std::size_t a_entries = 0;
    w.visit([&](const std::string&, TensorF& t, ParamKind kind) {
      if (kind == ParamKind::ssm_a) {
        for (float v : t.data()) CHECK(v < 0.0f);
        ++a_entries;
      }
      if (kind == ParamKind::delta_bias) {
        for (float v : t.data()) {
          const double dt = std::log1p(std::exp(double(v)));
          CHECK(dt >= 0.0099);
          CHECK(dt <= 0.1001);
        }
      }
      if (kind == ParamKind::weight) {
        double bound = 0;
        for (float v : t.data()) bound = std::max(bound, std::abs(double(v)));
        CHECK(bound <= 1.0);
      }
    });
    CHECK(a_entries == kStages * kBlocksPerStage);
  }

  TEST_CASE("named table round trip") {
    const ModelConfig cfg = toy_config();
    const ModelWeights table = init_weights(cfg, 8);
    const auto back = from_table(table, cfg);
    CHECK(to_table(back) == table);

    ModelWeights extra = table;
    extra.add("stray", TensorF({1}));
    CHECK_THROWS_AS(from_table(extra, cfg), FormatError);
    CHECK_THROWS_AS(extra.add("stray", TensorF({1})), FormatError);

    ModelConfig wider = cfg;
    wider.base_channels = 8;
    CHECK_THROWS_AS(from_table(table, wider), DimensionError);
    CHECK_THROWS_AS(from_table(ModelWeights{}, cfg), FormatError);
  }
}
