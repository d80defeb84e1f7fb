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

#include "bsm/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bsm/ops.hpp"

namespace bsm {

template <typename T>
BsMambaWeights<T> BsMambaWeights<T>::zeros(const ModelConfig& cfg) {
  cfg.validate();
  BsMambaWeights w;
  for (std::size_t i = 0; i < kStages; ++i) {
    const std::size_t c = cfg.stage_channels(i);
    const std::size_t c_in = i == 0 ? cfg.in_channels : cfg.stage_channels(i - 1);

    w.encoder.conv[i] = {Tensor<T>({c, c_in, 3, 3}), Tensor<T>({c}), Tensor<T>({c, c, 3, 3}),
                         Tensor<T>({c})};

    auto& m = w.encoder.mamba[i];
    m.down_w = i == 0 ? Tensor<T>({c, cfg.in_channels, kPatchSize, kPatchSize})
                      : Tensor<T>({c, 4 * c_in});
    m.down_b = Tensor<T>({c});
    for (std::size_t k = 0; k < kBlocksPerStage; ++k) {
      m.blocks[k] = SmbWeights<T>::zeros(cfg.smb_config(i, k));
    }

    const std::size_t hidden = std::max<std::size_t>(c / 4, 1);
    w.encoder.enhance[i] = {Tensor<T>({c, c, 3, 3}), Tensor<T>({c}),
                            Tensor<T>({hidden, c}),  Tensor<T>({hidden}),
                            Tensor<T>({c, hidden}),  Tensor<T>({c})};
  }

  for (std::size_t k = 0; k + 1 < kStages; ++k) {
    const std::size_t target = kStages - 2 - k;
    const std::size_t c = cfg.stage_channels(target);
    const std::size_t c_in = cfg.stage_channels(target + 1) + c;
    w.decoder.up[k][0] = {Tensor<T>({c, c_in, 3, 3}), Tensor<T>({c}), Tensor<T>({c}, T{1}),
                          Tensor<T>({c})};
    w.decoder.up[k][1] = {Tensor<T>({c, c, 3, 3}), Tensor<T>({c}), Tensor<T>({c}, T{1}),
                          Tensor<T>({c})};
  }
  w.decoder.head_w = Tensor<T>({kClasses, cfg.stage_channels(0), 1, 1});
  w.decoder.head_b = Tensor<T>({kClasses});
  return w;
}

template <typename T>
Tensor<T> forward(const Tensor<T>& image, const BsMambaWeights<T>& w, const ModelConfig& cfg) {
  require_rank(image, 4, "forward");
  const std::size_t h = image.dim(2);
  const std::size_t wd = image.dim(3);
  if (image.dim(1) != cfg.in_channels || h % ModelConfig::kInputMultiple != 0 ||
      wd % ModelConfig::kInputMultiple != 0) {
    throw DimensionError("forward: input " + shape_string(image.dims()) + " needs " +
                         std::to_string(cfg.in_channels) + " channels and sides divisible by " +
                         std::to_string(ModelConfig::kInputMultiple));
  }
  const EncoderOutput<T> enc = encode(image, w.encoder, cfg);
  return decode(enc.stages, w.decoder, h, wd);
}

void ModelWeights::add(std::string name, TensorF tensor) {
  if (find(name) != nullptr) throw FormatError("duplicate tensor name '" + name + "'");
  entries_.emplace_back(std::move(name), std::move(tensor));
}

const TensorF* ModelWeights::find(const std::string& name) const {
  const auto it = std::find_if(entries_.begin(), entries_.end(),
                               [&](const Entry& e) { return e.first == name; });
  return it == entries_.end() ? nullptr : &it->second;
}

const TensorF& ModelWeights::at(const std::string& name) const {
  const TensorF* t = find(name);
  if (t == nullptr) throw FormatError("missing tensor '" + name + "'");
  return *t;
}

ModelWeights to_table(BsMambaWeights<float> weights) {
  ModelWeights table;
  weights.visit([&](const std::string& name, TensorF& t, ParamKind) { table.add(name, t); });
  return table;
}

BsMambaWeights<float> from_table(const ModelWeights& table, const ModelConfig& cfg) {
  BsMambaWeights<float> w = BsMambaWeights<float>::zeros(cfg);
  std::size_t matched = 0;
  w.visit([&](const std::string& name, TensorF& t, ParamKind) {
    const TensorF& stored = table.at(name);
    if (stored.dims() != t.dims()) {
      throw DimensionError("tensor '" + name + "' has shape " + shape_string(stored.dims()) +
                           ", configuration expects " + shape_string(t.dims()));
    }
    t = stored;
    ++matched;
  });
  if (matched != table.size()) {
    throw FormatError(std::to_string(table.size() - matched) +
                      " tensors in the table are not part of this configuration");
  }
  return w;
}

namespace {

class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

  // [0, 1) from the top 53 bits; independent of the standard library's distributions.
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

std::pair<double, double> fans(const Shape& dims) {
  if (dims.size() == 2) return {static_cast<double>(dims[1]), static_cast<double>(dims[0])};
  const double receptive = static_cast<double>(shape_volume(dims) / (dims[0] * dims[1]));
  return {static_cast<double>(dims[1]) * receptive, static_cast<double>(dims[0]) * receptive};
}

}  // namespace

BsMambaWeights<float> init_model(const ModelConfig& cfg, std::uint64_t seed) {
  BsMambaWeights<float> w = BsMambaWeights<float>::zeros(cfg);
  UniformSource rng(seed);
  const double log_lo = std::log(0.01);
  const double log_hi = std::log(0.1);

  w.visit([&](const std::string&, TensorF& t, ParamKind kind) {
    switch (kind) {
      case ParamKind::weight: {
        const auto [fan_in, fan_out] = fans(t.dims());
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        for (float& v : t.data()) v = static_cast<float>((2.0 * rng.next() - 1.0) * bound);
        break;
      }
      case ParamKind::ssm_a: {
        const std::size_t n = t.dim(1);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = -static_cast<float>(i % n + 1);
        break;
      }
      case ParamKind::delta_bias:
        for (float& v : t.data()) {
          const double dt = std::exp(log_lo + rng.next() * (log_hi - log_lo));
          v = static_cast<float>(std::log(std::expm1(dt)));
        }
        break;
      case ParamKind::norm_gain:
      case ParamKind::bn_scale:
      case ParamKind::residual_gate:
        std::fill(t.data().begin(), t.data().end(), 1.0f);
        break;
      case ParamKind::bias:
      case ParamKind::norm_offset:
      case ParamKind::bn_shift:
        std::fill(t.data().begin(), t.data().end(), 0.0f);
        break;
    }
  });
  return w;
}

ModelWeights init_weights(const ModelConfig& cfg, std::uint64_t seed) {
  return to_table(init_model(cfg, seed));
}

template struct BsMambaWeights<float>;
template struct BsMambaWeights<double>;
template Tensor<float> forward(const Tensor<float>&, const BsMambaWeights<float>&,
                               const ModelConfig&);
template Tensor<double> forward(const Tensor<double>&, const BsMambaWeights<double>&,
                                const ModelConfig&);

}  // namespace bsm
