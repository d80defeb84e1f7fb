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

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bsm/decoder.hpp"
#include "bsm/encoder.hpp"
#include "bsm/model_config.hpp"
#include "bsm/tensor.hpp"

namespace bsm {

template <typename T>
struct BsMambaWeights {
  EncoderWeights<T> encoder;
  DecoderWeights<T> decoder;

  /// Correctly shaped weights: zeros, unit norm gains and batch-norm scales, a = -1.
  static BsMambaWeights zeros(const ModelConfig& cfg);

  template <typename Fn>
  void visit(Fn&& fn) {
    encoder.visit("encoder.", fn);
    decoder.visit("decoder.", fn);
  }

  template <typename U>
  BsMambaWeights<U> cast() const;
};

/// Image [B,3,H,W] with H, W multiples of 32 -> class probabilities [B,2,H,W].
template <typename T>
Tensor<T> forward(const Tensor<T>& image, const BsMambaWeights<T>& w, const ModelConfig& cfg);

/// Named, ordered table of every learnable array. The serialization unit for checkpoints.
class ModelWeights {
 public:
  using Entry = std::pair<std::string, TensorF>;

  /// Throws FormatError on a duplicate name.
  void add(std::string name, TensorF tensor);
  const TensorF* find(const std::string& name) const;
  const TensorF& at(const std::string& name) const;

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  friend bool operator==(const ModelWeights&, const ModelWeights&) = default;

 private:
  std::vector<Entry> entries_;
};

ModelWeights to_table(BsMambaWeights<float> weights);

/// Throws FormatError for a missing tensor, DimensionError for a shape that
/// does not match `cfg`.
BsMambaWeights<float> from_table(const ModelWeights& table, const ModelConfig& cfg);

/// Deterministic random initialization:
///   weights  ~ U(±sqrt(6 / (fan_in + fan_out)))
///   a[e,n]   = -(n+1)
///   delta bias = softplus⁻¹(dt), dt log-uniform in [0.01, 0.1]
///   biases, norm offsets, bn shifts = 0; gains, bn scales, residual gates = 1
BsMambaWeights<float> init_model(const ModelConfig& cfg, std::uint64_t seed);
ModelWeights init_weights(const ModelConfig& cfg, std::uint64_t seed);

template <typename T>
template <typename U>
BsMambaWeights<U> BsMambaWeights<T>::cast() const {
  BsMambaWeights<T> src = *this;
  std::vector<Tensor<U>> converted;
  src.visit([&](const std::string&, Tensor<T>& t, ParamKind) {
    converted.push_back(t.template cast<U>());
  });
  BsMambaWeights<U> out;
  std::size_t i = 0;
  out.visit([&](const std::string&, Tensor<U>& t, ParamKind) { t = std::move(converted[i++]); });
  return out;
}

}  // namespace bsm
