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

#include <array>
#include <cstddef>
#include <string>

#include "bsm/encoder.hpp"
#include "bsm/params.hpp"
#include "bsm/tensor.hpp"

namespace bsm {

/// 3×3 convolution, inference-mode batch norm, ReLU.
template <typename T>
struct ConvBnReluWeights {
  Tensor<T> conv_w, conv_b;
  Tensor<T> bn_scale, bn_shift;

  template <typename Fn>
  void visit(const std::string& prefix, Fn&& fn) {
    fn(prefix + "conv.weight", conv_w, ParamKind::weight);
    fn(prefix + "conv.bias", conv_b, ParamKind::bias);
    fn(prefix + "bn.scale", bn_scale, ParamKind::bn_scale);
    fn(prefix + "bn.shift", bn_shift, ParamKind::bn_shift);
  }
};

template <typename T>
using ConvBlockWeights = std::array<ConvBnReluWeights<T>, 2>;

template <typename T>
Tensor<T> conv_block(const Tensor<T>& x, const ConvBlockWeights<T>& w);

template <typename T>
struct DecoderWeights {
  // up[0] produces stage 3 from (stage 4, fused 3); up[2] produces stage 1.
  std::array<ConvBlockWeights<T>, kStages - 1> up;
  Tensor<T> head_w, head_b;  // [2,C1,1,1], [2]

  template <typename Fn>
  void visit(const std::string& prefix, Fn&& fn) {
    for (std::size_t k = 0; k < up.size(); ++k) {
      const std::string p = prefix + "up" + std::to_string(kStages - 1 - k) + ".";
      up[k][0].visit(p + "block1.", fn);
      up[k][1].visit(p + "block2.", fn);
    }
    fn(prefix + "head.weight", head_w, ParamKind::weight);
    fn(prefix + "head.bias", head_b, ParamKind::bias);
  }
};

/// Cascaded upsampling and the two-class head, before softmax. [B,2,out_h,out_w].
template <typename T>
Tensor<T> decode_logits(const std::array<StageFeatures<T>, kStages>& stages,
                        const DecoderWeights<T>& w, std::size_t out_h, std::size_t out_w);

/// Per-pixel class probabilities at out_h × out_w.
template <typename T>
Tensor<T> decode(const std::array<StageFeatures<T>, kStages>& stages, const DecoderWeights<T>& w,
                 std::size_t out_h, std::size_t out_w);

/// Output size inferred from the first stage's grid and scale.
template <typename T>
Tensor<T> decode(const std::array<StageFeatures<T>, kStages>& stages, const DecoderWeights<T>& w);

}  // namespace bsm
