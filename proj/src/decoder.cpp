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

#include "bsm/decoder.hpp"

#include "bsm/ops.hpp"

namespace bsm {

template <typename T>
Tensor<T> conv_block(const Tensor<T>& x, const ConvBlockWeights<T>& w) {
  Tensor<T> y = x;
  for (const auto& layer : w) {
    y = relu(channel_affine(conv2d(y, layer.conv_w, layer.conv_b, Conv2dParams{1, 1, 1}),
                            layer.bn_scale, layer.bn_shift));
  }
  return y;
}

template <typename T>
Tensor<T> decode_logits(const std::array<StageFeatures<T>, kStages>& stages,
                        const DecoderWeights<T>& w, std::size_t out_h, std::size_t out_w) {
  Tensor<T> f = stages[kStages - 1].f_fused;
  for (std::size_t k = 0; k + 1 < kStages; ++k) {
    const Tensor<T>& skip = stages[kStages - 2 - k].f_fused;
    require_rank(skip, 4, "decode");
    const Tensor<T> up = bilinear_resize(f, skip.dim(2), skip.dim(3));
    f = conv_block(concat_channels(up, skip), w.up[k]);
  }
  return conv2d(bilinear_resize(f, out_h, out_w), w.head_w, w.head_b);
}

template <typename T>
Tensor<T> decode(const std::array<StageFeatures<T>, kStages>& stages, const DecoderWeights<T>& w,
                 std::size_t out_h, std::size_t out_w) {
  return softmax_channel(decode_logits(stages, w, out_h, out_w));
}

template <typename T>
Tensor<T> decode(const std::array<StageFeatures<T>, kStages>& stages, const DecoderWeights<T>& w) {
  const Tensor<T>& first = stages[0].f_fused;
  require_rank(first, 4, "decode");
  const std::size_t s = stages[0].scale_denominator;
  return decode(stages, w, first.dim(2) * s, first.dim(3) * s);
}

#define BSM_INSTANTIATE_DECODER(T)                                                             \
  template Tensor<T> conv_block(const Tensor<T>&, const ConvBlockWeights<T>&);                 \
  template Tensor<T> decode_logits(const std::array<StageFeatures<T>, kStages>&,               \
                                   const DecoderWeights<T>&, std::size_t, std::size_t);        \
  template Tensor<T> decode(const std::array<StageFeatures<T>, kStages>&,                      \
                            const DecoderWeights<T>&, std::size_t, std::size_t);               \
  template Tensor<T> decode(const std::array<StageFeatures<T>, kStages>&,                      \
                            const DecoderWeights<T>&);

BSM_INSTANTIATE_DECODER(float)
BSM_INSTANTIATE_DECODER(double)

}  // namespace bsm
