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

// Neural primitives over NCHW feature maps and [..., D] token arrays.
// Every function is pure and rejects non-finite results with NumericError.

#include <cstddef>

#include "bsm/tensor.hpp"

namespace bsm {

struct Conv2dParams {
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t groups = 1;
};

/// Cross-correlation. input [B,C,H,W], kernel [O,C/groups,kh,kw], bias [O] or empty.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& kernel, const Tensor<T>& bias,
                 Conv2dParams params = {});

/// Mean over k×k windows placed every `stride` pixels.
template <typename T>
Tensor<T> avg_pool2d(const Tensor<T>& input, std::size_t k, std::size_t stride);

/// Half-pixel (align_corners = false) bilinear resampling to out_h × out_w.
template <typename T>
Tensor<T> bilinear_resize(const Tensor<T>& input, std::size_t out_h, std::size_t out_w);

enum class Activation { relu, silu, sigmoid, softplus };

template <typename T>
T activate(Activation kind, T x);

template <typename T>
Tensor<T> apply(Activation kind, Tensor<T> x);

template <typename T>
Tensor<T> relu(Tensor<T> x) { return apply(Activation::relu, std::move(x)); }
template <typename T>
Tensor<T> silu(Tensor<T> x) { return apply(Activation::silu, std::move(x)); }
template <typename T>
Tensor<T> sigmoid(Tensor<T> x) { return apply(Activation::sigmoid, std::move(x)); }

inline constexpr double kLayerNormEps = 1e-5;

/// Normalizes over the trailing axis then applies gain/offset of length D.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& offset);

/// x [..., Din] · Wᵀ + b. weight is [Dout, Din]; bias [Dout] or empty.
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

/// Softmax across axis 1 of [B,C,H,W].
template <typename T>
Tensor<T> softmax_channel(const Tensor<T>& x);

/// Per-channel y = scale[c] * x + shift[c] on [B,C,H,W]. Inference-mode batch norm.
template <typename T>
Tensor<T> channel_affine(const Tensor<T>& x, const Tensor<T>& scale, const Tensor<T>& shift);

/// Multiplies [B,C,H,W] by per-(b,c) weights [B,C].
template <typename T>
Tensor<T> scale_channels(const Tensor<T>& x, const Tensor<T>& weights);

/// Multiplies [B,C,H,W] by a per-pixel map [B,1,H,W].
template <typename T>
Tensor<T> scale_pixels(const Tensor<T>& x, const Tensor<T>& map);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> multiply(const Tensor<T>& a, const Tensor<T>& b);

/// Concatenates NCHW maps along channels.
template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b);

/// [B,C,H,W] -> [B,C]
template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x);

/// [B,C,H,W] -> [B,1,H,W]
template <typename T>
Tensor<T> channel_mean(const Tensor<T>& x);

/// [B,C,H,W] <-> [B,H·W,C] in row-major pixel order.
template <typename T>
Tensor<T> to_tokens(const Tensor<T>& x);
template <typename T>
Tensor<T> from_tokens(const Tensor<T>& tokens, std::size_t h, std::size_t w);

}  // namespace bsm
