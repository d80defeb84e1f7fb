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

#include <span>

#include "bsm/tensor.hpp"

namespace bsm {

struct LossWeights {
  double lambda1 = 0.5;
  double lambda2 = 0.5;

  void validate() const;
};

inline constexpr double kLogClampFloor = 1e-12;

/// Mean over pixels of -Σ_c t·ln(clamp(y, 1e-12, 1)). Y, T are [B,2,H,W]; T must be one-hot.
template <typename T>
double ce_loss(const Tensor<T>& probs, const Tensor<T>& target);

/// 1 - Σty / (Σt + Σy - Σty). Returns 0 (and warns on stderr) when both sums vanish.
template <typename T>
double iou_loss(std::span<const T> y, std::span<const T> t);

/// Same on [H,W] tensors.
template <typename T>
double iou_loss(const Tensor<T>& y, const Tensor<T>& t);

/// Average of the per-class soft IoU losses over the two channels of [B,2,H,W].
template <typename T>
double miou_loss(const Tensor<T>& probs, const Tensor<T>& target);

template <typename T>
double total_loss(const Tensor<T>& probs, const Tensor<T>& target, const LossWeights& w = {});

}  // namespace bsm
