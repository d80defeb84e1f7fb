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

#include "bsm/loss.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "bsm/model_config.hpp"

namespace bsm {

void LossWeights::validate() const {
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) {
    throw DomainError("loss weights must be nonnegative");
  }
}

namespace {

template <typename T>
void require_pair(const Tensor<T>& probs, const Tensor<T>& target, const char* where) {
  require_rank(probs, 4, where);
  if (probs.dim(1) != kClasses) {
    throw DimensionError(std::string(where) + ": expected " + std::to_string(kClasses) +
                         " channels, got " + shape_string(probs.dims()));
  }
  require_shape(target, probs.dims(), where);
}

}  // namespace

template <typename T>
double ce_loss(const Tensor<T>& probs, const Tensor<T>& target) {
  require_pair(probs, target, "ce_loss");
  const std::size_t b = probs.dim(0);
  const std::size_t hw = probs.dim(2) * probs.dim(3);
  const T* y = probs.raw();
  const T* t = target.raw();

  double sum = 0.0;
  for (std::size_t n = 0; n < b; ++n) {
    for (std::size_t p = 0; p < hw; ++p) {
      double mass = 0.0;
      double pixel = 0.0;
      for (std::size_t c = 0; c < kClasses; ++c) {
        const std::size_t i = (n * kClasses + c) * hw + p;
        const double tv = static_cast<double>(t[i]);
        if (tv != 0.0 && tv != 1.0) throw DomainError("ce_loss: target is not one-hot");
        mass += tv;
        if (tv != 0.0) {
          pixel -= std::log(std::clamp(static_cast<double>(y[i]), kLogClampFloor, 1.0));
        }
      }
      if (mass != 1.0) throw DomainError("ce_loss: target is not one-hot");
      sum += pixel;
    }
  }
  return sum / static_cast<double>(b * hw);
}

template <typename T>
double iou_loss(std::span<const T> y, std::span<const T> t) {
  if (y.size() != t.size()) {
    throw DimensionError("iou_loss: " + std::to_string(y.size()) + " predictions vs " +
                         std::to_string(t.size()) + " targets");
  }
  double inter = 0.0;
  double sum_y = 0.0;
  double sum_t = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double yv = static_cast<double>(y[i]);
    const double tv = static_cast<double>(t[i]);
    inter += yv * tv;
    sum_y += yv;
    sum_t += tv;
  }
  const double uni = sum_t + sum_y - inter;
  if (uni == 0.0) {
    std::cerr << "warning: iou_loss on empty prediction and target, returning 0\n";
    return 0.0;
  }
  return 1.0 - inter / uni;
}

template <typename T>
double iou_loss(const Tensor<T>& y, const Tensor<T>& t) {
  require_rank(y, 2, "iou_loss");
  require_shape(t, y.dims(), "iou_loss");
  return iou_loss<T>(std::span<const T>(y.raw(), y.size()), std::span<const T>(t.raw(), t.size()));
}

template <typename T>
double miou_loss(const Tensor<T>& probs, const Tensor<T>& target) {
  require_pair(probs, target, "miou_loss");
  const std::size_t b = probs.dim(0);
  const std::size_t hw = probs.dim(2) * probs.dim(3);

  // Gather each class plane across the batch so one IoU covers all images.
  double total = 0.0;
  std::vector<T> ys(b * hw);
  std::vector<T> ts(b * hw);
  for (std::size_t c = 0; c < kClasses; ++c) {
    for (std::size_t n = 0; n < b; ++n) {
      const std::size_t src = (n * kClasses + c) * hw;
      std::copy_n(probs.raw() + src, hw, ys.begin() + static_cast<std::ptrdiff_t>(n * hw));
      std::copy_n(target.raw() + src, hw, ts.begin() + static_cast<std::ptrdiff_t>(n * hw));
    }
    total += iou_loss<T>(ys, ts);
  }
  return total / static_cast<double>(kClasses);
}

template <typename T>
double total_loss(const Tensor<T>& probs, const Tensor<T>& target, const LossWeights& w) {
  w.validate();
  return w.lambda1 * ce_loss(probs, target) + w.lambda2 * miou_loss(probs, target);
}

#define BSM_INSTANTIATE_LOSS(T)                                               \
  template double ce_loss(const Tensor<T>&, const Tensor<T>&);                \
  template double iou_loss(std::span<const T>, std::span<const T>);           \
  template double iou_loss(const Tensor<T>&, const Tensor<T>&);               \
  template double miou_loss(const Tensor<T>&, const Tensor<T>&);              \
  template double total_loss(const Tensor<T>&, const Tensor<T>&, const LossWeights&);

BSM_INSTANTIATE_LOSS(float)
BSM_INSTANTIATE_LOSS(double)

}  // namespace bsm
