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

#include "bsm/mask.hpp"

#include <algorithm>
#include <cmath>

namespace bsm {

MaskImage mask_from_gray(const GrayImage& gray) {
  MaskImage mask(gray.width, gray.height);
  std::transform(gray.pixels.begin(), gray.pixels.end(), mask.labels.begin(),
                 [](std::uint8_t v) { return v >= kMatThreshold ? Label::mat : Label::blk; });
  return mask;
}

GrayImage mask_to_gray(const MaskImage& mask) {
  GrayImage gray(mask.width, mask.height);
  std::transform(mask.labels.begin(), mask.labels.end(), gray.pixels.begin(),
                 [](Label l) { return l == Label::mat ? std::uint8_t{255} : std::uint8_t{0}; });
  return gray;
}

TensorF one_hot(const MaskImage& mask) {
  const std::size_t plane = mask.width * mask.height;
  TensorF t({2, mask.height, mask.width});
  for (std::size_t p = 0; p < plane; ++p) {
    t[static_cast<std::size_t>(mask.labels[p]) * plane + p] = 1.0f;
  }
  return t;
}

TensorF encode_mask(const GrayImage& gray) { return one_hot(mask_from_gray(gray)); }

template <typename T>
MaskImage decode_mask(const Tensor<T>& probs) {
  require_rank(probs, 3, "decode_mask");
  if (probs.dim(0) != 2) throw DimensionError("decode_mask: expected 2 channels");
  MaskImage mask(probs.dim(2), probs.dim(1));
  const std::size_t plane = mask.width * mask.height;
  for (std::size_t p = 0; p < plane; ++p) {
    mask.labels[p] = probs[plane + p] > probs[p] ? Label::mat : Label::blk;
  }
  return mask;
}

template <typename T>
GrayImage probability_to_gray(const Tensor<T>& probs, Label channel) {
  require_rank(probs, 3, "probability_to_gray");
  if (probs.dim(0) != 2) throw DimensionError("probability_to_gray: expected 2 channels");
  GrayImage gray(probs.dim(2), probs.dim(1));
  const std::size_t plane = gray.width * gray.height;
  const T* src = probs.raw() + static_cast<std::size_t>(channel) * plane;
  for (std::size_t p = 0; p < plane; ++p) {
    const double v = std::clamp(static_cast<double>(src[p]), 0.0, 1.0);
    gray.pixels[p] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  return gray;
}

TensorF image_to_tensor(const RgbImage& img) {
  const std::size_t plane = img.width * img.height;
  TensorF t({1, 3, img.height, img.width});
  for (std::size_t p = 0; p < plane; ++p) {
    for (std::size_t c = 0; c < 3; ++c) {
      t[c * plane + p] = static_cast<float>(img.pixels[3 * p + c]) / 255.0f;
    }
  }
  return t;
}

template MaskImage decode_mask(const Tensor<float>&);
template MaskImage decode_mask(const Tensor<double>&);
template GrayImage probability_to_gray(const Tensor<float>&, Label);
template GrayImage probability_to_gray(const Tensor<double>&, Label);

}  // namespace bsm
