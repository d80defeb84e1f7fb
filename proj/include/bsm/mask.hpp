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

// Two-class label rasters and their tensor encodings. Channel 0 is black-soil
// (blk), channel 1 is mattic epipedon (mat).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bsm/netpbm.hpp"
#include "bsm/tensor.hpp"

namespace bsm {

enum class Label : std::uint8_t { blk = 0, mat = 1 };

struct MaskImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Label> labels;

  MaskImage() = default;
  MaskImage(std::size_t w, std::size_t h, Label fill = Label::blk)
      : width(w), height(h), labels(w * h, fill) {}

  friend bool operator==(const MaskImage&, const MaskImage&) = default;
};

/// Gray values at or above this are mat.
inline constexpr std::uint8_t kMatThreshold = 128;

MaskImage mask_from_gray(const GrayImage& gray);
/// blk -> 0, mat -> 255.
GrayImage mask_to_gray(const MaskImage& mask);

/// One-hot [2,H,W].
TensorF one_hot(const MaskImage& mask);
TensorF encode_mask(const GrayImage& gray);

/// Per-pixel argmax of [2,H,W]; ties go to blk.
template <typename T>
MaskImage decode_mask(const Tensor<T>& probs);

/// Probability of one class as an 8-bit raster, round(p·255).
template <typename T>
GrayImage probability_to_gray(const Tensor<T>& probs, Label channel);

/// [1,3,H,W] with values scaled to [0,1].
TensorF image_to_tensor(const RgbImage& img);

}  // namespace bsm
