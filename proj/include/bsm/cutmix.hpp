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

#include <cstddef>
#include <cstdint>

#include "bsm/mask.hpp"
#include "bsm/netpbm.hpp"

namespace bsm {

struct CutRect {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t width = 0;
  std::size_t height = 0;

  std::size_t area() const { return width * height; }
};

/// Area fraction of the pasted rectangle is drawn uniformly from [min_ratio, max_ratio].
struct CutMixParams {
  double min_ratio = 0.1;
  double max_ratio = 0.5;
};

struct CutMixResult {
  RgbImage image;
  MaskImage mask;
  double mix_weight = 0.0;  // pasted pixels / total pixels
  CutRect rect;
};

/// Rectangle with the image's aspect ratio and the drawn area fraction,
/// placed uniformly inside a width × height frame.
CutRect sample_cut_rect(std::size_t width, std::size_t height, std::uint64_t seed,
                        const CutMixParams& params = {});

/// Pastes `rect` of (img_b, mask_b) over (img_a, mask_a).
CutMixResult paste_region(const RgbImage& img_a, const MaskImage& mask_a, const RgbImage& img_b,
                          const MaskImage& mask_b, const CutRect& rect);

CutMixResult cutmix(const RgbImage& img_a, const MaskImage& mask_a, const RgbImage& img_b,
                    const MaskImage& mask_b, std::uint64_t seed, const CutMixParams& params = {});

}  // namespace bsm
