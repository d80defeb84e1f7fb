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

#include "bsm/cutmix.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "bsm/error.hpp"

namespace bsm {

namespace {

double unit(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

std::size_t scaled_side(std::size_t extent, double factor) {
  const auto side = static_cast<std::size_t>(std::lround(static_cast<double>(extent) * factor));
  return std::min(side, extent);
}

}  // namespace

CutRect sample_cut_rect(std::size_t width, std::size_t height, std::uint64_t seed,
                        const CutMixParams& params) {
  if (params.min_ratio < 0.0 || params.max_ratio > 1.0 || params.min_ratio > params.max_ratio) {
    throw DomainError("cutmix: area ratio range must lie inside [0, 1]");
  }
  std::mt19937_64 engine(seed);
  const double ratio = params.min_ratio + unit(engine) * (params.max_ratio - params.min_ratio);
  const double side = std::sqrt(ratio);
  CutRect rect;
  rect.width = scaled_side(width, side);
  rect.height = scaled_side(height, side);
  rect.x = static_cast<std::size_t>(unit(engine) * static_cast<double>(width - rect.width + 1));
  rect.y = static_cast<std::size_t>(unit(engine) * static_cast<double>(height - rect.height + 1));
  return rect;
}

CutMixResult paste_region(const RgbImage& img_a, const MaskImage& mask_a, const RgbImage& img_b,
                          const MaskImage& mask_b, const CutRect& rect) {
  const std::size_t w = img_a.width;
  const std::size_t h = img_a.height;
  if (img_b.width != w || img_b.height != h || mask_a.width != w || mask_a.height != h ||
      mask_b.width != w || mask_b.height != h) {
    throw DimensionError("cutmix: images and masks must share one shape");
  }
  if (rect.x + rect.width > w || rect.y + rect.height > h) {
    throw DimensionError("cutmix: rectangle leaves the frame");
  }

  CutMixResult out{img_a, mask_a, 0.0, rect};
  for (std::size_t y = rect.y; y < rect.y + rect.height; ++y) {
    const std::size_t row = y * w;
    std::copy_n(img_b.pixels.begin() + static_cast<std::ptrdiff_t>(3 * (row + rect.x)),
                3 * rect.width,
                out.image.pixels.begin() + static_cast<std::ptrdiff_t>(3 * (row + rect.x)));
    std::copy_n(mask_b.labels.begin() + static_cast<std::ptrdiff_t>(row + rect.x), rect.width,
                out.mask.labels.begin() + static_cast<std::ptrdiff_t>(row + rect.x));
  }
  out.mix_weight = static_cast<double>(rect.area()) / static_cast<double>(w * h);
  return out;
}

CutMixResult cutmix(const RgbImage& img_a, const MaskImage& mask_a, const RgbImage& img_b,
                    const MaskImage& mask_b, std::uint64_t seed, const CutMixParams& params) {
  return paste_region(img_a, mask_a, img_b, mask_b,
                      sample_cut_rect(img_a.width, img_a.height, seed, params));
}

}  // namespace bsm
