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

// Scene <-> tile geometry. Tiles sit on an evenly spaced nx × ny grid whose
// first and last anchors touch the scene edges, so neighbours may overlap.

#include <cstddef>
#include <span>
#include <vector>

#include "bsm/mask.hpp"
#include "bsm/netpbm.hpp"
#include "bsm/tensor.hpp"

namespace bsm {

inline constexpr std::size_t kTileSize = 384;
inline constexpr std::size_t kSceneWidth = 5472;
inline constexpr std::size_t kSceneHeight = 3648;
inline constexpr std::size_t kTilesX = 15;
inline constexpr std::size_t kTilesY = 10;

struct TileAnchor {
  std::size_t x = 0;
  std::size_t y = 0;

  friend bool operator==(const TileAnchor&, const TileAnchor&) = default;
};

struct TileGrid {
  std::size_t scene_width = 0;
  std::size_t scene_height = 0;
  std::size_t tile = kTileSize;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<TileAnchor> anchors;  // row-major: y outer, x inner

  std::size_t count() const { return anchors.size(); }
};

/// x_i = round(i·(W - tile)/(nx - 1)), likewise for y.
TileGrid plan_tiles(std::size_t width, std::size_t height, std::size_t tile = kTileSize,
                    std::size_t nx = kTilesX, std::size_t ny = kTilesY);

std::vector<RgbImage> split_scene(const RgbImage& scene, const TileGrid& grid);
std::vector<MaskImage> split_scene(const MaskImage& scene, const TileGrid& grid);

/// Averages [2,tile,tile] probabilities over every covering tile and renormalizes
/// each pixel's channels to sum to one. Returns [2,H,W].
TensorF stitch_predictions(std::span<const TensorF> tiles, const TileGrid& grid);

}  // namespace bsm
