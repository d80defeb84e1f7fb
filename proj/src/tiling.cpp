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

#include "bsm/tiling.hpp"

#include <string>

namespace bsm {

namespace {

std::vector<std::size_t> axis_anchors(std::size_t extent, std::size_t tile, std::size_t count) {
  const std::size_t span = extent - tile;
  const std::size_t steps = count - 1;
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = (2 * i * span + steps) / (2 * steps);  // round half up
  }
  return out;
}

void check_grid(const TileGrid& grid, std::size_t width, std::size_t height) {
  if (width != grid.scene_width || height != grid.scene_height) {
    throw DimensionError("tile grid planned for " + std::to_string(grid.scene_width) + "x" +
                         std::to_string(grid.scene_height) + ", scene is " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
}

template <typename Pixel>
std::vector<Pixel> crop(const std::vector<Pixel>& src, std::size_t src_width, std::size_t channels,
                        const TileAnchor& at, std::size_t tile) {
  std::vector<Pixel> out(tile * tile * channels);
  for (std::size_t y = 0; y < tile; ++y) {
    const auto begin = src.begin() +
                       static_cast<std::ptrdiff_t>(((at.y + y) * src_width + at.x) * channels);
    std::copy(begin, begin + static_cast<std::ptrdiff_t>(tile * channels),
              out.begin() + static_cast<std::ptrdiff_t>(y * tile * channels));
  }
  return out;
}

}  // namespace

TileGrid plan_tiles(std::size_t width, std::size_t height, std::size_t tile, std::size_t nx,
                    std::size_t ny) {
  if (tile == 0 || tile > width || tile > height) {
    throw DomainError("plan_tiles: tile " + std::to_string(tile) + " does not fit a " +
                      std::to_string(width) + "x" + std::to_string(height) + " scene");
  }
  if (nx < 2 || ny < 2) throw DomainError("plan_tiles: need at least 2 tiles per axis");

  TileGrid grid{width, height, tile, nx, ny, {}};
  const auto xs = axis_anchors(width, tile, nx);
  const auto ys = axis_anchors(height, tile, ny);
  grid.anchors.reserve(nx * ny);
  for (std::size_t y : ys) {
    for (std::size_t x : xs) grid.anchors.push_back({x, y});
  }
  return grid;
}

std::vector<RgbImage> split_scene(const RgbImage& scene, const TileGrid& grid) {
  check_grid(grid, scene.width, scene.height);
  std::vector<RgbImage> tiles;
  tiles.reserve(grid.count());
  for (const auto& at : grid.anchors) {
    RgbImage t;
    t.width = t.height = grid.tile;
    t.pixels = crop(scene.pixels, scene.width, 3, at, grid.tile);
    tiles.push_back(std::move(t));
  }
  return tiles;
}

std::vector<MaskImage> split_scene(const MaskImage& scene, const TileGrid& grid) {
  check_grid(grid, scene.width, scene.height);
  std::vector<MaskImage> tiles;
  tiles.reserve(grid.count());
  for (const auto& at : grid.anchors) {
    MaskImage t;
    t.width = t.height = grid.tile;
    t.labels = crop(scene.labels, scene.width, 1, at, grid.tile);
    tiles.push_back(std::move(t));
  }
  return tiles;
}

TensorF stitch_predictions(std::span<const TensorF> tiles, const TileGrid& grid) {
  if (tiles.size() != grid.count()) {
    throw DimensionError("stitch_predictions: " + std::to_string(tiles.size()) +
                         " tiles for a grid of " + std::to_string(grid.count()));
  }
  const std::size_t w = grid.scene_width;
  const std::size_t h = grid.scene_height;
  const std::size_t plane = w * h;
  const std::size_t tp = grid.tile * grid.tile;
  std::vector<double> sum(2 * plane, 0.0);
  std::vector<std::uint32_t> hits(plane, 0);

  for (std::size_t k = 0; k < tiles.size(); ++k) {
    require_shape(tiles[k], {2, grid.tile, grid.tile}, "stitch_predictions tile");
    const auto& at = grid.anchors[k];
    for (std::size_t y = 0; y < grid.tile; ++y) {
      for (std::size_t x = 0; x < grid.tile; ++x) {
        const std::size_t p = (at.y + y) * w + at.x + x;
        const std::size_t q = y * grid.tile + x;
        sum[p] += tiles[k][q];
        sum[plane + p] += tiles[k][tp + q];
        ++hits[p];
      }
    }
  }

  TensorF out({2, h, w});
  for (std::size_t p = 0; p < plane; ++p) {
    if (hits[p] == 0) throw DomainError("stitch_predictions: grid leaves pixels uncovered");
    const double blk = sum[p] / hits[p];
    const double mat = sum[plane + p] / hits[p];
    const double total = blk + mat;
    out[p] = static_cast<float>(total > 0.0 ? blk / total : 0.5);
    out[plane + p] = static_cast<float>(total > 0.0 ? mat / total : 0.5);
  }
  return out;
}

}  // namespace bsm
