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

#include <cstring>
#include <filesystem>

#include "bsm/checkpoint.hpp"
#include "bsm/cutmix.hpp"
#include "bsm/mask.hpp"
#include "bsm/netpbm.hpp"
#include "bsm/tiling.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace bsm;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "bsm_unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("tiling") {
  TEST_CASE("canonical scene grid") {
    const TileGrid g = plan_tiles(kSceneWidth, kSceneHeight);
    CHECK(g.count() == 150);
    CHECK(g.anchors.front() == TileAnchor{0, 0});
    CHECK(g.anchors.back() == TileAnchor{5088, 3264});
    CHECK(g.anchors[1].x == 363);  // round(5088/14)
  }

  TEST_CASE("degenerate and exact grids") {
    const TileGrid same = plan_tiles(384, 384, 384, 2, 2);
    CHECK(same.count() == 4);
    for (const auto& a : same.anchors) CHECK(a == TileAnchor{0, 0});
    const TileGrid exact = plan_tiles(768, 384, 384, 2, 2);
    CHECK(exact.anchors[1] == TileAnchor{384, 0});
    CHECK_THROWS_AS(plan_tiles(300, 400, 384, 2, 2), DomainError);
    CHECK_THROWS_AS(plan_tiles(800, 800, 384, 1, 2), DomainError);
  }

  TEST_CASE("every pixel covered") {
    for (auto [w, h, t, nx, ny] : {std::tuple{100, 70, 32, 4, 3}, {97, 61, 20, 5, 4},
                                   {64, 64, 16, 4, 4}, {50, 40, 25, 2, 2}}) {
      const TileGrid g = plan_tiles(w, h, t, nx, ny);
      const auto cover = oracle::tile_coverage(g);
      CHECK(std::count(cover.begin(), cover.end(), 0u) == 0);
    }
  }

  TEST_CASE("stitching") {
    const TileGrid exact = plan_tiles(8, 4, 4, 2, 2);  // two disjoint tiles, listed twice
    std::vector<TensorF> tiles(4, TensorF({2, 4, 4}));
    for (std::size_t k = 0; k < 4; ++k) {
      for (std::size_t i = 0; i < 16; ++i) {
        tiles[k][i] = 0.25f;
        tiles[k][16 + i] = 0.75f;
      }
    }
    const TensorF flat = stitch_predictions(tiles, exact);
    for (std::size_t i = 0; i < 32; ++i) {
      CHECK(flat[i] == 0.25f);
      CHECK(flat[32 + i] == 0.75f);
    }

    // two tiles overlapping by half: 0.2 and 0.6 average to 0.4
    const TileGrid half = plan_tiles(6, 4, 4, 2, 2);
    std::vector<TensorF> two(4, TensorF({2, 4, 4}));
    for (std::size_t k = 0; k < 4; ++k) {
      const float p = k % 2 == 0 ? 0.2f : 0.6f;
      for (std::size_t i = 0; i < 16; ++i) {
        two[k][i] = p;
        two[k][16 + i] = 1 - p;
      }
    }
    const TensorF mixed = stitch_predictions(two, half);
    CHECK(mixed.at(0, 0, 0) == doctest::Approx(0.2));
    CHECK(mixed.at(0, 1, 3) == doctest::Approx(0.4));
    CHECK(mixed.at(0, 2, 5) == doctest::Approx(0.6));

    tiles.pop_back();
    CHECK_THROWS_AS(stitch_predictions(tiles, exact), DimensionError);
  }

  TEST_CASE("stitch of split hard labels") {
    oracle::Rng rng(70);
    const TileGrid g = plan_tiles(90, 70, 32, 4, 3);
    const MaskImage scene = oracle::random_mask(rng, 90, 70);
    std::vector<TensorF> tiles;
    for (const MaskImage& m : split_scene(scene, g)) tiles.push_back(one_hot(m));
    CHECK(decode_mask(stitch_predictions(tiles, g)) == scene);

    RgbImage rgb(90, 70);
    for (auto& v : rgb.pixels) v = static_cast<std::uint8_t>(rng.bits());
    const auto pieces = split_scene(rgb, g);
    CHECK(pieces.size() == 12);
    const auto& a = g.anchors[5];
    CHECK(pieces[5].pixels[0] == rgb.pixels[3 * (a.y * 90 + a.x)]);
  }
}

TEST_SUITE("mask") {
  TEST_CASE("threshold and tie break") {
    GrayImage g(3, 1);
    g.pixels = {127, 128, 255};
    const MaskImage m = mask_from_gray(g);
    CHECK(m.labels == std::vector<Label>{Label::blk, Label::mat, Label::mat});
    const TensorF white = encode_mask(GrayImage(2, 2, 255));
    for (std::size_t i = 0; i < 4; ++i) CHECK(white[4 + i] == 1.0f);
    CHECK(decode_mask(TensorF({2, 1, 1}, 0.5f)).labels[0] == Label::blk);
    CHECK(mask_to_gray(m).pixels == std::vector<std::uint8_t>{0, 255, 255});
  }

  TEST_CASE("decode of encode is the identity") {
    oracle::Rng rng(71);
    const MaskImage m = oracle::random_mask(rng, 13, 7);
    CHECK(decode_mask(one_hot(m)) == m);
  }
}

TEST_SUITE("cutmix") {
  TEST_CASE("empty, full and quarter pastes") {
    oracle::Rng rng(72);
    RgbImage a(384, 384), b(384, 384);
    for (auto& v : a.pixels) v = static_cast<std::uint8_t>(rng.bits());
    for (auto& v : b.pixels) v = static_cast<std::uint8_t>(rng.bits());
    const MaskImage ma(384, 384, Label::blk), mb(384, 384, Label::mat);

    const CutMixResult none = cutmix(a, ma, b, mb, 1, {0.0, 0.0});
    CHECK(none.image == a);
    CHECK(none.mix_weight == 0.0);

    const CutMixResult all = cutmix(a, ma, b, mb, 1, {1.0, 1.0});
    CHECK(all.image == b);
    CHECK(all.mask == mb);
    CHECK(all.mix_weight == 1.0);

    const CutMixResult quarter = paste_region(a, ma, b, mb, {100, 50, 192, 192});
    CHECK(quarter.mix_weight == 0.25);
  }

  TEST_CASE("sampled ratios and determinism") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const CutRect r = sample_cut_rect(200, 120, seed);
      const double ratio = static_cast<double>(r.area()) / (200.0 * 120.0);
      CHECK(ratio >= 0.09);
      CHECK(ratio <= 0.52);
      CHECK(r.x + r.width <= 200);
      CHECK(r.y + r.height <= 120);
      const CutRect again = sample_cut_rect(200, 120, seed);
      CHECK(again.x == r.x);
      CHECK(again.area() == r.area());
    }
    CHECK_THROWS_AS(sample_cut_rect(10, 10, 0, {0.6, 0.5}), DomainError);
  }

  TEST_CASE("shape mismatch") {
    CHECK_THROWS_AS(cutmix(RgbImage(4, 4), MaskImage(4, 4), RgbImage(4, 5), MaskImage(4, 5), 0),
                    DimensionError);
  }
}

TEST_SUITE("netpbm") {
  TEST_CASE("white PPM round trip") {
    RgbImage white(2, 2);
    std::fill(white.pixels.begin(), white.pixels.end(), 255);
    const auto bytes = encode_ppm(white);
    CHECK(decode_ppm(bytes) == white);
    CHECK(encode_ppm(decode_ppm(bytes)) == bytes);
  }

  TEST_CASE("header parsing") {
    const auto ok = bytes_of("P5\n# comment\n2 1 # trailing\n255\n\x01\x02");
    const GrayImage g = decode_pgm(ok);
    CHECK(g.width == 2);
    CHECK(g.pixels == std::vector<std::uint8_t>{1, 2});
  }

  TEST_CASE("malformed files") {
    CHECK_THROWS_AS(decode_pgm(bytes_of("P5\n2 2\n65535\n")), FormatError);
    CHECK_THROWS_AS(decode_ppm(bytes_of("P5\n1 1\n255\n\x01")), FormatError);
    CHECK_THROWS_AS(decode_pgm(bytes_of("P5\n0 2\n255\n")), FormatError);
    try {
      decode_pgm(bytes_of("P5\n2 2\n255\n\x01\x02"));
      FAIL("truncated payload accepted");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 13);  // end of the short payload
    }
  }

  TEST_CASE("file errors") {
    CHECK_THROWS_AS(read_ppm("/nonexistent/dir/x.ppm"), IoError);
    const auto path = scratch("g.pgm");
    GrayImage g(3, 2, 9);
    write_pgm(path, g);
    CHECK(read_pgm(path) == g);
  }
}

TEST_SUITE("checkpoint") {
  TEST_CASE("round trip of seeded weights") {
    ModelConfig cfg;
    const ModelWeights w = init_weights(cfg, 7);
    const auto path = scratch("w.bsmb");
    save_checkpoint(path, w);
    const ModelWeights back = load_checkpoint(path);
    CHECK(back == w);
    CHECK(encode_checkpoint(back) == read_file(path));
  }

  TEST_CASE("layout") {
    ModelWeights w;
    w.add("ab", TensorF({2}, {1.0f, -2.0f}));
    const auto bytes = encode_checkpoint(w);
    CHECK(bytes.size() == 4 + 4 + 4 + 4 + 2 + 4 + 8 + 8);
    CHECK(std::memcmp(bytes.data(), "BSMB", 4) == 0);
    CHECK(bytes[4] == 1);
    CHECK(bytes[8] == 1);
    CHECK(bytes[12] == 2);
    CHECK(bytes[18] == 1);   // rank
    CHECK(bytes[22] == 2);   // dim
    CHECK(bytes[33] == 0x3f);  // 1.0f little-endian high byte
  }

  TEST_CASE("corrupt checkpoints") {
    ModelWeights w;
    w.add("t", TensorF({3}, 1.0f));
    auto bytes = encode_checkpoint(w);
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(decode_checkpoint(bad_magic), FormatError);
    auto bad_version = bytes;
    bad_version[4] = 2;
    CHECK_THROWS_AS(decode_checkpoint(bad_version), FormatError);
    auto truncated = bytes;
    truncated.pop_back();
    try {
      decode_checkpoint(truncated);
      FAIL("truncated checkpoint accepted");
    } catch (const FormatError& e) {
      CHECK(e.offset() == 29);
    }
    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(decode_checkpoint(trailing), FormatError);
  }
}
