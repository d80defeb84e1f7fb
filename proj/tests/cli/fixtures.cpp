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

// Fixture writer and raster inspector for the command-line tests.
//
//   bsm_cli_fixtures make <dir>     write the input files
//   bsm_cli_fixtures levels <pgm>   print WxH and the distinct gray levels

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include "bsm/netpbm.hpp"

namespace {

using namespace bsm;

RgbImage pattern(std::size_t w, std::size_t h) {
  RgbImage img;
  img.width = w;
  img.height = h;
  img.pixels.resize(w * h * 3);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      std::uint8_t* p = &img.pixels[(y * w + x) * 3];
      p[0] = static_cast<std::uint8_t>((x * 7 + y * 3) % 256);
      p[1] = static_cast<std::uint8_t>((x * y) % 256);
      p[2] = static_cast<std::uint8_t>(((x / 8 + y / 8) % 2) * 200 + 20);
    }
  }
  return img;
}

GrayImage gray(std::size_t w, std::size_t h, std::initializer_list<std::uint8_t> values) {
  GrayImage img;
  img.width = w;
  img.height = h;
  img.pixels.assign(values);
  return img;
}

void make(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_ppm(dir / "image64.ppm", pattern(64, 64));
  write_ppm(dir / "image384.ppm", pattern(384, 384));
  write_ppm(dir / "scene.ppm", pattern(100, 80));
  write_ppm(dir / "odd.ppm", pattern(40, 40));
  // hand confusion case: pred blk,blk,mat,mat against gt blk,mat,mat,mat
  write_pgm(dir / "pred2x2.pgm", gray(2, 2, {0, 0, 255, 255}));
  write_pgm(dir / "gt2x2.pgm", gray(2, 2, {0, 255, 255, 255}));
  write_pgm(dir / "gt3x2.pgm", gray(3, 2, {0, 255, 255, 255, 0, 0}));

  const std::vector<std::uint8_t> full = encode_pgm(gray(2, 2, {0, 255, 255, 255}));
  std::ofstream(dir / "truncated.pgm", std::ios::binary)
      .write(reinterpret_cast<const char*>(full.data()), static_cast<std::streamsize>(full.size() - 2));

  std::ofstream(dir / "small.cfg") << "# reduced model for quick runs\n"
                                   << "channels=4\n"
                                   << "state-dim=4\n"
                                   << "seed=7\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: bsm_cli_fixtures make <dir> | levels <pgm>\n";
    return 1;
  }
  const std::string mode = argv[1];
  try {
    if (mode == "make") {
      make(argv[2]);
      return 0;
    }
    if (mode == "levels") {
      const GrayImage img = read_pgm(argv[2]);
      const std::set<int> levels(img.pixels.begin(), img.pixels.end());
      std::string line;
      for (int v : levels) line += (line.empty() ? "" : " ") + std::to_string(v);
      std::cout << img.width << "x" << img.height << " levels: " << line << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  std::cerr << "unknown mode " << mode << "\n";
  return 1;
}
