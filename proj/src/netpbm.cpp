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

#include "bsm/netpbm.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "bsm/error.hpp"

namespace bsm {

namespace {

struct Header {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t payload = 0;  // offset of the first raster byte
};

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void expect_magic(char kind) {
    if (bytes_.size() < 2 || bytes_[0] != 'P' || bytes_[1] != static_cast<std::uint8_t>(kind)) {
      throw FormatError(std::string("bad magic, expected P") + kind, 0);
    }
    pos_ = 2;
  }

  std::size_t number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (std::size_t{1} << 32)) throw FormatError(std::string(what) + " too large", start);
      ++pos_;
    }
    if (pos_ == start) throw FormatError(std::string("expected ") + what, pos_);
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t end_of_header() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError("expected whitespace after maxval", pos_);
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

Header parse_header(std::span<const std::uint8_t> bytes, char kind, std::size_t channels) {
  HeaderReader reader(bytes);
  reader.expect_magic(kind);
  Header h;
  h.width = reader.number("width");
  h.height = reader.number("height");
  const std::size_t maxval = reader.number("maxval");
  if (h.width == 0 || h.height == 0) throw FormatError("zero image dimension", 2);
  if (maxval != 255) {
    throw FormatError("unsupported maxval " + std::to_string(maxval) + " (only 255)", 2);
  }
  h.payload = reader.end_of_header();
  const std::size_t need = h.width * h.height * channels;
  if (bytes.size() < h.payload + need) {
    throw FormatError("truncated raster: need " + std::to_string(need) + " bytes, have " +
                          std::to_string(bytes.size() - std::min(bytes.size(), h.payload)),
                      bytes.size());
  }
  return h;
}

std::vector<std::uint8_t> encode(char kind, std::size_t w, std::size_t h,
                                 const std::vector<std::uint8_t>& raster) {
  const std::string header = std::string("P") + kind + "\n" + std::to_string(w) + " " +
                             std::to_string(h) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), raster.begin(), raster.end());
  return out;
}

}  // namespace

RgbImage decode_ppm(std::span<const std::uint8_t> bytes) {
  const Header h = parse_header(bytes, '6', 3);
  RgbImage img(h.width, h.height);
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(h.payload), img.pixels.size(),
              img.pixels.begin());
  return img;
}

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  const Header h = parse_header(bytes, '5', 1);
  GrayImage img(h.width, h.height);
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(h.payload), img.pixels.size(),
              img.pixels.begin());
  return img;
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& img) {
  if (img.pixels.size() != 3 * img.width * img.height || img.pixels.empty()) {
    throw FormatError("ppm: raster size does not match dimensions");
  }
  return encode('6', img.width, img.height, img.pixels);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  if (img.pixels.size() != img.width * img.height || img.pixels.empty()) {
    throw FormatError("pgm: raster size does not match dimensions");
  }
  return encode('5', img.width, img.height, img.pixels);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

RgbImage read_ppm(const std::filesystem::path& path) { return decode_ppm(read_file(path)); }
GrayImage read_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }
void write_ppm(const std::filesystem::path& path, const RgbImage& img) {
  write_file(path, encode_ppm(img));
}
void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  write_file(path, encode_pgm(img));
}

}  // namespace bsm
