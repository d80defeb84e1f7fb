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

#include "bsm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "bsm/netpbm.hpp"

namespace bsm {

namespace {

constexpr char kMagic[4] = {'B', 'S', 'M', 'B'};
constexpr std::uint64_t kMaxRank = 8;

class Writer {
 public:
  void bytes(const void* src, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(src);
    out_.insert(out_.end(), p, p + n);
  }

  template <typename U>
  void little(U value) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
    }
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::span<const std::uint8_t> bytes(std::size_t n, const char* what) {
    if (in_.size() - pos_ < n) {
      throw FormatError(std::string("checkpoint truncated while reading ") + what, pos_);
    }
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  template <typename U>
  U little(const char* what) {
    const auto raw = bytes(sizeof(U), what);
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(raw[i]) << (8 * i);
    return value;
  }

  std::size_t position() const { return pos_; }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const ModelWeights& weights) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.little<std::uint32_t>(kCheckpointVersion);
  w.little<std::uint32_t>(static_cast<std::uint32_t>(weights.size()));
  for (const auto& [name, tensor] : weights.entries()) {
    w.little<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.little<std::uint32_t>(static_cast<std::uint32_t>(tensor.rank()));
    for (std::size_t d : tensor.dims()) w.little<std::uint64_t>(d);
    for (float v : tensor.data()) w.little<std::uint32_t>(std::bit_cast<std::uint32_t>(v));
  }
  return w.take();
}

ModelWeights decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.bytes(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw FormatError("bad checkpoint magic", 0);
  const auto version = r.little<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version), 4);
  }
  const auto count = r.little<std::uint32_t>("tensor count");

  ModelWeights table;
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::size_t entry_start = r.position();
    const auto name_len = r.little<std::uint32_t>("name length");
    const auto name_bytes = r.bytes(name_len, "name");
    std::string name(name_bytes.begin(), name_bytes.end());

    const auto rank = r.little<std::uint32_t>("rank");
    if (rank == 0 || rank > kMaxRank) {
      throw FormatError("tensor '" + name + "' has unsupported rank " + std::to_string(rank),
                        entry_start);
    }
    Shape dims(rank);
    std::uint64_t volume = 1;
    for (auto& d : dims) {
      const auto extent = r.little<std::uint64_t>("dims");
      if (extent == 0 || extent > (std::uint64_t{1} << 32)) {
        throw FormatError("tensor '" + name + "' has invalid extent", r.position() - 8);
      }
      d = static_cast<std::size_t>(extent);
      volume *= extent;
      if (volume > (std::uint64_t{1} << 34)) {
        throw FormatError("tensor '" + name + "' is implausibly large", r.position() - 8);
      }
    }

    const auto raw = r.bytes(static_cast<std::size_t>(volume) * 4, "tensor data");
    std::vector<float> data(static_cast<std::size_t>(volume));
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::uint32_t bits = 0;
      for (std::size_t b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(raw[4 * i + b]) << (8 * b);
      data[i] = std::bit_cast<float>(bits);
    }
    try {
      table.add(std::move(name), TensorF(std::move(dims), std::move(data)));
    } catch (const FormatError& e) {
      throw FormatError(e.what(), entry_start);
    }
  }
  if (!r.done()) throw FormatError("trailing bytes after last tensor", r.position());
  return table;
}

void save_checkpoint(const std::filesystem::path& path, const ModelWeights& weights) {
  write_file(path, encode_checkpoint(weights));
}

ModelWeights load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path));
}

}  // namespace bsm
