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

// Scan orders that flatten an H×W grid into a token sequence, and the
// spatial/channel attention merge of four directional results.

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bsm/params.hpp"
#include "bsm/tensor.hpp"

namespace bsm {

enum class ScanKind { horizontal, vertical, local_window, local_window_flipped };

struct ScanStrategy {
  ScanKind kind = ScanKind::horizontal;
  std::size_t window = 2;

  friend bool operator==(const ScanStrategy&, const ScanStrategy&) = default;
};

/// Parses "horizontal", "vertical", "local_window<k>", "local_window_flipped<k>"
/// and the short forms "H", "V", "<k>", "<k>F". Throws DomainError.
ScanStrategy parse_scan_strategy(std::string_view text);
std::string to_string(const ScanStrategy& s);

/// Bijection on [0, L): position i of the sequence reads pixel order()[i].
class Permutation {
 public:
  Permutation() = default;
  /// Throws DomainError unless `order` is a bijection.
  explicit Permutation(std::vector<std::size_t> order);

  static Permutation identity(std::size_t n);

  std::size_t size() const noexcept { return order_.size(); }
  std::size_t operator[](std::size_t i) const noexcept { return order_[i]; }
  const std::vector<std::size_t>& order() const noexcept { return order_; }

  Permutation inverse() const;
  /// Same pixels visited back to front.
  Permutation reversed() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> order_;
};

bool is_bijection(const std::vector<std::size_t>& order);

Permutation build_scan_order(std::size_t h, std::size_t w, const ScanStrategy& s);

/// [B,C,H,W] -> [B,L,C] with sequence position i taken from pixel p[i].
template <typename T>
Tensor<T> gather_sequence(const Tensor<T>& f, const Permutation& p);

/// Inverse of gather_sequence.
template <typename T>
Tensor<T> scatter_sequence(const Tensor<T>& seq, const Permutation& p, std::size_t h,
                           std::size_t w);

inline constexpr std::size_t kDirections = 4;
inline constexpr std::size_t kAttentionReduction = 4;

/// Weights for merging four C-channel directional maps.
template <typename T>
struct ScAttnWeights {
  Tensor<T> channel_fc1_w;  // [4C/r, 4C]
  Tensor<T> channel_fc1_b;  // [4C/r]
  Tensor<T> channel_fc2_w;  // [4C, 4C/r]
  Tensor<T> channel_fc2_b;  // [4C]
  Tensor<T> spatial_w;      // [1,1,3,3]
  Tensor<T> spatial_b;      // [1]
  Tensor<T> merge_w;        // [C,4C,1,1]
  Tensor<T> merge_b;        // [C]

  static ScAttnWeights zeros(std::size_t channels);

  template <typename Fn>
  void visit(const std::string& prefix, Fn&& fn);
};

/// Concatenate → channel attention → spatial attention → 1×1 merge to C channels.
template <typename T>
Tensor<T> scattn_merge(const std::array<Tensor<T>, kDirections>& dir_feats,
                       const ScAttnWeights<T>& w);

template <typename T>
ScAttnWeights<T> ScAttnWeights<T>::zeros(std::size_t channels) {
  const std::size_t wide = kDirections * channels;
  const std::size_t hidden = std::max<std::size_t>(wide / kAttentionReduction, 1);
  return {Tensor<T>({hidden, wide}), Tensor<T>({hidden}),      Tensor<T>({wide, hidden}),
          Tensor<T>({wide}),         Tensor<T>({1, 1, 3, 3}),  Tensor<T>({1}),
          Tensor<T>({channels, wide, 1, 1}), Tensor<T>({channels})};
}

template <typename T>
template <typename Fn>
void ScAttnWeights<T>::visit(const std::string& prefix, Fn&& fn) {
  fn(prefix + "channel_fc1.weight", channel_fc1_w, ParamKind::weight);
  fn(prefix + "channel_fc1.bias", channel_fc1_b, ParamKind::bias);
  fn(prefix + "channel_fc2.weight", channel_fc2_w, ParamKind::weight);
  fn(prefix + "channel_fc2.bias", channel_fc2_b, ParamKind::bias);
  fn(prefix + "spatial.weight", spatial_w, ParamKind::weight);
  fn(prefix + "spatial.bias", spatial_b, ParamKind::bias);
  fn(prefix + "merge.weight", merge_w, ParamKind::weight);
  fn(prefix + "merge.bias", merge_b, ParamKind::bias);
}

}  // namespace bsm
