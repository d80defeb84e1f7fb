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

#include "bsm/local_scan.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "bsm/ops.hpp"

namespace bsm {

namespace {

std::size_t parse_window(std::string_view digits, std::string_view whole) {
  std::size_t value = 0;
  const auto* end = digits.data() + digits.size();
  const auto [ptr, ec] = std::from_chars(digits.data(), end, value);
  if (digits.empty() || ec != std::errc() || ptr != end || value == 0) {
    throw DomainError("unknown scan strategy '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

ScanStrategy parse_scan_strategy(std::string_view text) {
  if (text == "horizontal" || text == "H" || text == "h") return {ScanKind::horizontal, 2};
  if (text == "vertical" || text == "V" || text == "v") return {ScanKind::vertical, 2};

  constexpr std::string_view kFlipped = "local_window_flipped";
  constexpr std::string_view kLocal = "local_window";
  if (text.starts_with(kFlipped)) {
    return {ScanKind::local_window_flipped, parse_window(text.substr(kFlipped.size()), text)};
  }
  if (text.starts_with(kLocal)) {
    return {ScanKind::local_window, parse_window(text.substr(kLocal.size()), text)};
  }
  if (!text.empty() && (text.back() == 'F' || text.back() == 'f')) {
    return {ScanKind::local_window_flipped, parse_window(text.substr(0, text.size() - 1), text)};
  }
  return {ScanKind::local_window, parse_window(text, text)};
}

std::string to_string(const ScanStrategy& s) {
  switch (s.kind) {
    case ScanKind::horizontal: return "horizontal";
    case ScanKind::vertical: return "vertical";
    case ScanKind::local_window: return "local_window" + std::to_string(s.window);
    case ScanKind::local_window_flipped: return "local_window_flipped" + std::to_string(s.window);
  }
  return "unknown";
}

bool is_bijection(const std::vector<std::size_t>& order) {
  std::vector<bool> seen(order.size(), false);
  for (std::size_t v : order) {
    if (v >= order.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

Permutation::Permutation(std::vector<std::size_t> order) : order_(std::move(order)) {
  if (!is_bijection(order_)) throw DomainError("permutation: order is not a bijection");
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return Permutation(std::move(order));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) inv[order_[i]] = i;
  return Permutation(std::move(inv));
}

Permutation Permutation::reversed() const {
  return Permutation(std::vector<std::size_t>(order_.rbegin(), order_.rend()));
}

Permutation build_scan_order(std::size_t h, std::size_t w, const ScanStrategy& s) {
  if (h == 0 || w == 0) throw DomainError("build_scan_order: empty grid");
  std::vector<std::size_t> order;
  order.reserve(h * w);

  switch (s.kind) {
    case ScanKind::horizontal:
      for (std::size_t i = 0; i < h * w; ++i) order.push_back(i);
      break;
    case ScanKind::vertical:
      for (std::size_t x = 0; x < w; ++x) {
        for (std::size_t y = 0; y < h; ++y) order.push_back(y * w + x);
      }
      break;
    case ScanKind::local_window:
    case ScanKind::local_window_flipped: {
      const std::size_t k = s.window;
      if (k == 0 || h % k != 0 || w % k != 0) {
        throw DomainError("build_scan_order: window " + std::to_string(k) +
                          " does not divide " + std::to_string(h) + "x" + std::to_string(w));
      }
      const bool flipped = s.kind == ScanKind::local_window_flipped;
      for (std::size_t wy = 0; wy < h / k; ++wy) {
        for (std::size_t wx = 0; wx < w / k; ++wx) {
          for (std::size_t i = 0; i < k * k; ++i) {
            const std::size_t j = flipped ? k * k - 1 - i : i;
            order.push_back((wy * k + j / k) * w + wx * k + j % k);
          }
        }
      }
      break;
    }
  }
  return Permutation(std::move(order));
}

template <typename T>
Tensor<T> gather_sequence(const Tensor<T>& f, const Permutation& p) {
  require_rank(f, 4, "gather_sequence");
  const std::size_t batch = f.dim(0);
  const std::size_t ch = f.dim(1);
  const std::size_t plane = f.dim(2) * f.dim(3);
  if (p.size() != plane) {
    throw DimensionError("gather_sequence: permutation of length " + std::to_string(p.size()) +
                         " for " + std::to_string(plane) + " pixels");
  }
  Tensor<T> seq({batch, plane, ch});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < ch; ++c) {
      const T* src = f.raw() + (b * ch + c) * plane;
      T* dst = seq.raw() + b * plane * ch + c;
      for (std::size_t i = 0; i < plane; ++i) dst[i * ch] = src[p[i]];
    }
  }
  return seq;
}

template <typename T>
Tensor<T> scatter_sequence(const Tensor<T>& seq, const Permutation& p, std::size_t h,
                           std::size_t w) {
  require_rank(seq, 3, "scatter_sequence");
  const std::size_t batch = seq.dim(0);
  const std::size_t ch = seq.dim(2);
  const std::size_t plane = h * w;
  if (seq.dim(1) != plane || p.size() != plane) {
    throw DimensionError("scatter_sequence: sequence " + shape_string(seq.dims()) +
                         " and permutation of length " + std::to_string(p.size()) +
                         " do not fit a " + std::to_string(h) + "x" + std::to_string(w) +
                         " grid");
  }
  Tensor<T> f({batch, ch, h, w});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < ch; ++c) {
      const T* src = seq.raw() + b * plane * ch + c;
      T* dst = f.raw() + (b * ch + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) dst[p[i]] = src[i * ch];
    }
  }
  return f;
}

template <typename T>
Tensor<T> scattn_merge(const std::array<Tensor<T>, kDirections>& dir_feats,
                       const ScAttnWeights<T>& w) {
  for (const auto& t : dir_feats) {
    require_rank(t, 4, "scattn_merge");
    if (t.dims() != dir_feats[0].dims()) {
      throw DimensionError("scattn_merge: direction shapes differ, " +
                           shape_string(dir_feats[0].dims()) + " vs " + shape_string(t.dims()));
    }
  }
  Tensor<T> stacked = dir_feats[0];
  for (std::size_t k = 1; k < kDirections; ++k) stacked = concat_channels(stacked, dir_feats[k]);

  // channel attention
  const Tensor<T> squeezed = global_avg_pool(stacked);
  const Tensor<T> hidden = relu(linear(squeezed, w.channel_fc1_w, w.channel_fc1_b));
  const Tensor<T> channel_weights = sigmoid(linear(hidden, w.channel_fc2_w, w.channel_fc2_b));
  stacked = scale_channels(stacked, channel_weights);

  // spatial attention
  const Tensor<T> pooled = channel_mean(stacked);
  const Tensor<T> spatial =
      sigmoid(conv2d(pooled, w.spatial_w, w.spatial_b, Conv2dParams{1, 1, 1}));
  stacked = scale_pixels(stacked, spatial);

  return conv2d(stacked, w.merge_w, w.merge_b);
}

#define BSM_INSTANTIATE_LOCAL_SCAN(T)                                                          \
  template Tensor<T> gather_sequence(const Tensor<T>&, const Permutation&);                    \
  template Tensor<T> scatter_sequence(const Tensor<T>&, const Permutation&, std::size_t,       \
                                      std::size_t);                                            \
  template Tensor<T> scattn_merge(const std::array<Tensor<T>, kDirections>&,                   \
                                  const ScAttnWeights<T>&);

BSM_INSTANTIATE_LOCAL_SCAN(float)
BSM_INSTANTIATE_LOCAL_SCAN(double)

}  // namespace bsm
