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

#include "bsm/smb.hpp"

#include <algorithm>
#include <limits>

#include "bsm/ops.hpp"
#include "bsm/ssm.hpp"

namespace bsm {

Permutation direction_order(std::size_t h, std::size_t w, const ScanDirection& dir) {
  Permutation order = build_scan_order(h, w, dir.strategy);
  return dir.reversed ? order.reversed() : order;
}

DirectionSet default_directions_first(std::size_t window) {
  return {{{{ScanKind::horizontal, window}, false},
           {{ScanKind::vertical, window}, false},
           {{ScanKind::local_window, window}, false},
           {{ScanKind::local_window_flipped, window}, false}}};
}

DirectionSet default_directions_second(std::size_t window) {
  return {{{{ScanKind::horizontal, window}, true},
           {{ScanKind::vertical, window}, false},
           {{ScanKind::local_window, window}, false},
           {{ScanKind::local_window_flipped, window}, false}}};
}

DirectionSet fit_windows(const DirectionSet& dirs, std::size_t h, std::size_t w) {
  DirectionSet out = dirs;
  for (auto& dir : out) {
    std::size_t k = dir.strategy.window;
    while (k > 1 && (h % k != 0 || w % k != 0)) --k;
    dir.strategy.window = k;
  }
  return out;
}

void SmbConfig::validate() const {
  if (channels == 0 || expanded == 0 || state_dim == 0 || scan_block == 0) {
    throw DomainError("smb config: channels, expansion, state dim and scan block must be positive");
  }
  for (const auto& dir : directions) {
    if (dir.strategy.window == 0) throw DomainError("smb config: zero scan window");
  }
}

namespace {

template <typename T>
Tensor<T> scan_along(const Tensor<T>& v, const SsmHead<T>& head, const Tensor<T>& a,
                     const Permutation& order, std::size_t block) {
  Tensor<T> seq = gather_sequence(v, order);
  Tensor<T> delta = apply(Activation::softplus, linear(seq, head.delta_w, head.delta_b));
  // softplus can underflow to exactly zero for very negative pre-activations
  constexpr T kMinStep = std::numeric_limits<T>::min();
  for (T& dt : delta.data()) dt = std::max(dt, kMinStep);
  Tensor<T> b = linear(seq, head.b_w, Tensor<T>{});
  Tensor<T> c = linear(seq, head.c_w, Tensor<T>{});
  const ssm::ScanInputs<T> in{std::move(seq), std::move(delta), std::move(b), std::move(c), a};
  return ssm::selective_scan(in, block);
}

}  // namespace

template <typename T>
Tensor<T> direction_scan(const Tensor<T>& v, const SsmHead<T>& head, const Tensor<T>& a,
                         const ScanDirection& dir, std::size_t block) {
  require_rank(v, 4, "direction_scan");
  return scan_along(v, head, a, direction_order(v.dim(2), v.dim(3), dir), block);
}

template <typename T>
Tensor<T> smb_forward(const Tensor<T>& x, const SmbWeights<T>& w, const SmbConfig& cfg) {
  cfg.validate();
  require_rank(x, 4, "smb_forward");
  if (x.dim(1) != cfg.channels) {
    throw DimensionError("smb_forward: input " + shape_string(x.dims()) + " for a block of " +
                         std::to_string(cfg.channels) + " channels");
  }
  const std::size_t batch = x.dim(0);
  const std::size_t h = x.dim(2);
  const std::size_t wd = x.dim(3);
  const std::size_t e = cfg.expanded;
  const std::size_t len = h * wd;

  const Tensor<T> projected =
      linear(layer_norm(to_tokens(x), w.norm_in_gain, w.norm_in_offset), w.in_proj_w, w.in_proj_b);

  // split into the scan flow and the gate flow
  Tensor<T> scan_flow({batch, len, e});
  Tensor<T> gate_flow({batch, len, e});
  for (std::size_t row = 0; row < batch * len; ++row) {
    const T* src = projected.raw() + row * 2 * e;
    std::copy_n(src, e, scan_flow.raw() + row * e);
    std::copy_n(src + e, e, gate_flow.raw() + row * e);
  }

  const Tensor<T> v = silu(conv2d(from_tokens(scan_flow, h, wd), w.dw_w, w.dw_b,
                                  Conv2dParams{1, 1, e}));

  std::array<Tensor<T>, kDirections> directional;
  for (std::size_t k = 0; k < kDirections; ++k) {
    const Permutation order = direction_order(h, wd, cfg.directions[k]);
    directional[k] =
        scatter_sequence(scan_along(v, w.heads[k], w.a, order, cfg.scan_block), order, h, wd);
  }

  const Tensor<T> merged = multiply(to_tokens(scattn_merge(directional, w.attn)), silu(gate_flow));
  const Tensor<T> refined = layer_norm(linear(merged, w.out_proj_w, w.out_proj_b),
                                       w.norm_out_gain, w.norm_out_offset);

  Tensor<T> out = from_tokens(refined, h, wd);
  const T gate = w.gate[0];
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + gate * out[i];
  return ensure_finite(std::move(out), "smb_forward");
}

template <typename T>
Tensor<T> patch_embed(const Tensor<T>& image, const Tensor<T>& weight, const Tensor<T>& bias) {
  require_rank(image, 4, "patch_embed");
  if (image.dim(2) % kPatchSize != 0 || image.dim(3) % kPatchSize != 0) {
    throw DomainError("patch_embed: image " + shape_string(image.dims()) +
                      " is not divisible into 4x4 patches");
  }
  require_rank(weight, 4, "patch_embed weight");
  if (weight.dim(2) != kPatchSize || weight.dim(3) != kPatchSize) {
    throw DimensionError("patch_embed: weight " + shape_string(weight.dims()) +
                         " is not a 4x4 patch projection");
  }
  return conv2d(image, weight, bias, Conv2dParams{kPatchSize, 0, 1});
}

template <typename T>
Tensor<T> patch_merge(const Tensor<T>& f, const Tensor<T>& weight, const Tensor<T>& bias) {
  require_rank(f, 4, "patch_merge");
  const std::size_t batch = f.dim(0);
  const std::size_t ch = f.dim(1);
  const std::size_t h = f.dim(2);
  const std::size_t w = f.dim(3);
  if (h % 2 != 0 || w % 2 != 0) {
    throw DomainError("patch_merge: odd spatial extent in " + shape_string(f.dims()));
  }
  const std::size_t oh = h / 2;
  const std::size_t ow = w / 2;
  Tensor<T> grouped({batch, oh * ow, 4 * ch});
  constexpr std::size_t kOffsets[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};  // (dy, dx)
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        T* dst = grouped.raw() + ((b * oh + y) * ow + x) * 4 * ch;
        for (std::size_t q = 0; q < 4; ++q) {
          const std::size_t sy = 2 * y + kOffsets[q][0];
          const std::size_t sx = 2 * x + kOffsets[q][1];
          for (std::size_t c = 0; c < ch; ++c) {
            dst[q * ch + c] = f[((b * ch + c) * h + sy) * w + sx];
          }
        }
      }
    }
  }
  return from_tokens(linear(grouped, weight, bias), oh, ow);
}

#define BSM_INSTANTIATE_SMB(T)                                                                \
  template Tensor<T> direction_scan(const Tensor<T>&, const SsmHead<T>&, const Tensor<T>&,    \
                                    const ScanDirection&, std::size_t);                       \
  template Tensor<T> smb_forward(const Tensor<T>&, const SmbWeights<T>&, const SmbConfig&);   \
  template Tensor<T> patch_embed(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);       \
  template Tensor<T> patch_merge(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);

BSM_INSTANTIATE_SMB(float)
BSM_INSTANTIATE_SMB(double)

}  // namespace bsm
