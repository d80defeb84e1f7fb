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

// Spatial Mamba block and the token stem of the Mamba branch.
//
//   t  = LN(tokens(x))
//   [u | g] = Linear(t)                     C -> 2E
//   v  = SiLU(DWConv3x3(u))
//   y_k = scatter(SSM_k(gather_k(v)))       one per scan direction
//   m  = SCAttn(y_1..y_4) * SiLU(g)
//   out = x + gate * LN(Linear(m))          E -> C

#include <array>
#include <cstddef>
#include <string>

#include "bsm/local_scan.hpp"
#include "bsm/params.hpp"
#include "bsm/tensor.hpp"

namespace bsm {

/// One scan direction: a strategy, optionally walked back to front.
struct ScanDirection {
  ScanStrategy strategy;
  bool reversed = false;

  friend bool operator==(const ScanDirection&, const ScanDirection&) = default;
};

Permutation direction_order(std::size_t h, std::size_t w, const ScanDirection& dir);

using DirectionSet = std::array<ScanDirection, kDirections>;

/// {H, V, window, flipped window}
DirectionSet default_directions_first(std::size_t window);
/// {H reversed, V, window, flipped window}
DirectionSet default_directions_second(std::size_t window);

/// Shrinks each local window to the largest size <= its own that divides both
/// h and w. Deep stages of inputs that are multiples of 32 but not of 64 have
/// odd grids; there a window-2 scan falls back to window 1 (row-major order).
DirectionSet fit_windows(const DirectionSet& dirs, std::size_t h, std::size_t w);

struct SmbConfig {
  DirectionSet directions;
  std::size_t channels = 16;
  std::size_t expanded = 32;
  std::size_t state_dim = 16;
  std::size_t scan_block = 64;

  void validate() const;
};

template <typename T>
struct SsmHead {
  Tensor<T> delta_w;  // [E,E]
  Tensor<T> delta_b;  // [E], passed through softplus
  Tensor<T> b_w;      // [N,E]
  Tensor<T> c_w;      // [N,E]
};

template <typename T>
struct SmbWeights {
  Tensor<T> norm_in_gain, norm_in_offset;  // [C]
  Tensor<T> in_proj_w, in_proj_b;          // [2E,C], [2E]
  Tensor<T> dw_w, dw_b;                    // [E,1,3,3], [E]
  std::array<SsmHead<T>, kDirections> heads;
  Tensor<T> a;                             // [E,N], shared by the four directions
  ScAttnWeights<T> attn;                   // over E channels
  Tensor<T> out_proj_w, out_proj_b;        // [C,E], [C]
  Tensor<T> norm_out_gain, norm_out_offset;
  Tensor<T> gate;                          // [1]

  static SmbWeights zeros(const SmbConfig& cfg);

  template <typename Fn>
  void visit(const std::string& prefix, Fn&& fn);
};

/// SSM output of one direction in sequence order, [B,L,E]. `v` is the
/// post-activation feature map [B,E,H,W].
template <typename T>
Tensor<T> direction_scan(const Tensor<T>& v, const SsmHead<T>& head, const Tensor<T>& a,
                         const ScanDirection& dir, std::size_t block);

template <typename T>
Tensor<T> smb_forward(const Tensor<T>& x, const SmbWeights<T>& w, const SmbConfig& cfg);

inline constexpr std::size_t kPatchSize = 4;

/// Non-overlapping 4×4 patches projected to C channels. weight [C,3,4,4], bias [C].
template <typename T>
Tensor<T> patch_embed(const Tensor<T>& image, const Tensor<T>& weight, const Tensor<T>& bias);

/// 2×2 neighbourhoods concatenated (top-left, bottom-left, top-right, bottom-right)
/// to 4C channels, then projected by weight [Cout,4C] and bias [Cout].
template <typename T>
Tensor<T> patch_merge(const Tensor<T>& f, const Tensor<T>& weight, const Tensor<T>& bias);

template <typename T>
SmbWeights<T> SmbWeights<T>::zeros(const SmbConfig& cfg) {
  const std::size_t c = cfg.channels;
  const std::size_t e = cfg.expanded;
  const std::size_t n = cfg.state_dim;
  SmbWeights w;
  w.norm_in_gain = Tensor<T>({c}, T{1});
  w.norm_in_offset = Tensor<T>({c});
  w.in_proj_w = Tensor<T>({2 * e, c});
  w.in_proj_b = Tensor<T>({2 * e});
  w.dw_w = Tensor<T>({e, 1, 3, 3});
  w.dw_b = Tensor<T>({e});
  for (auto& head : w.heads) {
    head = {Tensor<T>({e, e}), Tensor<T>({e}), Tensor<T>({n, e}), Tensor<T>({n, e})};
  }
  w.a = Tensor<T>({e, n}, T{-1});
  w.attn = ScAttnWeights<T>::zeros(e);
  w.out_proj_w = Tensor<T>({c, e});
  w.out_proj_b = Tensor<T>({c});
  w.norm_out_gain = Tensor<T>({c}, T{1});
  w.norm_out_offset = Tensor<T>({c});
  w.gate = Tensor<T>({1});
  return w;
}

template <typename T>
template <typename Fn>
void SmbWeights<T>::visit(const std::string& prefix, Fn&& fn) {
  fn(prefix + "norm_in.gain", norm_in_gain, ParamKind::norm_gain);
  fn(prefix + "norm_in.offset", norm_in_offset, ParamKind::norm_offset);
  fn(prefix + "in_proj.weight", in_proj_w, ParamKind::weight);
  fn(prefix + "in_proj.bias", in_proj_b, ParamKind::bias);
  fn(prefix + "dwconv.weight", dw_w, ParamKind::weight);
  fn(prefix + "dwconv.bias", dw_b, ParamKind::bias);
  for (std::size_t k = 0; k < heads.size(); ++k) {
    const std::string p = prefix + "ssm" + std::to_string(k) + ".";
    fn(p + "delta.weight", heads[k].delta_w, ParamKind::weight);
    fn(p + "delta.bias", heads[k].delta_b, ParamKind::delta_bias);
    fn(p + "b_proj.weight", heads[k].b_w, ParamKind::weight);
    fn(p + "c_proj.weight", heads[k].c_w, ParamKind::weight);
  }
  fn(prefix + "a", a, ParamKind::ssm_a);
  attn.visit(prefix + "scattn.", fn);
  fn(prefix + "out_proj.weight", out_proj_w, ParamKind::weight);
  fn(prefix + "out_proj.bias", out_proj_b, ParamKind::bias);
  fn(prefix + "norm_out.gain", norm_out_gain, ParamKind::norm_gain);
  fn(prefix + "norm_out.offset", norm_out_offset, ParamKind::norm_offset);
  fn(prefix + "gate", gate, ParamKind::residual_gate);
}

}  // namespace bsm
