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

// Selective state-space scan with diagonal per-channel state transitions.
//
//   abar = exp(delta * a)
//   bbar = (exp(delta * a) - 1) / a * b          (zero-order hold)
//   h_l  = abar_l * h_{l-1} + bbar_l * x_l,  h_0 = 0
//   y_l  = sum_n c_l[n] * h_l[n]
//
// Shapes: x, delta [B,L,D]; b, c [B,L,N]; a [D,N]; abar, bbar [B,L,D,N].

#include <cstddef>
#include <utility>

#include "bsm/tensor.hpp"

namespace bsm::ssm {

template <typename T>
struct ScanInputs {
  Tensor<T> x;
  Tensor<T> delta;  // strictly positive
  Tensor<T> b;
  Tensor<T> c;
  Tensor<T> a;  // strictly negative

  std::size_t batch() const { return x.dim(0); }
  std::size_t length() const { return x.dim(1); }
  std::size_t channels() const { return x.dim(2); }
  std::size_t state_dim() const { return a.dim(1); }
};

/// Checks shapes and the sign constraints on delta and a.
template <typename T>
void validate(const ScanInputs<T>& in);

template <typename T>
struct DiscretizedStep {
  Tensor<T> abar;
  Tensor<T> bbar;
};

/// Below this |delta·a| the hold factor switches to its Taylor form.
inline constexpr double kTaylorThreshold = 1e-6;

/// Hold factor (exp(delta·a) - 1) / a for scalars, Taylor-guarded near zero.
/// Defined for delta = 0 as the limit value 0.
template <typename T>
T hold_factor(T delta, T a);

/// (abar, bbar / b) for one (delta, a) pair.
template <typename T>
std::pair<T, T> zoh_coefficients(T delta, T a);

template <typename T>
DiscretizedStep<T> discretize(const ScanInputs<T>& in);

/// Reference recurrence, one step at a time.
template <typename T>
Tensor<T> scan_sequential(const DiscretizedStep<T>& step, const Tensor<T>& x, const Tensor<T>& c);

/// Every hidden state h_l, shape [B,L,D,N].
template <typename T>
Tensor<T> scan_states(const DiscretizedStep<T>& step, const Tensor<T>& x);

inline constexpr std::size_t kMaterializedMaxLength = 64;

/// O(L²) oracle: builds the lower-triangular operator M[l,k] = c_l·(∏_{j=k+1..l} abar_j)·bbar_k
/// per (batch, channel) and applies it to x. Refuses L > max_length.
template <typename T>
Tensor<T> scan_materialized(const DiscretizedStep<T>& step, const Tensor<T>& x,
                            const Tensor<T>& c,
                            std::size_t max_length = kMaterializedMaxLength);

/// The operator itself for one (batch, channel) lane, shape [L,L].
template <typename T>
Tensor<T> materialized_operator(const DiscretizedStep<T>& step, const Tensor<T>& c,
                                std::size_t batch, std::size_t channel,
                                std::size_t max_length = kMaterializedMaxLength);

/// Element of the first-order linear recurrence monoid: h -> a·h + u.
template <typename T>
struct ScanElement {
  T a;
  T u;
};

/// (a1,u1)∘(a2,u2) = (a2·a1, a2·u1 + u2): apply the left element first.
template <typename T>
constexpr ScanElement<T> combine(ScanElement<T> first, ScanElement<T> second) {
  return {second.a * first.a, second.a * first.u + second.u};
}

/// Blocked scan: each block is reduced from the identity independently, block
/// carries are stitched left to right, then applied back inside each block.
/// block >= L reproduces scan_sequential bit for bit.
template <typename T>
Tensor<T> scan_blocked(const DiscretizedStep<T>& step, const Tensor<T>& x, const Tensor<T>& c,
                       std::size_t block);

/// discretize + scan_blocked.
template <typename T>
Tensor<T> selective_scan(const ScanInputs<T>& in, std::size_t block);

template <typename T>
struct ScanGradients {
  Tensor<T> x;
  Tensor<T> delta;
  Tensor<T> b;
  Tensor<T> c;
  Tensor<T> a;
};

/// Reverse-mode gradients of sum(grad_y ⊙ y) through discretize and the scan.
template <typename T>
ScanGradients<T> scan_backward(const ScanInputs<T>& in, const Tensor<T>& grad_y);

}  // namespace bsm::ssm
