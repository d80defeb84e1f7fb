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

// Runtime-selected inner-loop kernels. Every kernel has a portable scalar
// reference; the AVX2/FMA variant is picked at startup when the CPU has it.
// Double precision always runs the scalar reference.

#include <cstddef>
#include <string_view>
#include <type_traits>

namespace bsm::simd {

enum class Level { scalar, avx2 };

std::string_view level_name(Level level);

/// Best level this CPU and build support.
Level detected_level();

/// Level currently used by dispatch. Initialized from BSM_SIMD (scalar|avx2)
/// when set, otherwise from detected_level().
Level active_level();

/// Forces dispatch to `level`, clamped to what the CPU supports. Returns the level applied.
Level set_level(Level level);

struct KernelTable {
  Level level;
  // sum_i a[i] * b[i]
  float (*dot)(const float* a, const float* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(float alpha, const float* x, float* y, std::size_t n);
  // h[i] = abar[i] * h[i] + bbar[i] * x
  void (*state_update)(const float* abar, const float* bbar, float x, float* h, std::size_t n);
  // p[i] *= a[i]
  void (*mul_inplace)(const float* a, float* p, std::size_t n);
  // h[i] = p[i] * carry[i] + u[i]
  void (*carry_apply)(const float* p, const float* carry, const float* u, float* h,
                      std::size_t n);
};

const KernelTable& table(Level level);
const KernelTable& active_table();

namespace scalar {

template <typename T>
T dot(const T* a, const T* b, std::size_t n) {
  T acc{0};
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

template <typename T>
void axpy(T alpha, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void state_update(const T* abar, const T* bbar, T x, T* h, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) h[i] = abar[i] * h[i] + bbar[i] * x;
}

template <typename T>
void mul_inplace(const T* a, T* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) p[i] *= a[i];
}

template <typename T>
void carry_apply(const T* p, const T* carry, const T* u, T* h, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) h[i] = p[i] * carry[i] + u[i];
}

}  // namespace scalar

// Typed front doors used by the numeric modules.

template <typename T>
T dot(const T* a, const T* b, std::size_t n) {
  if constexpr (std::is_same_v<T, float>) {
    return active_table().dot(a, b, n);
  } else {
    return scalar::dot(a, b, n);
  }
}

template <typename T>
void axpy(T alpha, const T* x, T* y, std::size_t n) {
  if constexpr (std::is_same_v<T, float>) {
    active_table().axpy(alpha, x, y, n);
  } else {
    scalar::axpy(alpha, x, y, n);
  }
}

template <typename T>
void state_update(const T* abar, const T* bbar, T x, T* h, std::size_t n) {
  if constexpr (std::is_same_v<T, float>) {
    active_table().state_update(abar, bbar, x, h, n);
  } else {
    scalar::state_update(abar, bbar, x, h, n);
  }
}

template <typename T>
void mul_inplace(const T* a, T* p, std::size_t n) {
  if constexpr (std::is_same_v<T, float>) {
    active_table().mul_inplace(a, p, n);
  } else {
    scalar::mul_inplace(a, p, n);
  }
}

template <typename T>
void carry_apply(const T* p, const T* carry, const T* u, T* h, std::size_t n) {
  if constexpr (std::is_same_v<T, float>) {
    active_table().carry_apply(p, carry, u, h, n);
  } else {
    scalar::carry_apply(p, carry, u, h, n);
  }
}

}  // namespace bsm::simd
