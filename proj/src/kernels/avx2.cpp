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

// Compiled with -mavx2 -mfma. Only reached through the dispatch table after
// a runtime CPU check, so nothing here may be called on older hardware.

#include <immintrin.h>

#include <cmath>

#include "kernels.hpp"

namespace bsm::simd::detail {

namespace {

inline float hsum(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  __m128 shuf = _mm_movehdup_ps(lo);
  __m128 sums = _mm_add_ps(lo, shuf);
  shuf = _mm_movehl_ps(shuf, sums);
  sums = _mm_add_ss(sums, shuf);
  return _mm_cvtss_f32(sums);
}

float dot_f32(const float* a, const float* b, std::size_t n) {
  __m256 acc0 = _mm256_setzero_ps();
  __m256 acc1 = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
  }
  if (i + 8 <= n) {
    acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    i += 8;
  }
  float acc = hsum(_mm256_add_ps(acc0, acc1));
  for (; i < n; ++i) acc = std::fma(a[i], b[i], acc);
  return acc;
}

void axpy_f32(float alpha, const float* x, float* y, std::size_t n) {
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void state_update_f32(const float* abar, const float* bbar, float x, float* h, std::size_t n) {
  const __m256 vx = _mm256_set1_ps(x);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 drive = _mm256_mul_ps(_mm256_loadu_ps(bbar + i), vx);
    _mm256_storeu_ps(h + i, _mm256_fmadd_ps(_mm256_loadu_ps(abar + i), _mm256_loadu_ps(h + i), drive));
  }
  for (; i < n; ++i) h[i] = std::fma(abar[i], h[i], bbar[i] * x);
}

void mul_inplace_f32(const float* a, float* p, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(p + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(p + i)));
  }
  for (; i < n; ++i) p[i] *= a[i];
}

void carry_apply_f32(const float* p, const float* carry, const float* u, float* h,
                     std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_ps(h + i, _mm256_fmadd_ps(_mm256_loadu_ps(p + i), _mm256_loadu_ps(carry + i),
                                            _mm256_loadu_ps(u + i)));
  }
  for (; i < n; ++i) h[i] = std::fma(p[i], carry[i], u[i]);
}

}  // namespace

const KernelTable kAvx2Table{Level::avx2, dot_f32,         axpy_f32,
                             state_update_f32, mul_inplace_f32, carry_apply_f32};

}  // namespace bsm::simd::detail
