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

#include "kernels.hpp"

namespace bsm::simd::detail {

namespace {

float dot_f32(const float* a, const float* b, std::size_t n) { return scalar::dot(a, b, n); }

void axpy_f32(float alpha, const float* x, float* y, std::size_t n) {
  scalar::axpy(alpha, x, y, n);
}

void state_update_f32(const float* abar, const float* bbar, float x, float* h, std::size_t n) {
  scalar::state_update(abar, bbar, x, h, n);
}

void mul_inplace_f32(const float* a, float* p, std::size_t n) { scalar::mul_inplace(a, p, n); }

void carry_apply_f32(const float* p, const float* carry, const float* u, float* h,
                     std::size_t n) {
  scalar::carry_apply(p, carry, u, h, n);
}

}  // namespace

const KernelTable kScalarTable{Level::scalar, dot_f32,         axpy_f32,
                               state_update_f32, mul_inplace_f32, carry_apply_f32};

}  // namespace bsm::simd::detail
