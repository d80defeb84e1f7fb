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

// Parameter roles, used by weight initialization and checkpoint naming.
// Each weight struct exposes visit(prefix, fn) calling fn(name, tensor, kind)
// for every learnable array in a fixed order.

namespace bsm {

enum class ParamKind {
  weight,         // linear [out,in] or conv [out,in,kh,kw]
  bias,
  norm_gain,
  norm_offset,
  ssm_a,          // [E,N], strictly negative
  delta_bias,     // softplus pre-activation for the step size
  residual_gate,  // scalar gate on a residual branch
  bn_scale,
  bn_shift,
};

}  // namespace bsm
