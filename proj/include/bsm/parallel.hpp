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

#include <cstddef>
#include <functional>

namespace bsm {

/// Worker count used by parallel_for. Defaults to 1.
std::size_t num_threads();
void set_num_threads(std::size_t n);

/// Runs fn(i) for i in [0, count). Iterations must write disjoint outputs;
/// results then do not depend on the worker count. Calls made from inside
/// another parallel_for run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace bsm
