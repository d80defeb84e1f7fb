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

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels.hpp"

namespace bsm::simd {

namespace {

Level probe_cpu() {
#if BSM_HAVE_AVX2
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Level::avx2;
#endif
  return Level::scalar;
}

Level clamp(Level wanted) {
  return (wanted == Level::avx2 && detected_level() != Level::avx2) ? Level::scalar : wanted;
}

Level initial_level() {
  if (const char* env = std::getenv("BSM_SIMD")) {
    const std::string value(env);
    if (value == "scalar") return Level::scalar;
    if (value == "avx2") return clamp(Level::avx2);
  }
  return detected_level();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&table(initial_level())};
  return slot;
}

}  // namespace

std::string_view level_name(Level level) {
  switch (level) {
    case Level::scalar: return "scalar";
    case Level::avx2: return "avx2";
  }
  return "unknown";
}

Level detected_level() {
  static const Level level = probe_cpu();
  return level;
}

Level active_level() { return active_table().level; }

Level set_level(Level level) {
  const Level applied = clamp(level);
  active_slot().store(&table(applied), std::memory_order_release);
  return applied;
}

const KernelTable& table(Level level) {
#if BSM_HAVE_AVX2
  if (level == Level::avx2) return detail::kAvx2Table;
#else
  (void)level;
#endif
  return detail::kScalarTable;
}

const KernelTable& active_table() { return *active_slot().load(std::memory_order_acquire); }

}  // namespace bsm::simd
