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

// Checkpoint layout, little-endian:
//   "BSMB"  u32 version (=1)  u32 tensor count
//   per tensor: u32 name length, UTF-8 name, u32 rank, u64 dims[rank], f32 data[volume]

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "bsm/model.hpp"

namespace bsm {

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const ModelWeights& weights);
ModelWeights decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const ModelWeights& weights);
ModelWeights load_checkpoint(const std::filesystem::path& path);

}  // namespace bsm
