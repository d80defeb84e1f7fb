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

#include <array>
#include <cstddef>

#include "bsm/smb.hpp"

namespace bsm {

inline constexpr std::size_t kStages = 4;
inline constexpr std::size_t kBlocksPerStage = 2;
inline constexpr std::size_t kClasses = 2;

using StageDirections = std::array<std::array<DirectionSet, kBlocksPerStage>, kStages>;

StageDirections default_stage_directions(std::size_t window);

/// Widths and scan settings of the two-branch network. Stage i (0-based) has
/// base_channels·2^i channels in both branches.
struct ModelConfig {
  std::size_t base_channels = 16;
  std::size_t expansion = 2;
  std::size_t state_dim = 16;
  std::size_t window = 2;
  std::size_t scan_block = 64;
  std::size_t in_channels = 3;
  StageDirections directions = default_stage_directions(2);

  std::size_t stage_channels(std::size_t stage) const { return base_channels << stage; }
  SmbConfig smb_config(std::size_t stage, std::size_t block) const;

  /// Input height and width must be multiples of this.
  static constexpr std::size_t kInputMultiple = 32;

  void validate() const;
};

}  // namespace bsm
