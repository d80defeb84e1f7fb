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

// Two-branch encoder. The convolutional branch runs at 1/2..1/16 of the
// input, the Mamba branch at 1/4..1/32; each Mamba stage output is upsampled
// ×2 to meet its convolutional partner before element-wise fusion.

#include <array>
#include <cstddef>
#include <string>

#include "bsm/model_config.hpp"
#include "bsm/params.hpp"
#include "bsm/smb.hpp"
#include "bsm/tensor.hpp"

namespace bsm {

template <typename T>
struct ConvStageWeights {
  Tensor<T> conv1_w, conv1_b;  // [C,Cin,3,3], [C]
  Tensor<T> conv2_w, conv2_b;  // [C,C,3,3], [C]

  template <typename Fn>
  void visit(const std::string& prefix, Fn&& fn) {
    fn(prefix + "conv1.weight", conv1_w, ParamKind::weight);
    fn(prefix + "conv1.bias", conv1_b, ParamKind::bias);
    fn(prefix + "conv2.weight", conv2_w, ParamKind::weight);
    fn(prefix + "conv2.bias", conv2_b, ParamKind::bias);
  }
};

/// conv3×3+ReLU, conv3×3+ReLU (same padding), then 2×2 stride-2 average pooling.
template <typename T>
Tensor<T> conv_stage(const Tensor<T>& f, const ConvStageWeights<T>& w);

template <typename T>
struct MambaStageWeights {
  // stage 0: patch embedding [C,3,4,4]; later stages: patch merging [C,4·Cprev]
  Tensor<T> down_w, down_b;
  std::array<SmbWeights<T>, kBlocksPerStage> blocks;

  template <typename Fn>
  void visit(const std::string& prefix, Fn&& fn) {
    fn(prefix + "down.weight", down_w, ParamKind::weight);
    fn(prefix + "down.bias", down_b, ParamKind::bias);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      blocks[k].visit(prefix + "smb" + std::to_string(k) + ".", fn);
    }
  }
};

/// Downsample (patch embed on stage 0, patch merge after) then two SMBs.
template <typename T>
Tensor<T> mamba_stage(const Tensor<T>& f, const MambaStageWeights<T>& w, std::size_t stage,
                      const ModelConfig& cfg);

template <typename T>
struct EnhanceWeights {
  Tensor<T> conv_w, conv_b;      // [C,C,3,3], [C]
  Tensor<T> se_fc1_w, se_fc1_b;  // [C/4,C], [C/4]
  Tensor<T> se_fc2_w, se_fc2_b;  // [C,C/4], [C]

  template <typename Fn>
  void visit(const std::string& prefix, Fn&& fn) {
    fn(prefix + "conv.weight", conv_w, ParamKind::weight);
    fn(prefix + "conv.bias", conv_b, ParamKind::bias);
    fn(prefix + "se_fc1.weight", se_fc1_w, ParamKind::weight);
    fn(prefix + "se_fc1.bias", se_fc1_b, ParamKind::bias);
    fn(prefix + "se_fc2.weight", se_fc2_w, ParamKind::weight);
    fn(prefix + "se_fc2.bias", se_fc2_b, ParamKind::bias);
  }
};

template <typename T>
struct StageFeatures {
  Tensor<T> f_conv;
  Tensor<T> f_ssm;
  Tensor<T> f_fused;
  std::size_t scale_denominator = 1;  // features live at 1/scale_denominator of the input
};

/// Squeeze-excitation weights in (0,1): GAP → linear → ReLU → linear → sigmoid. [B,C].
template <typename T>
Tensor<T> channel_attention_weights(const Tensor<T>& f, const EnhanceWeights<T>& w);

/// Upsamples the Mamba feature to the conv feature's grid, enhances both and adds them.
template <typename T>
StageFeatures<T> align_and_enhance(const Tensor<T>& f_ssm_raw, const Tensor<T>& f_conv_raw,
                                   const EnhanceWeights<T>& w);

template <typename T>
struct EncoderWeights {
  std::array<ConvStageWeights<T>, kStages> conv;
  std::array<MambaStageWeights<T>, kStages> mamba;
  std::array<EnhanceWeights<T>, kStages> enhance;

  template <typename Fn>
  void visit(const std::string& prefix, Fn&& fn) {
    for (std::size_t i = 0; i < kStages; ++i) {
      const std::string s = std::to_string(i + 1);
      conv[i].visit(prefix + "conv" + s + ".", fn);
      mamba[i].visit(prefix + "mamba" + s + ".", fn);
      enhance[i].visit(prefix + "enhance" + s + ".", fn);
    }
  }
};

template <typename T>
struct EncoderOutput {
  std::array<Tensor<T>, kStages> conv_raw;
  std::array<Tensor<T>, kStages> mamba_raw;
  std::array<StageFeatures<T>, kStages> stages;
};

template <typename T>
std::array<Tensor<T>, kStages> conv_branch(const Tensor<T>& image, const EncoderWeights<T>& w);

template <typename T>
std::array<Tensor<T>, kStages> mamba_branch(const Tensor<T>& image, const EncoderWeights<T>& w,
                                            const ModelConfig& cfg);

template <typename T>
EncoderOutput<T> encode(const Tensor<T>& image, const EncoderWeights<T>& w,
                        const ModelConfig& cfg);

}  // namespace bsm
