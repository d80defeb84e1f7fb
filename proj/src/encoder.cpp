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

#include "bsm/encoder.hpp"

#include "bsm/ops.hpp"

namespace bsm {

StageDirections default_stage_directions(std::size_t window) {
  StageDirections dirs;
  for (auto& stage : dirs) {
    stage[0] = default_directions_first(window);
    stage[1] = default_directions_second(window);
  }
  return dirs;
}

SmbConfig ModelConfig::smb_config(std::size_t stage, std::size_t block) const {
  SmbConfig cfg;
  cfg.directions = directions.at(stage).at(block);
  cfg.channels = stage_channels(stage);
  cfg.expanded = expansion * cfg.channels;
  cfg.state_dim = state_dim;
  cfg.scan_block = scan_block;
  return cfg;
}

void ModelConfig::validate() const {
  if (base_channels == 0 || expansion == 0 || state_dim == 0 || window == 0 || scan_block == 0 ||
      in_channels == 0) {
    throw DomainError("model config: every width and size must be positive");
  }
  for (std::size_t s = 0; s < kStages; ++s) {
    for (std::size_t b = 0; b < kBlocksPerStage; ++b) smb_config(s, b).validate();
  }
}

template <typename T>
Tensor<T> conv_stage(const Tensor<T>& f, const ConvStageWeights<T>& w) {
  require_rank(f, 4, "conv_stage");
  if (f.dim(2) % 2 != 0 || f.dim(3) % 2 != 0) {
    throw DomainError("conv_stage: odd spatial extent in " + shape_string(f.dims()));
  }
  const Conv2dParams same{1, 1, 1};
  Tensor<T> x = relu(conv2d(f, w.conv1_w, w.conv1_b, same));
  x = relu(conv2d(x, w.conv2_w, w.conv2_b, same));
  return avg_pool2d(x, 2, 2);
}

template <typename T>
Tensor<T> mamba_stage(const Tensor<T>& f, const MambaStageWeights<T>& w, std::size_t stage,
                      const ModelConfig& cfg) {
  Tensor<T> x = stage == 0 ? patch_embed(f, w.down_w, w.down_b) : patch_merge(f, w.down_w, w.down_b);
  for (std::size_t k = 0; k < kBlocksPerStage; ++k) {
    SmbConfig block = cfg.smb_config(stage, k);
    block.directions = fit_windows(block.directions, x.dim(2), x.dim(3));
    x = smb_forward(x, w.blocks[k], block);
  }
  return x;
}

template <typename T>
Tensor<T> channel_attention_weights(const Tensor<T>& f, const EnhanceWeights<T>& w) {
  const Tensor<T> squeezed = global_avg_pool(f);
  return sigmoid(linear(relu(linear(squeezed, w.se_fc1_w, w.se_fc1_b)), w.se_fc2_w, w.se_fc2_b));
}

template <typename T>
StageFeatures<T> align_and_enhance(const Tensor<T>& f_ssm_raw, const Tensor<T>& f_conv_raw,
                                   const EnhanceWeights<T>& w) {
  require_rank(f_ssm_raw, 4, "align_and_enhance ssm");
  require_rank(f_conv_raw, 4, "align_and_enhance conv");
  if (f_ssm_raw.dim(0) != f_conv_raw.dim(0) || f_ssm_raw.dim(1) != f_conv_raw.dim(1)) {
    throw DimensionError("align_and_enhance: cannot fuse " + shape_string(f_ssm_raw.dims()) +
                         " with " + shape_string(f_conv_raw.dims()));
  }
  const Tensor<T> upsampled = bilinear_resize(f_ssm_raw, f_conv_raw.dim(2), f_conv_raw.dim(3));

  StageFeatures<T> out;
  out.f_conv = conv2d(f_conv_raw, w.conv_w, w.conv_b, Conv2dParams{1, 1, 1});
  out.f_ssm = scale_channels(upsampled, channel_attention_weights(upsampled, w));
  out.f_fused = add(out.f_ssm, out.f_conv);
  return out;
}

template <typename T>
std::array<Tensor<T>, kStages> conv_branch(const Tensor<T>& image, const EncoderWeights<T>& w) {
  std::array<Tensor<T>, kStages> out;
  const Tensor<T>* prev = &image;
  for (std::size_t i = 0; i < kStages; ++i) {
    out[i] = conv_stage(*prev, w.conv[i]);
    prev = &out[i];
  }
  return out;
}

template <typename T>
std::array<Tensor<T>, kStages> mamba_branch(const Tensor<T>& image, const EncoderWeights<T>& w,
                                            const ModelConfig& cfg) {
  std::array<Tensor<T>, kStages> out;
  const Tensor<T>* prev = &image;
  for (std::size_t i = 0; i < kStages; ++i) {
    out[i] = mamba_stage(*prev, w.mamba[i], i, cfg);
    prev = &out[i];
  }
  return out;
}

template <typename T>
EncoderOutput<T> encode(const Tensor<T>& image, const EncoderWeights<T>& w,
                        const ModelConfig& cfg) {
  cfg.validate();
  require_rank(image, 4, "encode");
  EncoderOutput<T> out;
  out.conv_raw = conv_branch(image, w);
  out.mamba_raw = mamba_branch(image, w, cfg);
  for (std::size_t i = 0; i < kStages; ++i) {
    out.stages[i] = align_and_enhance(out.mamba_raw[i], out.conv_raw[i], w.enhance[i]);
    out.stages[i].scale_denominator = std::size_t{2} << i;
  }
  return out;
}

#define BSM_INSTANTIATE_ENCODER(T)                                                             \
  template Tensor<T> conv_stage(const Tensor<T>&, const ConvStageWeights<T>&);                 \
  template Tensor<T> mamba_stage(const Tensor<T>&, const MambaStageWeights<T>&, std::size_t,   \
                                 const ModelConfig&);                                          \
  template Tensor<T> channel_attention_weights(const Tensor<T>&, const EnhanceWeights<T>&);    \
  template StageFeatures<T> align_and_enhance(const Tensor<T>&, const Tensor<T>&,              \
                                              const EnhanceWeights<T>&);                       \
  template std::array<Tensor<T>, kStages> conv_branch(const Tensor<T>&,                        \
                                                      const EncoderWeights<T>&);               \
  template std::array<Tensor<T>, kStages> mamba_branch(                                        \
      const Tensor<T>&, const EncoderWeights<T>&, const ModelConfig&);                         \
  template EncoderOutput<T> encode(const Tensor<T>&, const EncoderWeights<T>&,                 \
                                   const ModelConfig&);

BSM_INSTANTIATE_ENCODER(float)
BSM_INSTANTIATE_ENCODER(double)

}  // namespace bsm
