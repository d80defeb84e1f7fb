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

#include <cstdint>
#include <string>

#include "bsm/mask.hpp"

namespace bsm {

/// Per-class confusion counts for the two-class problem.
struct ClassCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
};

/// Every field is a percentage in [0, 100]. A class absent from both the
/// prediction and the ground truth scores 100 for IoU and F1.
struct MetricsReport {
  double iou_blk = 0.0;
  double iou_mat = 0.0;
  double miou = 0.0;
  double f1_blk = 0.0;
  double f1_mat = 0.0;
  double mean_f1 = 0.0;
  double acc = 0.0;
};

ClassCounts count_class(const MaskImage& pred, const MaskImage& gt, Label cls);

MetricsReport evaluate(const MaskImage& pred, const MaskImage& gt);

/// "IoU_blk,IoU_mat,mIoU,F1_blk,F1_mat,mean_F1,ACC"
std::string metrics_csv_header();
/// One row, four decimals per field.
std::string metrics_csv_row(const MetricsReport& report);

}  // namespace bsm
