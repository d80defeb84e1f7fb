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

#include "bsm/metrics.hpp"

#include <cstdio>

#include "bsm/error.hpp"

namespace bsm {

ClassCounts count_class(const MaskImage& pred, const MaskImage& gt, Label cls) {
  if (pred.width != gt.width || pred.height != gt.height) {
    throw DimensionError("evaluate: prediction is " + std::to_string(pred.width) + "x" +
                         std::to_string(pred.height) + ", ground truth is " +
                         std::to_string(gt.width) + "x" + std::to_string(gt.height));
  }
  ClassCounts c;
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    const bool p = pred.labels[i] == cls;
    const bool g = gt.labels[i] == cls;
    c.tp += p && g;
    c.fp += p && !g;
    c.fn += !p && g;
    c.tn += !p && !g;
  }
  return c;
}

namespace {

double iou_percent(const ClassCounts& c) {
  const std::uint64_t den = c.tp + c.fp + c.fn;
  return den == 0 ? 100.0 : 100.0 * static_cast<double>(c.tp) / static_cast<double>(den);
}

double f1_percent(const ClassCounts& c) {
  const std::uint64_t den = 2 * c.tp + c.fp + c.fn;
  return den == 0 ? 100.0 : 100.0 * static_cast<double>(2 * c.tp) / static_cast<double>(den);
}

}  // namespace

MetricsReport evaluate(const MaskImage& pred, const MaskImage& gt) {
  const ClassCounts blk = count_class(pred, gt, Label::blk);
  const ClassCounts mat = count_class(pred, gt, Label::mat);
  MetricsReport r;
  r.iou_blk = iou_percent(blk);
  r.iou_mat = iou_percent(mat);
  r.miou = (r.iou_blk + r.iou_mat) / 2.0;
  r.f1_blk = f1_percent(blk);
  r.f1_mat = f1_percent(mat);
  r.mean_f1 = (r.f1_blk + r.f1_mat) / 2.0;
  const std::uint64_t total = blk.tp + blk.fp + blk.fn + blk.tn;
  r.acc = total == 0 ? 100.0
                     : 100.0 * static_cast<double>(blk.tp + mat.tp) / static_cast<double>(total);
  return r;
}

std::string metrics_csv_header() { return "IoU_blk,IoU_mat,mIoU,F1_blk,F1_mat,mean_F1,ACC"; }

std::string metrics_csv_row(const MetricsReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f", r.iou_blk, r.iou_mat,
                r.miou, r.f1_blk, r.f1_mat, r.mean_f1, r.acc);
  return buf;
}

}  // namespace bsm
