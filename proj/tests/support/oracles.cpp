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

#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace bsm::oracle {

template <typename T>
ssm::ScanInputs<T> random_scan_inputs(Rng& rng, std::size_t b, std::size_t l, std::size_t d,
                                      std::size_t n) {
  ssm::ScanInputs<T> in;
  in.x = rng.tensor<T>({b, l, d}, -10.0, 10.0);
  in.delta = rng.tensor<T>({b, l, d}, 0.05, 1.0);
  in.b = rng.tensor<T>({b, l, n}, -1.0, 1.0);
  in.c = rng.tensor<T>({b, l, n}, -1.0, 1.0);
  in.a = rng.tensor<T>({d, n}, -2.0, -0.5);
  return in;
}

template ssm::ScanInputs<float> random_scan_inputs(Rng&, std::size_t, std::size_t, std::size_t,
                                                   std::size_t);
template ssm::ScanInputs<double> random_scan_inputs(Rng&, std::size_t, std::size_t, std::size_t,
                                                    std::size_t);

std::vector<long double> reference_scan(const ssm::ScanInputs<double>& in) {
  const std::size_t B = in.x.dim(0), L = in.x.dim(1), D = in.x.dim(2), N = in.a.dim(1);
  std::vector<long double> y(B * L * D, 0.0L);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t d = 0; d < D; ++d) {
      std::vector<long double> h(N, 0.0L);
      for (std::size_t l = 0; l < L; ++l) {
        const long double dt = in.delta.at(b, l, d);
        const long double xv = in.x.at(b, l, d);
        long double acc = 0.0L;
        for (std::size_t k = 0; k < N; ++k) {
          const long double a = in.a.at(d, k);
          const long double abar = std::exp(dt * a);
          const long double bbar = std::expm1(dt * a) / a * in.b.at(b, l, k);
          h[k] = abar * h[k] + bbar * xv;
          acc += in.c.at(b, l, k) * h[k];
        }
        y[(b * L + l) * D + d] = acc;
      }
    }
  }
  return y;
}

namespace {

long double weighted_output(const ssm::ScanInputs<double>& in, const TensorD& grad_y) {
  const std::vector<long double> y = reference_scan(in);
  long double s = 0.0L;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * grad_y[i];
  return s;
}

TensorD central_difference(ssm::ScanInputs<double> in, TensorD ssm::ScanInputs<double>::*field,
                           const TensorD& grad_y, double h) {
  TensorD& target = in.*field;
  TensorD g(target.dims());
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double keep = target[i];
    target[i] = keep + h;
    const long double up = weighted_output(in, grad_y);
    target[i] = keep - h;
    const long double down = weighted_output(in, grad_y);
    target[i] = keep;
    g[i] = static_cast<double>((up - down) / (2.0L * h));
  }
  return g;
}

}  // namespace

FdGradients finite_difference_gradients(const ssm::ScanInputs<double>& in, const TensorD& grad_y,
                                        double h) {
  using S = ssm::ScanInputs<double>;
  return {central_difference(in, &S::x, grad_y, h), central_difference(in, &S::delta, grad_y, h),
          central_difference(in, &S::b, grad_y, h), central_difference(in, &S::c, grad_y, h),
          central_difference(in, &S::a, grad_y, h)};
}

double max_entry_rel_error(std::span<const double> got, std::span<const double> want,
                           double floor) {
  double worst = got.size() == want.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
    worst = std::max(worst, std::abs(got[i] - want[i]) / std::max(std::abs(want[i]), floor));
  }
  return worst;
}

template <typename T, typename U>
double max_norm_rel_error(std::span<const T> got, std::span<const U> want) {
  if (got.size() != want.size()) return INFINITY;
  long double diff = 0.0L;
  long double scale = 0.0L;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const long double w = static_cast<long double>(want[i]);
    diff = std::max(diff, std::abs(static_cast<long double>(got[i]) - w));
    scale = std::max(scale, std::abs(w));
  }
  if (scale == 0.0L) return static_cast<double>(diff);
  return static_cast<double>(diff / scale);
}

template double max_norm_rel_error(std::span<const float>, std::span<const double>);
template double max_norm_rel_error(std::span<const double>, std::span<const double>);
template double max_norm_rel_error(std::span<const double>, std::span<const long double>);
template double max_norm_rel_error(std::span<const float>, std::span<const long double>);
template double max_norm_rel_error(std::span<const float>, std::span<const float>);

std::vector<std::size_t> enumerate_scan_order(std::size_t h, std::size_t w,
                                              const ScanStrategy& s) {
  using Key = std::tuple<std::size_t, std::size_t, std::size_t, long long>;
  std::vector<std::pair<Key, std::size_t>> keyed;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      Key key;
      switch (s.kind) {
        case ScanKind::horizontal:
          key = {0, r, c, 0};
          break;
        case ScanKind::vertical:
          key = {0, c, r, 0};
          break;
        case ScanKind::local_window:
        case ScanKind::local_window_flipped: {
          const long long inner = static_cast<long long>((r % s.window) * s.window + c % s.window);
          key = {r / s.window, c / s.window, 0,
                 s.kind == ScanKind::local_window ? inner : -inner};
          break;
        }
      }
      keyed.emplace_back(key, r * w + c);
    }
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> order;
  for (const auto& [key, pixel] : keyed) order.push_back(pixel);
  return order;
}

TensorD naive_conv2d(const TensorD& input, const TensorD& kernel, const TensorD& bias,
                     std::size_t stride, std::size_t padding, std::size_t groups) {
  const std::size_t B = input.dim(0), Cin = input.dim(1), H = input.dim(2), W = input.dim(3);
  const std::size_t Cout = kernel.dim(0), Cg = kernel.dim(1), KH = kernel.dim(2),
                    KW = kernel.dim(3);
  const std::size_t OH = (H + 2 * padding - KH) / stride + 1;
  const std::size_t OW = (W + 2 * padding - KW) / stride + 1;
  const std::size_t out_per_group = Cout / groups;
  (void)Cin;
  TensorD out({B, Cout, OH, OW});
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t o = 0; o < Cout; ++o)
      for (std::size_t y = 0; y < OH; ++y)
        for (std::size_t x = 0; x < OW; ++x) {
          long double acc = bias.empty() ? 0.0L : bias[o];
          const std::size_t g = o / out_per_group;
          for (std::size_t ci = 0; ci < Cg; ++ci)
            for (std::size_t ky = 0; ky < KH; ++ky)
              for (std::size_t kx = 0; kx < KW; ++kx) {
                const long long iy = static_cast<long long>(y * stride + ky) -
                                     static_cast<long long>(padding);
                const long long ix = static_cast<long long>(x * stride + kx) -
                                     static_cast<long long>(padding);
                if (iy < 0 || ix < 0 || iy >= static_cast<long long>(H) ||
                    ix >= static_cast<long long>(W))
                  continue;
                acc += static_cast<long double>(kernel.at(o, ci, ky, kx)) *
                       input.at(b, g * Cg + ci, static_cast<std::size_t>(iy),
                                static_cast<std::size_t>(ix));
              }
          out.at(b, o, y, x) = static_cast<double>(acc);
        }
  return out;
}

TensorD naive_avg_pool(const TensorD& input, std::size_t k, std::size_t stride) {
  const std::size_t B = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
  const std::size_t OH = (H - k) / stride + 1, OW = (W - k) / stride + 1;
  TensorD out({B, C, OH, OW});
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t y = 0; y < OH; ++y)
        for (std::size_t x = 0; x < OW; ++x) {
          long double s = 0.0L;
          for (std::size_t dy = 0; dy < k; ++dy)
            for (std::size_t dx = 0; dx < k; ++dx) s += input.at(b, c, y * stride + dy, x * stride + dx);
          out.at(b, c, y, x) = static_cast<double>(s / static_cast<long double>(k * k));
        }
  return out;
}

TensorD naive_bilinear(const TensorD& input, std::size_t out_h, std::size_t out_w) {
  const std::size_t B = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
  TensorD out({B, C, out_h, out_w});
  auto source = [](std::size_t o, std::size_t in, std::size_t out_n) {
    const double s = (static_cast<double>(o) + 0.5) * static_cast<double>(in) /
                         static_cast<double>(out_n) - 0.5;
    return std::clamp(s, 0.0, static_cast<double>(in - 1));
  };
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t y = 0; y < out_h; ++y)
        for (std::size_t x = 0; x < out_w; ++x) {
          const double sy = source(y, H, out_h), sx = source(x, W, out_w);
          const auto y0 = static_cast<std::size_t>(std::floor(sy));
          const auto x0 = static_cast<std::size_t>(std::floor(sx));
          const std::size_t y1 = std::min(y0 + 1, H - 1), x1 = std::min(x0 + 1, W - 1);
          const double fy = sy - static_cast<double>(y0), fx = sx - static_cast<double>(x0);
          out.at(b, c, y, x) = (1 - fy) * (1 - fx) * input.at(b, c, y0, x0) +
                               (1 - fy) * fx * input.at(b, c, y0, x1) +
                               fy * (1 - fx) * input.at(b, c, y1, x0) +
                               fy * fx * input.at(b, c, y1, x1);
        }
  return out;
}

NaiveCounts naive_counts(const MaskImage& pred, const MaskImage& gt) {
  NaiveCounts n;
  for (std::size_t y = 0; y < gt.height; ++y) {
    for (std::size_t x = 0; x < gt.width; ++x) {
      const int p = static_cast<int>(pred.labels[y * pred.width + x]);
      const int g = static_cast<int>(gt.labels[y * gt.width + x]);
      ++n.total;
      if (p == g) {
        ++n.correct;
        ++n.tp[p];
      } else {
        ++n.fp[p];
        ++n.fn[g];
      }
    }
  }
  return n;
}

MetricsReport naive_metrics(const MaskImage& pred, const MaskImage& gt) {
  const NaiveCounts n = naive_counts(pred, gt);
  auto ratio = [](std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 100.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  MetricsReport r;
  r.iou_blk = ratio(n.tp[0], n.tp[0] + n.fp[0] + n.fn[0]);
  r.iou_mat = ratio(n.tp[1], n.tp[1] + n.fp[1] + n.fn[1]);
  r.f1_blk = ratio(2 * n.tp[0], 2 * n.tp[0] + n.fp[0] + n.fn[0]);
  r.f1_mat = ratio(2 * n.tp[1], 2 * n.tp[1] + n.fp[1] + n.fn[1]);
  r.miou = (r.iou_blk + r.iou_mat) / 2.0;
  r.mean_f1 = (r.f1_blk + r.f1_mat) / 2.0;
  r.acc = ratio(n.correct, n.total);
  return r;
}

std::vector<std::uint32_t> tile_coverage(const TileGrid& grid) {
  std::vector<std::uint32_t> cover(grid.scene_width * grid.scene_height, 0);
  for (const TileAnchor& a : grid.anchors) {
    for (std::size_t y = a.y; y < a.y + grid.tile; ++y) {
      for (std::size_t x = a.x; x < a.x + grid.tile; ++x) {
        if (y < grid.scene_height && x < grid.scene_width) ++cover[y * grid.scene_width + x];
      }
    }
  }
  return cover;
}

MaskImage random_mask(Rng& rng, std::size_t w, std::size_t h) {
  MaskImage m(w, h);
  for (Label& l : m.labels) l = (rng.bits() & 1) ? Label::mat : Label::blk;
  return m;
}

}  // namespace bsm::oracle
