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

#include "bsm/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bsm/parallel.hpp"
#include "bsm/simd.hpp"

namespace bsm {

namespace {

struct Nchw {
  std::size_t b, c, h, w;
};

template <typename T>
Nchw nchw(const Tensor<T>& t, const char* where) {
  require_rank(t, 4, where);
  return {t.dim(0), t.dim(1), t.dim(2), t.dim(3)};
}

template <typename T>
void require_vector(const Tensor<T>& t, std::size_t n, const char* where) {
  if (t.rank() != 1 || t.dim(0) != n) {
    throw DimensionError(std::string(where) + ": expected vector of length " + std::to_string(n) +
                         ", got " + shape_string(t.dims()));
  }
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& kernel, const Tensor<T>& bias,
                 Conv2dParams params) {
  const auto in = nchw(input, "conv2d input");
  require_rank(kernel, 4, "conv2d kernel");
  const std::size_t out_ch = kernel.dim(0);
  const std::size_t kh = kernel.dim(2);
  const std::size_t kw = kernel.dim(3);
  const std::size_t groups = params.groups;
  const std::size_t stride = params.stride;
  const std::size_t pad = params.padding;

  if (groups == 0 || stride == 0) throw DimensionError("conv2d: groups and stride must be positive");
  if (in.c % groups != 0 || out_ch % groups != 0) {
    throw DimensionError("conv2d: channels " + std::to_string(in.c) + "/" + std::to_string(out_ch) +
                         " not divisible by groups " + std::to_string(groups));
  }
  const std::size_t in_per_group = in.c / groups;
  const std::size_t out_per_group = out_ch / groups;
  if (kernel.dim(1) != in_per_group) {
    throw DimensionError("conv2d: kernel " + shape_string(kernel.dims()) + " does not match " +
                         std::to_string(in.c) + " input channels in " + std::to_string(groups) +
                         " groups");
  }
  if (!bias.empty()) require_vector(bias, out_ch, "conv2d bias");
  if (in.h + 2 * pad < kh || in.w + 2 * pad < kw) {
    throw DimensionError("conv2d: kernel larger than padded input " + shape_string(input.dims()));
  }
  const std::size_t out_h = (in.h + 2 * pad - kh) / stride + 1;
  const std::size_t out_w = (in.w + 2 * pad - kw) / stride + 1;

  Tensor<T> out({in.b, out_ch, out_h, out_w});
  const T* src = input.raw();
  const T* wts = kernel.raw();
  T* dst = out.raw();
  const std::size_t in_plane = in.h * in.w;
  const std::size_t out_plane = out_h * out_w;
  const auto ipad = static_cast<std::ptrdiff_t>(pad);

  parallel_for(in.b * out_ch, [&](std::size_t job) {
    const std::size_t b = job / out_ch;
    const std::size_t o = job % out_ch;
    const std::size_t g = o / out_per_group;
    T* plane = dst + (b * out_ch + o) * out_plane;
    std::fill(plane, plane + out_plane, bias.empty() ? T{0} : bias[o]);

    for (std::size_t ci = 0; ci < in_per_group; ++ci) {
      const T* src_plane = src + (b * in.c + g * in_per_group + ci) * in_plane;
      const T* kern = wts + (o * in_per_group + ci) * kh * kw;
      for (std::size_t ky = 0; ky < kh; ++ky) {
        for (std::size_t kx = 0; kx < kw; ++kx) {
          const T wv = kern[ky * kw + kx];
          if (wv == T{0}) continue;
          const auto dx = static_cast<std::ptrdiff_t>(kx) - ipad;
          const auto dy = static_cast<std::ptrdiff_t>(ky) - ipad;
          for (std::size_t oy = 0; oy < out_h; ++oy) {
            const auto iy = static_cast<std::ptrdiff_t>(oy * stride) + dy;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in.h)) continue;
            const T* row = src_plane + static_cast<std::size_t>(iy) * in.w;
            T* out_row = plane + oy * out_w;
            if (stride == 1) {
              const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -dx);
              const std::ptrdiff_t hi =
                  std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(out_w),
                                           static_cast<std::ptrdiff_t>(in.w) - dx);
              if (hi > lo) {
                simd::axpy(wv, row + lo + dx, out_row + lo, static_cast<std::size_t>(hi - lo));
              }
            } else {
              for (std::size_t ox = 0; ox < out_w; ++ox) {
                const auto ix = static_cast<std::ptrdiff_t>(ox * stride) + dx;
                if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(in.w)) out_row[ox] += wv * row[ix];
              }
            }
          }
        }
      }
    }
  });
  return ensure_finite(std::move(out), "conv2d");
}

template <typename T>
Tensor<T> avg_pool2d(const Tensor<T>& input, std::size_t k, std::size_t stride) {
  const auto in = nchw(input, "avg_pool2d");
  if (k == 0 || stride == 0) throw DimensionError("avg_pool2d: window and stride must be positive");
  if (in.h < k || in.w < k) {
    throw DimensionError("avg_pool2d: window " + std::to_string(k) + " larger than input " +
                         shape_string(input.dims()));
  }
  const std::size_t out_h = (in.h - k) / stride + 1;
  const std::size_t out_w = (in.w - k) / stride + 1;
  Tensor<T> out({in.b, in.c, out_h, out_w});
  const T inv = T{1} / static_cast<T>(k * k);
  for (std::size_t p = 0; p < in.b * in.c; ++p) {
    const T* src = input.raw() + p * in.h * in.w;
    T* dst = out.raw() + p * out_h * out_w;
    for (std::size_t oy = 0; oy < out_h; ++oy) {
      for (std::size_t ox = 0; ox < out_w; ++ox) {
        T acc{0};
        for (std::size_t y = 0; y < k; ++y) {
          const T* row = src + (oy * stride + y) * in.w + ox * stride;
          for (std::size_t x = 0; x < k; ++x) acc += row[x];
        }
        dst[oy * out_w + ox] = acc * inv;
      }
    }
  }
  return ensure_finite(std::move(out), "avg_pool2d");
}

namespace {

struct Tap {
  std::size_t lo, hi;
  double frac;
};

// Half-pixel source coordinate, clamped to the valid sample range.
std::vector<Tap> resize_taps(std::size_t in, std::size_t out) {
  std::vector<Tap> taps(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t i = 0; i < out; ++i) {
    double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const auto lo = static_cast<std::size_t>(std::floor(src));
    taps[i] = {lo, std::min(lo + 1, in - 1), src - static_cast<double>(lo)};
  }
  return taps;
}

}  // namespace

template <typename T>
Tensor<T> bilinear_resize(const Tensor<T>& input, std::size_t out_h, std::size_t out_w) {
  const auto in = nchw(input, "bilinear_resize");
  if (out_h == 0 || out_w == 0) throw DimensionError("bilinear_resize: zero output size");
  if (out_h == in.h && out_w == in.w) return input;

  const auto ys = resize_taps(in.h, out_h);
  const auto xs = resize_taps(in.w, out_w);
  Tensor<T> out({in.b, in.c, out_h, out_w});
  for (std::size_t p = 0; p < in.b * in.c; ++p) {
    const T* src = input.raw() + p * in.h * in.w;
    T* dst = out.raw() + p * out_h * out_w;
    for (std::size_t oy = 0; oy < out_h; ++oy) {
      const T fy = static_cast<T>(ys[oy].frac);
      const T* r0 = src + ys[oy].lo * in.w;
      const T* r1 = src + ys[oy].hi * in.w;
      for (std::size_t ox = 0; ox < out_w; ++ox) {
        const T fx = static_cast<T>(xs[ox].frac);
        const std::size_t x0 = xs[ox].lo;
        const std::size_t x1 = xs[ox].hi;
        // lerp form keeps constants exact
        const T top = r0[x0] + fx * (r0[x1] - r0[x0]);
        const T bottom = r1[x0] + fx * (r1[x1] - r1[x0]);
        dst[oy * out_w + ox] = top + fy * (bottom - top);
      }
    }
  }
  return ensure_finite(std::move(out), "bilinear_resize");
}

template <typename T>
T activate(Activation kind, T x) {
  switch (kind) {
    case Activation::relu:
      return x > T{0} ? x : T{0};
    case Activation::sigmoid:
      if (x >= T{0}) return T{1} / (T{1} + std::exp(-x));
      else {
        const T e = std::exp(x);
        return e / (T{1} + e);
      }
    case Activation::silu:
      return x * activate(Activation::sigmoid, x);
    case Activation::softplus:
      return x > T{20} ? x : std::log1p(std::exp(x));
  }
  return x;
}

template <typename T>
Tensor<T> apply(Activation kind, Tensor<T> x) {
  for (T& v : x.data()) v = activate(kind, v);
  return ensure_finite(std::move(x), "activation");
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& offset) {
  if (x.rank() == 0) throw DimensionError("layer_norm: empty input");
  const std::size_t d = x.dims().back();
  require_vector(gain, d, "layer_norm gain");
  require_vector(offset, d, "layer_norm offset");
  Tensor<T> out(x.dims());
  const std::size_t rows = x.size() / d;
  for (std::size_t r = 0; r < rows; ++r) {
    const T* src = x.raw() + r * d;
    T* dst = out.raw() + r * d;
    double mean = 0.0;
    for (std::size_t i = 0; i < d; ++i) mean += static_cast<double>(src[i]);
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double c = static_cast<double>(src[i]) - mean;
      var += c * c;
    }
    var /= static_cast<double>(d);
    const double inv_std = 1.0 / std::sqrt(var + kLayerNormEps);
    for (std::size_t i = 0; i < d; ++i) {
      const auto normed = static_cast<T>((static_cast<double>(src[i]) - mean) * inv_std);
      dst[i] = normed * gain[i] + offset[i];
    }
  }
  return ensure_finite(std::move(out), "layer_norm");
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  require_rank(weight, 2, "linear weight");
  const std::size_t d_out = weight.dim(0);
  const std::size_t d_in = weight.dim(1);
  if (x.rank() == 0 || x.dims().back() != d_in) {
    throw DimensionError("linear: input " + shape_string(x.dims()) + " does not end in " +
                         std::to_string(d_in));
  }
  if (!bias.empty()) require_vector(bias, d_out, "linear bias");

  Shape out_dims = x.dims();
  out_dims.back() = d_out;
  Tensor<T> out(out_dims);
  const std::size_t rows = x.size() / d_in;
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (rows + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t chunk) {
    const std::size_t end = std::min(rows, (chunk + 1) * kChunk);
    for (std::size_t r = chunk * kChunk; r < end; ++r) {
      const T* row = x.raw() + r * d_in;
      T* dst = out.raw() + r * d_out;
      for (std::size_t o = 0; o < d_out; ++o) {
        const T acc = simd::dot(row, weight.raw() + o * d_in, d_in);
        dst[o] = bias.empty() ? acc : acc + bias[o];
      }
    }
  });
  return ensure_finite(std::move(out), "linear");
}

template <typename T>
Tensor<T> softmax_channel(const Tensor<T>& x) {
  const auto s = nchw(x, "softmax_channel");
  Tensor<T> out(x.dims());
  const std::size_t plane = s.h * s.w;
  std::vector<T> e(s.c);
  for (std::size_t b = 0; b < s.b; ++b) {
    const T* src = x.raw() + b * s.c * plane;
    T* dst = out.raw() + b * s.c * plane;
    for (std::size_t p = 0; p < plane; ++p) {
      T peak = src[p];
      for (std::size_t c = 1; c < s.c; ++c) peak = std::max(peak, src[c * plane + p]);
      T total{0};
      for (std::size_t c = 0; c < s.c; ++c) {
        e[c] = std::exp(src[c * plane + p] - peak);
        total += e[c];
      }
      for (std::size_t c = 0; c < s.c; ++c) dst[c * plane + p] = e[c] / total;
    }
  }
  return ensure_finite(std::move(out), "softmax_channel");
}

template <typename T>
Tensor<T> channel_affine(const Tensor<T>& x, const Tensor<T>& scale, const Tensor<T>& shift) {
  const auto s = nchw(x, "channel_affine");
  require_vector(scale, s.c, "channel_affine scale");
  require_vector(shift, s.c, "channel_affine shift");
  Tensor<T> out(x.dims());
  const std::size_t plane = s.h * s.w;
  for (std::size_t b = 0; b < s.b; ++b) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const T* src = x.raw() + (b * s.c + c) * plane;
      T* dst = out.raw() + (b * s.c + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) dst[p] = scale[c] * src[p] + shift[c];
    }
  }
  return ensure_finite(std::move(out), "channel_affine");
}

template <typename T>
Tensor<T> scale_channels(const Tensor<T>& x, const Tensor<T>& weights) {
  const auto s = nchw(x, "scale_channels");
  require_shape(weights, {s.b, s.c}, "scale_channels weights");
  Tensor<T> out(x.dims());
  const std::size_t plane = s.h * s.w;
  for (std::size_t bc = 0; bc < s.b * s.c; ++bc) {
    const T* src = x.raw() + bc * plane;
    T* dst = out.raw() + bc * plane;
    for (std::size_t p = 0; p < plane; ++p) dst[p] = src[p] * weights[bc];
  }
  return ensure_finite(std::move(out), "scale_channels");
}

template <typename T>
Tensor<T> scale_pixels(const Tensor<T>& x, const Tensor<T>& map) {
  const auto s = nchw(x, "scale_pixels");
  require_shape(map, {s.b, 1, s.h, s.w}, "scale_pixels map");
  Tensor<T> out(x.dims());
  const std::size_t plane = s.h * s.w;
  for (std::size_t b = 0; b < s.b; ++b) {
    const T* m = map.raw() + b * plane;
    for (std::size_t c = 0; c < s.c; ++c) {
      const T* src = x.raw() + (b * s.c + c) * plane;
      T* dst = out.raw() + (b * s.c + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) dst[p] = src[p] * m[p];
    }
  }
  return ensure_finite(std::move(out), "scale_pixels");
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_shape(b, a.dims(), "add");
  Tensor<T> out(a.dims());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return ensure_finite(std::move(out), "add");
}

template <typename T>
Tensor<T> multiply(const Tensor<T>& a, const Tensor<T>& b) {
  require_shape(b, a.dims(), "multiply");
  Tensor<T> out(a.dims());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return ensure_finite(std::move(out), "multiply");
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  const auto sa = nchw(a, "concat_channels");
  const auto sb = nchw(b, "concat_channels");
  if (sa.b != sb.b || sa.h != sb.h || sa.w != sb.w) {
    throw DimensionError("concat_channels: " + shape_string(a.dims()) + " vs " +
                         shape_string(b.dims()));
  }
  Tensor<T> out({sa.b, sa.c + sb.c, sa.h, sa.w});
  const std::size_t plane = sa.h * sa.w;
  for (std::size_t n = 0; n < sa.b; ++n) {
    T* dst = out.raw() + n * (sa.c + sb.c) * plane;
    std::copy_n(a.raw() + n * sa.c * plane, sa.c * plane, dst);
    std::copy_n(b.raw() + n * sb.c * plane, sb.c * plane, dst + sa.c * plane);
  }
  return out;
}

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
  const auto s = nchw(x, "global_avg_pool");
  Tensor<T> out({s.b, s.c});
  const std::size_t plane = s.h * s.w;
  for (std::size_t bc = 0; bc < s.b * s.c; ++bc) {
    double acc = 0.0;
    const T* src = x.raw() + bc * plane;
    for (std::size_t p = 0; p < plane; ++p) acc += static_cast<double>(src[p]);
    out[bc] = static_cast<T>(acc / static_cast<double>(plane));
  }
  return out;
}

template <typename T>
Tensor<T> channel_mean(const Tensor<T>& x) {
  const auto s = nchw(x, "channel_mean");
  Tensor<T> out({s.b, 1, s.h, s.w});
  const std::size_t plane = s.h * s.w;
  const T inv = T{1} / static_cast<T>(s.c);
  for (std::size_t b = 0; b < s.b; ++b) {
    T* dst = out.raw() + b * plane;
    for (std::size_t c = 0; c < s.c; ++c) {
      simd::axpy(inv, x.raw() + (b * s.c + c) * plane, dst, plane);
    }
  }
  return out;
}

template <typename T>
Tensor<T> to_tokens(const Tensor<T>& x) {
  const auto s = nchw(x, "to_tokens");
  Tensor<T> out({s.b, s.h * s.w, s.c});
  const std::size_t plane = s.h * s.w;
  for (std::size_t b = 0; b < s.b; ++b) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const T* src = x.raw() + (b * s.c + c) * plane;
      T* dst = out.raw() + b * plane * s.c + c;
      for (std::size_t p = 0; p < plane; ++p) dst[p * s.c] = src[p];
    }
  }
  return out;
}

template <typename T>
Tensor<T> from_tokens(const Tensor<T>& tokens, std::size_t h, std::size_t w) {
  require_rank(tokens, 3, "from_tokens");
  if (tokens.dim(1) != h * w) {
    throw DimensionError("from_tokens: " + std::to_string(tokens.dim(1)) + " tokens for a " +
                         std::to_string(h) + "x" + std::to_string(w) + " grid");
  }
  const std::size_t batch = tokens.dim(0);
  const std::size_t ch = tokens.dim(2);
  Tensor<T> out({batch, ch, h, w});
  const std::size_t plane = h * w;
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < ch; ++c) {
      const T* src = tokens.raw() + b * plane * ch + c;
      T* dst = out.raw() + (b * ch + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) dst[p] = src[p * ch];
    }
  }
  return out;
}

#define BSM_INSTANTIATE_OPS(T)                                                                 \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,              \
                            Conv2dParams);                                                     \
  template Tensor<T> avg_pool2d(const Tensor<T>&, std::size_t, std::size_t);                   \
  template Tensor<T> bilinear_resize(const Tensor<T>&, std::size_t, std::size_t);              \
  template T activate(Activation, T);                                                          \
  template Tensor<T> apply(Activation, Tensor<T>);                                             \
  template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);         \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);             \
  template Tensor<T> softmax_channel(const Tensor<T>&);                                        \
  template Tensor<T> channel_affine(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);     \
  template Tensor<T> scale_channels(const Tensor<T>&, const Tensor<T>&);                       \
  template Tensor<T> scale_pixels(const Tensor<T>&, const Tensor<T>&);                         \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                  \
  template Tensor<T> multiply(const Tensor<T>&, const Tensor<T>&);                             \
  template Tensor<T> concat_channels(const Tensor<T>&, const Tensor<T>&);                      \
  template Tensor<T> global_avg_pool(const Tensor<T>&);                                        \
  template Tensor<T> channel_mean(const Tensor<T>&);                                           \
  template Tensor<T> to_tokens(const Tensor<T>&);                                              \
  template Tensor<T> from_tokens(const Tensor<T>&, std::size_t, std::size_t);

BSM_INSTANTIATE_OPS(float)
BSM_INSTANTIATE_OPS(double)

}  // namespace bsm
