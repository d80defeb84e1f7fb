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

#include "bsm/ssm.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bsm/parallel.hpp"
#include "bsm/simd.hpp"

namespace bsm::ssm {

namespace {

struct Extents {
  std::size_t batch, length, channels, state;
};

template <typename T>
Extents step_extents(const DiscretizedStep<T>& step, const Tensor<T>& x, const char* where) {
  require_rank(step.abar, 4, where);
  require_shape(step.bbar, step.abar.dims(), where);
  const Extents e{step.abar.dim(0), step.abar.dim(1), step.abar.dim(2), step.abar.dim(3)};
  require_shape(x, {e.batch, e.length, e.channels}, where);
  return e;
}

template <typename T>
Extents checked_extents(const DiscretizedStep<T>& step, const Tensor<T>& x, const Tensor<T>& c,
                        const char* where) {
  const Extents e = step_extents(step, x, where);
  require_shape(c, {e.batch, e.length, e.state}, where);
  return e;
}

// Offset of the N-vector for (b, l, d) in a [B,L,D,N] array.
inline std::size_t state_offset(const Extents& e, std::size_t b, std::size_t l, std::size_t d) {
  return ((b * e.length + l) * e.channels + d) * e.state;
}

}  // namespace

template <typename T>
void validate(const ScanInputs<T>& in) {
  require_rank(in.x, 3, "scan inputs x");
  require_rank(in.a, 2, "scan inputs a");
  const std::size_t batch = in.x.dim(0);
  const std::size_t length = in.x.dim(1);
  const std::size_t channels = in.x.dim(2);
  const std::size_t state = in.a.dim(1);
  require_shape(in.delta, in.x.dims(), "scan inputs delta");
  require_shape(in.b, {batch, length, state}, "scan inputs b");
  require_shape(in.c, {batch, length, state}, "scan inputs c");
  require_shape(in.a, {channels, state}, "scan inputs a");
  for (T v : in.delta.data()) {
    if (!(v > T{0})) throw DomainError("scan inputs: delta must be strictly positive");
  }
  for (T v : in.a.data()) {
    if (!(v < T{0})) throw DomainError("scan inputs: a must be strictly negative");
  }
}

template <typename T>
T hold_factor(T delta, T a) {
  const T z = delta * a;
  if (std::abs(static_cast<double>(z)) < kTaylorThreshold) return delta * (T{1} + z / T{2});
  return std::expm1(z) / a;
}

template <typename T>
std::pair<T, T> zoh_coefficients(T delta, T a) {
  return {std::exp(delta * a), hold_factor(delta, a)};
}

template <typename T>
DiscretizedStep<T> discretize(const ScanInputs<T>& in) {
  validate(in);
  const std::size_t batch = in.batch();
  const std::size_t length = in.length();
  const std::size_t channels = in.channels();
  const std::size_t state = in.state_dim();
  DiscretizedStep<T> out{Tensor<T>({batch, length, channels, state}),
                         Tensor<T>({batch, length, channels, state})};
  parallel_for(batch * length, [&](std::size_t bl) {
    const T* bvec = in.b.raw() + bl * state;
    for (std::size_t d = 0; d < channels; ++d) {
      const T dt = in.delta[bl * channels + d];
      const T* arow = in.a.raw() + d * state;
      T* abar = out.abar.raw() + (bl * channels + d) * state;
      T* bbar = out.bbar.raw() + (bl * channels + d) * state;
      for (std::size_t n = 0; n < state; ++n) {
        const auto [decay, hold] = zoh_coefficients(dt, arow[n]);
        abar[n] = decay;
        bbar[n] = hold * bvec[n];
      }
    }
  });
  out.abar = ensure_finite(std::move(out.abar), "discretize");
  out.bbar = ensure_finite(std::move(out.bbar), "discretize");
  return out;
}

template <typename T>
Tensor<T> scan_sequential(const DiscretizedStep<T>& step, const Tensor<T>& x, const Tensor<T>& c) {
  const Extents e = checked_extents(step, x, c, "scan_sequential");
  Tensor<T> y({e.batch, e.length, e.channels});
  parallel_for(e.batch * e.channels, [&](std::size_t lane) {
    const std::size_t b = lane / e.channels;
    const std::size_t d = lane % e.channels;
    std::vector<T> h(e.state, T{0});
    for (std::size_t l = 0; l < e.length; ++l) {
      const std::size_t so = state_offset(e, b, l, d);
      const std::size_t xo = (b * e.length + l) * e.channels + d;
      simd::state_update(step.abar.raw() + so, step.bbar.raw() + so, x[xo], h.data(), e.state);
      y[xo] = simd::dot(c.raw() + (b * e.length + l) * e.state, h.data(), e.state);
    }
  });
  return ensure_finite(std::move(y), "scan_sequential");
}

template <typename T>
Tensor<T> scan_states(const DiscretizedStep<T>& step, const Tensor<T>& x) {
  const Extents e = step_extents(step, x, "scan_states");
  Tensor<T> states(step.abar.dims());
  parallel_for(e.batch * e.channels, [&](std::size_t lane) {
    const std::size_t b = lane / e.channels;
    const std::size_t d = lane % e.channels;
    std::vector<T> h(e.state, T{0});
    for (std::size_t l = 0; l < e.length; ++l) {
      const std::size_t so = state_offset(e, b, l, d);
      simd::state_update(step.abar.raw() + so, step.bbar.raw() + so,
                         x[(b * e.length + l) * e.channels + d], h.data(), e.state);
      std::copy(h.begin(), h.end(), states.raw() + so);
    }
  });
  return states;
}

template <typename T>
Tensor<T> materialized_operator(const DiscretizedStep<T>& step, const Tensor<T>& c,
                                std::size_t batch, std::size_t channel, std::size_t max_length) {
  require_rank(step.abar, 4, "materialized_operator");
  const Extents e{step.abar.dim(0), step.abar.dim(1), step.abar.dim(2), step.abar.dim(3)};
  require_shape(c, {e.batch, e.length, e.state}, "materialized_operator c");
  if (e.length > max_length) {
    throw DimensionError("scan_materialized: length " + std::to_string(e.length) +
                         " exceeds oracle limit " + std::to_string(max_length));
  }
  if (batch >= e.batch || channel >= e.channels) {
    throw DimensionError("materialized_operator: lane out of range");
  }
  Tensor<T> op({e.length, e.length});
  std::vector<T> decay(e.state);
  for (std::size_t l = 0; l < e.length; ++l) {
    const T* cl = c.raw() + (batch * e.length + l) * e.state;
    std::fill(decay.begin(), decay.end(), T{1});  // ∏ abar_j over j in (k, l]
    for (std::size_t k = l + 1; k-- > 0;) {
      const std::size_t so = state_offset(e, batch, k, channel);
      T entry{0};
      for (std::size_t n = 0; n < e.state; ++n) entry += cl[n] * decay[n] * step.bbar[so + n];
      op.at(l, k) = entry;
      for (std::size_t n = 0; n < e.state; ++n) decay[n] *= step.abar[so + n];
    }
  }
  return op;
}

template <typename T>
Tensor<T> scan_materialized(const DiscretizedStep<T>& step, const Tensor<T>& x,
                            const Tensor<T>& c, std::size_t max_length) {
  const Extents e = checked_extents(step, x, c, "scan_materialized");
  if (e.length > max_length) {
    throw DimensionError("scan_materialized: length " + std::to_string(e.length) +
                         " exceeds oracle limit " + std::to_string(max_length));
  }
  Tensor<T> y({e.batch, e.length, e.channels});
  for (std::size_t b = 0; b < e.batch; ++b) {
    for (std::size_t d = 0; d < e.channels; ++d) {
      const Tensor<T> op = materialized_operator(step, c, b, d, max_length);
      for (std::size_t l = 0; l < e.length; ++l) {
        T acc{0};
        for (std::size_t k = 0; k <= l; ++k) {
          acc += op.at(l, k) * x[(b * e.length + k) * e.channels + d];
        }
        y[(b * e.length + l) * e.channels + d] = acc;
      }
    }
  }
  return ensure_finite(std::move(y), "scan_materialized");
}

template <typename T>
Tensor<T> scan_blocked(const DiscretizedStep<T>& step, const Tensor<T>& x, const Tensor<T>& c,
                       std::size_t block) {
  const Extents e = checked_extents(step, x, c, "scan_blocked");
  if (block == 0) throw DimensionError("scan_blocked: block must be positive");
  const std::size_t n = e.state;
  const std::size_t blocks = (e.length + block - 1) / block;
  Tensor<T> y({e.batch, e.length, e.channels});

  parallel_for(e.batch * e.channels, [&](std::size_t lane) {
    const std::size_t b = lane / e.channels;
    const std::size_t d = lane % e.channels;
    // Per position: local state from the block start, and the running decay product.
    std::vector<T> local(e.length * n);
    std::vector<T> decay(e.length * n);
    std::vector<T> carries(blocks * n, T{0});
    std::vector<T> h(n);

    auto x_at = [&](std::size_t l) { return x[(b * e.length + l) * e.channels + d]; };
    auto c_at = [&](std::size_t l) { return c.raw() + (b * e.length + l) * e.state; };

    // Phase 1: reduce each block from the identity element (a=1, u=0).
    for (std::size_t k = 0; k < blocks; ++k) {
      const std::size_t begin = k * block;
      const std::size_t end = std::min(e.length, begin + block);
      for (std::size_t l = begin; l < end; ++l) {
        const std::size_t so = state_offset(e, b, l, d);
        T* u = local.data() + l * n;
        T* p = decay.data() + l * n;
        if (l == begin) {
          std::fill(u, u + n, T{0});
          std::copy_n(step.abar.raw() + so, n, p);
        } else {
          std::copy_n(u - n, n, u);
          std::copy_n(p - n, n, p);
          simd::mul_inplace(step.abar.raw() + so, p, n);
        }
        simd::state_update(step.abar.raw() + so, step.bbar.raw() + so, x_at(l), u, n);
      }
    }

    // Phase 2: stitch block summaries left to right.
    for (std::size_t k = 1; k < blocks; ++k) {
      const std::size_t last = std::min(e.length, k * block) - 1;
      simd::carry_apply(decay.data() + last * n, carries.data() + (k - 1) * n,
                        local.data() + last * n, carries.data() + k * n, n);
    }

    // Phase 3: fold each block's incoming carry into its local states.
    for (std::size_t k = 0; k < blocks; ++k) {
      const std::size_t begin = k * block;
      const std::size_t end = std::min(e.length, begin + block);
      for (std::size_t l = begin; l < end; ++l) {
        const T* state = local.data() + l * n;
        if (k > 0) {
          simd::carry_apply(decay.data() + l * n, carries.data() + k * n, state, h.data(), n);
          state = h.data();
        }
        y[(b * e.length + l) * e.channels + d] = simd::dot(c_at(l), state, n);
      }
    }
  });
  return ensure_finite(std::move(y), "scan_blocked");
}

template <typename T>
Tensor<T> selective_scan(const ScanInputs<T>& in, std::size_t block) {
  return scan_blocked(discretize(in), in.x, in.c, block);
}

namespace {

// d/da of (exp(delta·a) - 1) / a, written as delta² · g(delta·a).
template <typename T>
T hold_factor_da(T delta, T a) {
  const T z = delta * a;
  const double az = std::abs(static_cast<double>(z));
  if (az < kTaylorThreshold) return delta * delta / T{2};
  T g;
  if (az < 1e-3) {
    g = T{0.5} + z / T{3} + z * z / T{8} + z * z * z / T{30};
  } else {
    g = (z * std::exp(z) - std::expm1(z)) / (z * z);
  }
  return delta * delta * g;
}

template <typename T>
T hold_factor_ddelta(T delta, T a) {
  const T z = delta * a;
  if (std::abs(static_cast<double>(z)) < kTaylorThreshold) return T{1} + z;
  return std::exp(z);
}

}  // namespace

template <typename T>
ScanGradients<T> scan_backward(const ScanInputs<T>& in, const Tensor<T>& grad_y) {
  validate(in);
  require_shape(grad_y, in.x.dims(), "scan_backward grad_y");
  const DiscretizedStep<T> step = discretize(in);
  const Tensor<T> states = scan_states(step, in.x);
  const Extents e{in.batch(), in.length(), in.channels(), in.state_dim()};

  ScanGradients<T> g{Tensor<T>(in.x.dims()), Tensor<T>(in.delta.dims()), Tensor<T>(in.b.dims()),
                     Tensor<T>(in.c.dims()), Tensor<T>(in.a.dims())};
  std::vector<T> dh(e.state);

  // Lanes share grad_b, grad_c and grad_a, so they run in a fixed serial order.
  for (std::size_t b = 0; b < e.batch; ++b) {
    for (std::size_t d = 0; d < e.channels; ++d) {
      std::fill(dh.begin(), dh.end(), T{0});
      const T* arow = in.a.raw() + d * e.state;
      for (std::size_t l = e.length; l-- > 0;) {
        const std::size_t xo = (b * e.length + l) * e.channels + d;
        const std::size_t vo = (b * e.length + l) * e.state;
        const std::size_t so = state_offset(e, b, l, d);
        const T gy = grad_y[xo];
        const T xl = in.x[xo];
        const T dt = in.delta[xo];
        const T* h = states.raw() + so;
        const T* h_prev = l > 0 ? states.raw() + state_offset(e, b, l - 1, d) : nullptr;

        T grad_x{0};
        T grad_dt{0};
        for (std::size_t n = 0; n < e.state; ++n) {
          g.c[vo + n] += gy * h[n];
          dh[n] += in.c[vo + n] * gy;

          const T abar = step.abar[so + n];
          const T hold = hold_factor(dt, arow[n]);
          grad_x += dh[n] * step.bbar[so + n];

          const T d_abar = h_prev ? dh[n] * h_prev[n] : T{0};
          const T d_bbar = dh[n] * xl;
          g.b[vo + n] += d_bbar * hold;
          const T d_hold = d_bbar * in.b[vo + n];

          grad_dt += d_abar * arow[n] * abar + d_hold * hold_factor_ddelta(dt, arow[n]);
          g.a[d * e.state + n] += d_abar * dt * abar + d_hold * hold_factor_da(dt, arow[n]);

          dh[n] *= abar;  // carry to position l-1
        }
        g.x[xo] = grad_x;
        g.delta[xo] = grad_dt;
      }
    }
  }
  return g;
}

#define BSM_INSTANTIATE_SSM(T)                                                                \
  template void validate(const ScanInputs<T>&);                                               \
  template T hold_factor(T, T);                                                               \
  template std::pair<T, T> zoh_coefficients(T, T);                                            \
  template DiscretizedStep<T> discretize(const ScanInputs<T>&);                               \
  template Tensor<T> scan_sequential(const DiscretizedStep<T>&, const Tensor<T>&,             \
                                     const Tensor<T>&);                                       \
  template Tensor<T> scan_states(const DiscretizedStep<T>&, const Tensor<T>&);                \
  template Tensor<T> materialized_operator(const DiscretizedStep<T>&, const Tensor<T>&,       \
                                           std::size_t, std::size_t, std::size_t);            \
  template Tensor<T> scan_materialized(const DiscretizedStep<T>&, const Tensor<T>&,           \
                                       const Tensor<T>&, std::size_t);                        \
  template Tensor<T> scan_blocked(const DiscretizedStep<T>&, const Tensor<T>&,                \
                                  const Tensor<T>&, std::size_t);                             \
  template Tensor<T> selective_scan(const ScanInputs<T>&, std::size_t);                       \
  template ScanGradients<T> scan_backward(const ScanInputs<T>&, const Tensor<T>&);

BSM_INSTANTIATE_SSM(float)
BSM_INSTANTIATE_SSM(double)

}  // namespace bsm::ssm
