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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bsm/error.hpp"

namespace bsm {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& dims);
std::size_t shape_volume(const Shape& dims);

/// Dense row-major array. Rank 0 with no data denotes an absent tensor.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  explicit Tensor(Shape dims) : dims_(std::move(dims)), data_(checked_volume(dims_), T{0}) {}

  Tensor(Shape dims, T fill) : dims_(std::move(dims)), data_(checked_volume(dims_), fill) {}

  Tensor(Shape dims, std::vector<T> values) : dims_(std::move(dims)), data_(std::move(values)) {
    if (checked_volume(dims_) != data_.size()) {
      throw DimensionError("tensor of shape " + shape_string(dims_) + " given " +
                           std::to_string(data_.size()) + " values");
    }
  }

  const Shape& dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  T* raw() noexcept { return data_.data(); }
  const T* raw() const noexcept { return data_.data(); }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  template <typename... Idx>
  T& at(Idx... idx) {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }
  template <typename... Idx>
  const T& at(Idx... idx) const {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }

  /// Same data under new extents of equal volume.
  Tensor reshaped(Shape dims) const {
    return Tensor(std::move(dims), data_);
  }

  template <typename U>
  Tensor<U> cast() const {
    std::vector<U> out(data_.size());
    std::transform(data_.begin(), data_.end(), out.begin(),
                   [](T v) { return static_cast<U>(v); });
    return Tensor<U>(dims_, std::move(out));
  }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
  }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  static std::size_t checked_volume(const Shape& dims) {
    for (std::size_t d : dims) {
      if (d == 0) throw DimensionError("zero extent in shape " + shape_string(dims));
    }
    return dims.empty() ? 0 : shape_volume(dims);
  }

  std::size_t offset(std::initializer_list<std::size_t> idx) const {
    std::size_t off = 0;
    std::size_t axis = 0;
    for (std::size_t i : idx) off = off * dims_[axis++] + i;
    return off;
  }

  Shape dims_;
  std::vector<T> data_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

/// Throws NumericError when `t` holds NaN or Inf; otherwise returns it unchanged.
template <typename T>
Tensor<T> ensure_finite(Tensor<T> t, const char* where) {
  if (!t.all_finite()) throw NumericError(std::string(where) + ": non-finite value in result");
  return t;
}

/// Throws DimensionError unless `t` has exactly `rank` axes.
template <typename T>
void require_rank(const Tensor<T>& t, std::size_t rank, const char* where) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(where) + ": expected rank " + std::to_string(rank) +
                         ", got shape " + shape_string(t.dims()));
  }
}

template <typename T>
void require_shape(const Tensor<T>& t, const Shape& dims, const char* where) {
  if (t.dims() != dims) {
    throw DimensionError(std::string(where) + ": expected shape " + shape_string(dims) +
                         ", got " + shape_string(t.dims()));
  }
}

}  // namespace bsm
