// Copyright 2026 The Lacuna Authors.
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

#ifndef LACUNA_AUTODIFF_TENSOR_HPP_
#define LACUNA_AUTODIFF_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace lacuna::ad {

using Shape = std::vector<int>;

std::string shape_string(const Shape& shape);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense row-major tensor. Most operations view it as a matrix whose column
// count is the last dimension.
template <typename T>
struct Tensor {
  Shape shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(Shape s, T fill = T(0)) : shape(std::move(s)), data(count(shape), fill) {}
  Tensor(int rows, int cols, T fill = T(0)) : Tensor(Shape{rows, cols}, fill) {}
  Tensor(Shape s, std::vector<T> values) : shape(std::move(s)), data(std::move(values)) {
    if (data.size() != count(shape)) {
      throw ShapeError("tensor of shape " + shape_string(shape) + " given " +
                       std::to_string(data.size()) + " values");
    }
  }

  static size_t count(const Shape& s) {
    return std::accumulate(s.begin(), s.end(), size_t{1},
                           [](size_t acc, int d) { return acc * static_cast<size_t>(d); });
  }

  size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  int cols() const { return shape.empty() ? 1 : shape.back(); }
  int rows() const { return cols() == 0 ? 0 : static_cast<int>(size() / static_cast<size_t>(cols())); }

  T& at(int r, int c) { return data[static_cast<size_t>(r) * static_cast<size_t>(cols()) + static_cast<size_t>(c)]; }
  const T& at(int r, int c) const {
    return data[static_cast<size_t>(r) * static_cast<size_t>(cols()) + static_cast<size_t>(c)];
  }
  T* row(int r) { return data.data() + static_cast<size_t>(r) * static_cast<size_t>(cols()); }
  const T* row(int r) const { return data.data() + static_cast<size_t>(r) * static_cast<size_t>(cols()); }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.assign(data.begin(), data.end());
    return out;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

}  // namespace lacuna::ad

#endif  // LACUNA_AUTODIFF_TENSOR_HPP_
