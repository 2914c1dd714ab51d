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

#ifndef LACUNA_AUTODIFF_PARAMETERS_HPP_
#define LACUNA_AUTODIFF_PARAMETERS_HPP_

#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lacuna/autodiff/tensor.hpp"

namespace lacuna::ad {

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;  // same shape as value, accumulated by backward passes
};

// Named tensors in insertion order. References returned by add() and get()
// stay valid for the store's lifetime.
template <typename T>
class ParameterStore {
 public:
  Parameter<T>& add(std::string name, Shape shape) {
    if (index_.contains(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
    index_.emplace(name, params_.size());
    Tensor<T> value(shape);
    Tensor<T> grad(std::move(shape));
    params_.push_back(Parameter<T>{std::move(name), std::move(value), std::move(grad)});
    return params_.back();
  }

  bool contains(std::string_view name) const { return index_.find(name) != index_.end(); }

  Parameter<T>& get(std::string_view name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("no parameter named '" + std::string(name) + "'");
    return params_[it->second];
  }
  const Parameter<T>& get(std::string_view name) const {
    return const_cast<ParameterStore*>(this)->get(name);
  }

  size_t size() const { return params_.size(); }
  Parameter<T>& operator[](size_t i) { return params_[i]; }
  const Parameter<T>& operator[](size_t i) const { return params_[i]; }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  size_t scalar_count() const {
    size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
  }

  void zero_grad() {
    for (auto& p : params_) p.grad.fill(T(0));
  }

  template <typename U>
  ParameterStore<U> cast() const {
    ParameterStore<U> out;
    for (const auto& p : params_) {
      auto& q = out.add(p.name, p.value.shape);
      q.value = p.value.template cast<U>();
    }
    return out;
  }

 private:
  std::deque<Parameter<T>> params_;
  std::map<std::string, size_t, std::less<>> index_;
};

}  // namespace lacuna::ad

#endif  // LACUNA_AUTODIFF_PARAMETERS_HPP_
