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


#ifndef LACUNA_AUTODIFF_OPTIM_HPP_
#define LACUNA_AUTODIFF_OPTIM_HPP_

#include <cstdint>
#include <vector>

#include "lacuna/autodiff/parameters.hpp"
#include "lacuna/autodiff/tensor.hpp"

namespace lacuna::ad {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  AdamConfig config;
  int64_t step = 0;
  std::vector<Tensor<T>> m;  // one per parameter, store order
  std::vector<Tensor<T>> v;
};

template <typename T>
AdamState<T> make_adam_state(const ParameterStore<T>& params, AdamConfig config = {});

// One bias-corrected Adam update from the accumulated gradients. Moments are
// kept in double regardless of T so the float and double paths agree closely.
template <typename T>
void adam_step(ParameterStore<T>& params, AdamState<T>& state);

template <typename T>
double global_norm(const std::vector<const Tensor<T>*>& grads);

// Rescales the tensors in place when their joint L2 norm exceeds max_norm.
// Returns the norm measured before scaling. Throws NonFiniteError on NaN/inf.
template <typename T>
double clip_global_norm(const std::vector<Tensor<T>*>& grads, double max_norm);

template <typename T>
double clip_global_norm(ParameterStore<T>& params, double max_norm);

}  // namespace lacuna::ad

#endif  // LACUNA_AUTODIFF_OPTIM_HPP_
