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


#include "lacuna/autodiff/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace lacuna::ad {

template <typename T>
AdamState<T> make_adam_state(const ParameterStore<T>& params, AdamConfig config) {
  AdamState<T> state;
  state.config = config;
  for (const auto& p : params) {
    state.m.emplace_back(p.value.shape);
    state.v.emplace_back(p.value.shape);
  }
  return state;
}

template <typename T>
void adam_step(ParameterStore<T>& params, AdamState<T>& state) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw std::invalid_argument("optimizer state does not match parameter store");
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correct1 = 1.0 - std::pow(c.beta1, t);
  const double correct2 = 1.0 - std::pow(c.beta2, t);
  for (size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    auto& m = state.m[i].data;
    auto& v = state.v[i].data;
    if (m.size() != p.value.size()) throw ShapeError("moment shape mismatch for " + p.name);
    for (size_t j = 0; j < m.size(); ++j) {
      const double g = p.grad.data[j];
      const double mj = c.beta1 * m[j] + (1.0 - c.beta1) * g;
      const double vj = c.beta2 * v[j] + (1.0 - c.beta2) * g * g;
      m[j] = static_cast<T>(mj);
      v[j] = static_cast<T>(vj);
      const double update = c.learning_rate * (mj / correct1) / (std::sqrt(vj / correct2) + c.epsilon);
      p.value.data[j] = static_cast<T>(p.value.data[j] - update);
    }
  }
}

template <typename T>
double global_norm(const std::vector<const Tensor<T>*>& grads) {
  double sq = 0.0;
  for (const auto* g : grads) {
    for (T x : g->data) sq += static_cast<double>(x) * static_cast<double>(x);
  }
  return std::sqrt(sq);
}

template <typename T>
double clip_global_norm(const std::vector<Tensor<T>*>& grads, double max_norm) {
  if (!(max_norm > 0)) throw std::invalid_argument("max_norm must be positive");
  std::vector<const Tensor<T>*> view(grads.begin(), grads.end());
  const double norm = global_norm(view);
  if (!std::isfinite(norm)) throw NonFiniteError("non-finite gradient norm");
  if (norm > max_norm) {
    const T scale = static_cast<T>(max_norm / norm);
    for (auto* g : grads) {
      for (T& x : g->data) x *= scale;
    }
  }
  return norm;
}

template <typename T>
double clip_global_norm(ParameterStore<T>& params, double max_norm) {
  std::vector<Tensor<T>*> grads;
  for (auto& p : params) grads.push_back(&p.grad);
  return clip_global_norm(grads, max_norm);
}

#define LACUNA_INSTANTIATE(T)                                                        \
  template AdamState<T> make_adam_state<T>(const ParameterStore<T>&, AdamConfig);    \
  template void adam_step<T>(ParameterStore<T>&, AdamState<T>&);                     \
  template double global_norm<T>(const std::vector<const Tensor<T>*>&);              \
  template double clip_global_norm<T>(const std::vector<Tensor<T>*>&, double);       \
  template double clip_global_norm<T>(ParameterStore<T>&, double);

LACUNA_INSTANTIATE(float)
LACUNA_INSTANTIATE(double)
#undef LACUNA_INSTANTIATE

}  // namespace lacuna::ad
