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


#ifndef LACUNA_AUTODIFF_GRADCHECK_HPP_
#define LACUNA_AUTODIFF_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "lacuna/autodiff/graph.hpp"
#include "lacuna/autodiff/parameters.hpp"

namespace lacuna::ad {

struct GradCheckResult {
  double max_rel_error = 0.0;
  double analytic = 0.0;  // at the worst coordinate
  double numeric = 0.0;
  std::string where;      // parameter name or "x", plus index
  size_t coordinates = 0;
};

// |a - n| / max(|a|, |n|, floor). The floor keeps coordinates whose true
// derivative is zero from dividing rounding noise by ~0.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

// Scalar-valued function of one tensor, built on a fresh graph per call.
using TensorFunction = std::function<Var(Graph<double>&, Var)>;
// Scalar-valued function of the parameters in a store.
using ParameterFunction = std::function<Var(Graph<double>&)>;

// Central differences on every coordinate of x against backward().
inline GradCheckResult finite_difference_check(const TensorFunction& f, const Tensor<double>& x, double h = 1e-5) {
  Tensor<double> analytic;
  {
    Graph<double> g(Mode::kInference);
    g.set_grad_enabled(true);
    Var in = g.input(x, true);
    Var out = f(g, in);
    g.backward(out);
    analytic = g.grad(in);
  }
  auto eval = [&](const Tensor<double>& point) {
    Graph<double> g(Mode::kInference);
    return g.value(f(g, g.constant(point))).data[0];
  };
  GradCheckResult result;
  Tensor<double> probe = x;
  for (size_t i = 0; i < x.size(); ++i) {
    probe.data[i] = x.data[i] + h;
    const double up = eval(probe);
    probe.data[i] = x.data[i] - h;
    const double down = eval(probe);
    probe.data[i] = x.data[i];
    const double numeric = (up - down) / (2 * h);
    const double err = relative_error(analytic.data[i], numeric);
    ++result.coordinates;
    if (err >= result.max_rel_error) {
      result = {err, analytic.data[i], numeric, "x[" + std::to_string(i) + "]", result.coordinates};
    }
  }
  return result;
}

// Same check over every scalar of every parameter. The function must be
// deterministic; stochastic pieces have to be frozen by the caller.
inline GradCheckResult finite_difference_check(ParameterStore<double>& params, const ParameterFunction& f,
                                               double h = 1e-5) {
  params.zero_grad();
  {
    Graph<double> g(Mode::kInference);
    g.set_grad_enabled(true);
    g.backward(f(g));
  }
  auto eval = [&]() {
    Graph<double> g(Mode::kInference);
    return g.value(f(g)).data[0];
  };
  GradCheckResult result;
  for (auto& p : params) {
    for (size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value.data[i];
      p.value.data[i] = saved + h;
      const double up = eval();
      p.value.data[i] = saved - h;
      const double down = eval();
      p.value.data[i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double err = relative_error(p.grad.data[i], numeric);
      ++result.coordinates;
      if (err >= result.max_rel_error) {
        result = {err, p.grad.data[i], numeric, p.name + "[" + std::to_string(i) + "]", result.coordinates};
      }
    }
  }
  return result;
}

}  // namespace lacuna::ad

#endif  // LACUNA_AUTODIFF_GRADCHECK_HPP_
