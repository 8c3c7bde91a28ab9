// Copyright 2026 The mayek-tts Authors
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

// Finite-difference gradient verification. A check compares an analytic
// gradient against central differences of a scalar loss, using the normwise
// relative error ||ga - gn|| / max(||ga||, ||gn||, 1e-12).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mayektts/tensor.hpp"

namespace mayektts::nn {

inline constexpr double kGradCheckEps = 1e-5;
inline constexpr double kGradCheckTol = 1e-6;

inline double norm2(const Tensor& t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) acc += t[i] * t[i];
  return std::sqrt(acc);
}

inline double normwise_rel_error(const Tensor& analytic, const Tensor& numeric) {
  double diff_sq = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double d = analytic[i] - numeric[i];
    diff_sq += d * d;
  }
  const double scale = std::max({norm2(analytic), norm2(numeric), 1e-12});
  return std::sqrt(diff_sq) / scale;
}

// Central differences of `loss` with respect to the entries of `param`.
// `loss` must read the current contents of `param` on every call.
inline Tensor numeric_gradient(Tensor& param, const std::function<double()>& loss,
                               double eps = kGradCheckEps) {
  Tensor grad(param.shape());
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double saved = param[i];
    param[i] = saved + eps;
    const double up = loss();
    param[i] = saved - eps;
    const double down = loss();
    param[i] = saved;
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

struct GradCheckEntry {
  std::string name;
  double rel_error;
};

// Checks one analytic gradient; returns the named relative error.
inline GradCheckEntry check_gradient(const std::string& name, Tensor& param,
                                     const std::function<double()>& loss,
                                     const Tensor& analytic, double eps = kGradCheckEps) {
  const Tensor numeric = numeric_gradient(param, loss, eps);
  return {name, normwise_rel_error(analytic, numeric)};
}

}  // namespace mayektts::nn
