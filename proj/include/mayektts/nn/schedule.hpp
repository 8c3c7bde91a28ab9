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

// Learning-rate schedule and the training hyperparameters this toolchain
// records. No training loop exists here; these are configuration constants
// plus the decay curve itself.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "mayektts/common.hpp"

namespace mayektts::nn {

struct LrSchedule {
  double initial = 1e-3;      // A
  double decay = 5000.0;      // B, iterations per e-fold
  double floor = 1e-5;        // C
  uint64_t decay_start = 0;

  void check() const {
    if (!(initial > 0.0) || !(decay > 0.0) || !(floor >= 0.0) || floor > initial) {
      throw Error(ErrorCode::BadConfig, "lr schedule: need 0 <= C <= A, B > 0");
    }
  }
};

// rate(t) = A                                  for t < decay_start
//         = max(C, A * exp(-(t - decay_start)/B))  otherwise
inline double lr_at(const LrSchedule& s, uint64_t iteration) {
  s.check();
  if (iteration < s.decay_start) return s.initial;
  const double t = static_cast<double>(iteration - s.decay_start);
  return std::max(s.floor, s.initial * std::exp(-t / s.decay));
}

// Recorded training setup. Kept as metadata: this library ships no
// optimizer, only the gradient machinery needed to verify the backward
// passes.
struct TrainingConfig {
  std::string optimizer = "adam";
  LrSchedule lr;
  uint64_t epochs = 310;
  uint64_t batch_size = 32;
};

}  // namespace mayektts::nn
