/*
 * Copyright 2026 The COBeTS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cobets/core/cost_vector.hpp"

namespace cobets {

struct DualState {
  Multipliers lambda;
  int iteration = 0;
};

/// Projected dual ascent: lambda <- [lambda + alpha (Q_C - c)]^+.
inline DualState dual_update(DualState d, const CostVector& q_cost,
                             const Budget& budget, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("dual step must be > 0");
  if (q_cost.size() != d.lambda.size() || budget.size() != d.lambda.size()) {
    throw std::invalid_argument("cost dimension mismatch");
  }
  for (std::size_t k = 0; k < d.lambda.size(); ++k) {
    d.lambda[k] = std::max(0.0, d.lambda[k] + alpha * (q_cost[k] - budget[k]));
  }
  ++d.iteration;
  return d;
}

/// Diminishing schedule alpha_i = alpha_0 / sqrt(i), i >= 1.
inline double dual_step_size(double alpha0, int i) {
  return alpha0 / std::sqrt(static_cast<double>(std::max(i, 1)));
}

}  // namespace cobets
