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

#include <span>
#include <stdexcept>
#include <utility>

#include "cobets/core/cost_vector.hpp"

namespace cobets {

struct StepOutcome {
  double reward = 0.0;
  CostVector cost;
};

struct DiscountedReturn {
  double reward = 0.0;
  CostVector cost;
};

/// Sum_t gamma^t (r_t, c_t). An empty trajectory yields zeros of dimension
/// cost_dim.
inline DiscountedReturn discounted_return(std::span<const StepOutcome> steps,
                                          double gamma,
                                          std::size_t cost_dim = 1) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("discount must lie strictly inside (0, 1)");
  }
  DiscountedReturn out{0.0, CostVector::zeros(
                                steps.empty() ? cost_dim : steps[0].cost.size())};
  double weight = 1.0;
  for (const StepOutcome& s : steps) {
    out.reward += weight * s.reward;
    out.cost += s.cost * weight;
    weight *= gamma;
  }
  return out;
}

inline double discount_power(double gamma, int tau) {
  double g = 1.0;
  for (int i = 0; i < tau; ++i) g *= gamma;
  return g;
}

/// (budget - cost) / gamma^tau without clamping. This is the form used for
/// budgets handed down inside the search tree.
inline Budget propagate_budget_unclamped(const Budget& budget,
                                         const CostVector& cost, double gamma,
                                         int tau) {
  if (tau < 1) throw std::invalid_argument("propagate_budget: tau must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("discount must lie strictly inside (0, 1)");
  }
  return (budget - as_budget(cost)) / discount_power(gamma, tau);
}

/// [(budget - cost) / gamma^tau]^+, the executor's per-step budget update.
inline Budget propagate_budget(const Budget& budget, const CostVector& cost,
                               double gamma, int tau = 1) {
  return clamp_positive(propagate_budget_unclamped(budget, cost, gamma, tau));
}

}  // namespace cobets
