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

#include <concepts>
#include <stdexcept>
#include <vector>

#include "cobets/core/cost_vector.hpp"
#include "cobets/core/rng.hpp"

namespace cobets {

/// One draw from the generative model: s' ~ T(s, a), o ~ Z(s'), R, C.
template <typename State, typename Observation>
struct GenerativeStep {
  State next_state;
  Observation observation;
  double reward = 0.0;
  CostVector cost;
};

/// Problem-level constants shared by the planner and the executor.
struct ProblemSpec {
  double discount = 0.95;
  Budget budget;

  std::size_t cost_dim() const { return budget.size(); }

  void validate() const {
    if (!(discount > 0.0 && discount < 1.0)) {
      throw std::invalid_argument("discount must lie strictly inside (0, 1)");
    }
    if (budget.empty()) {
      throw std::invalid_argument("budget must have at least one channel");
    }
  }
};

// A sampling-only constrained POMDP. Terminal states must be absorbing with
// zero reward and cost. observation_density is needed for particle weighting
// and jitter for the particle-depletion rescue.
template <typename M>
concept GenerativeModel =
    requires(const M& m, const typename M::State& s,
             const typename M::Action& a, const typename M::Observation& o,
             Rng& rng) {
      { m.problem() } -> std::convertible_to<const ProblemSpec&>;
      { m.actions() } -> std::convertible_to<std::vector<typename M::Action>>;
      { m.is_terminal(s) } -> std::convertible_to<bool>;
      {
        m.step(s, a, rng)
      } -> std::same_as<
          GenerativeStep<typename M::State, typename M::Observation>>;
      { m.observation_density(a, s, o) } -> std::convertible_to<double>;
      { m.sample_initial_state(rng) } -> std::same_as<typename M::State>;
      { m.jitter(s, rng) } -> std::same_as<typename M::State>;
    };

}  // namespace cobets
