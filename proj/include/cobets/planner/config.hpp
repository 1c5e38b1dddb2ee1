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

#include <stdexcept>
#include <vector>

namespace cobets {

/// Search hyperparameters. Depths count underlying environment steps.
struct PlannerConfig {
  int queries = 1000;             // tree queries per decision
  int max_depth = 40;             // lookahead in underlying steps
  double exploration = 1.0;       // UCB constant
  double option_k = 4.0;          // option widening: |C(b)| <= k N(b)^alpha
  double option_alpha = 0.5;
  double transition_k = 4.0;      // transition widening on C(b a)
  double transition_alpha = 0.3;
  std::size_t particles = 100;    // particles per belief node
  std::vector<double> dual_init;  // initial multipliers; empty means zero
  double dual_step = 1.0;         // alpha_i = dual_step / sqrt(i)
  bool warm_start_dual = true;    // carry lambda across decisions
  int rollout_depth = -1;         // cap on leaf rollout depth; < 0: none
  bool record_steps = false;      // keep raw per-step outcomes on transitions

  void validate(std::size_t cost_dim) const {
    if (queries < 1) throw std::invalid_argument("queries must be >= 1");
    if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    if (exploration < 0.0) {
      throw std::invalid_argument("exploration must be >= 0");
    }
    if (!(option_k > 0.0) || !(transition_k > 0.0)) {
      throw std::invalid_argument("widening k must be > 0");
    }
    if (!(option_alpha > 0.0 && option_alpha < 1.0) ||
        !(transition_alpha > 0.0 && transition_alpha < 1.0)) {
      throw std::invalid_argument("widening alpha must lie in (0, 1)");
    }
    if (particles < 1) throw std::invalid_argument("particles must be >= 1");
    if (!dual_init.empty() && dual_init.size() != cost_dim) {
      throw std::invalid_argument("dual_init dimension mismatch");
    }
    for (double l : dual_init) {
      if (l < 0.0) throw std::invalid_argument("dual_init must be >= 0");
    }
    if (!(dual_step > 0.0)) throw std::invalid_argument("dual_step must be > 0");
  }
};

}  // namespace cobets
