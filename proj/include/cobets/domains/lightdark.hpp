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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cobets/belief/particle_belief.hpp"
#include "cobets/core/model.hpp"
#include "cobets/options/option.hpp"

namespace cobets::lightdark {

struct State {
  double position = 0.0;
  bool terminal = false;

  friend bool operator==(const State&, const State&) = default;
};

using Action = int;
using Observation = double;
using Belief = ParticleBelief<State>;
using Option = OptionSpec<State, Action>;
using Options = OptionSet<State, Action>;

inline constexpr std::array<Action, 7> kActions = {0, -1, 1, -5, 5, -10, 10};

struct Params {
  double discount = 0.95;
  double budget = 0.1;
  double goal_half_width = 1.0;    // goal region [-w, w]
  double goal_reward = 100.0;
  double miss_penalty = -100.0;
  double step_reward = -1.0;
  double light_location = 10.0;
  double constraint_threshold = 12.0;  // cost incurred strictly above this
  double constraint_cost = 1.0;
  double sigma_floor = 0.1;        // sigma(s) = |s - light| + floor
  double initial_mean = 2.0;
  double initial_std = 2.0;
  double rescue_jitter = 0.1;      // std of the depletion-rescue jitter
};

/// One-dimensional constrained localization problem. Motion is
/// deterministic; observations are Gaussian with noise that grows linearly
/// with distance from the light.
class Model {
 public:
  using State = lightdark::State;
  using Action = lightdark::Action;
  using Observation = lightdark::Observation;

  explicit Model(Params params = {});

  const Params& params() const { return params_; }
  const ProblemSpec& problem() const { return problem_; }
  std::vector<Action> actions() const {
    return {kActions.begin(), kActions.end()};
  }
  bool is_terminal(const State& s) const { return s.terminal; }

  GenerativeStep<State, Observation> step(const State& s, Action a,
                                          Rng& rng) const;
  double observation_density(Action a, const State& next,
                             Observation o) const;
  State sample_initial_state(Rng& rng) const;
  State jitter(const State& s, Rng& rng) const;

  /// Observation standard deviation at a position.
  double sigma(double position) const;

 private:
  Params params_;
  ProblemSpec problem_;
};

/// Weighted mean and spread of the particle positions.
ScalarStats position_stats(const Belief& b);

struct OptionParams {
  double localize_threshold = 0.3;  // localizers stop once spread < this
  double safe_margin = 2.0;         // LocalizeSafe keeps mean + margin*spread <= threshold
  double feasible_theta_low = 0.3;  // the two LocalizeSafe thresholds of the
  double feasible_theta_high = 0.6; // feasible catalog
  double sweep_theta_min = 0.1;     // range for uncertainty-sampled variants
  double sweep_theta_max = 0.6;
  std::uint64_t sweep_seed = 7;
};

enum class CatalogKind {
  kBase,          // GoToGoal, LocalizeFast, LocalizeFromBelow, LocalizeSafe
  kFeasible,      // GoToGoal and two LocalizeSafe variants
  kPrimitive,     // one-step option per primitive action
  kUncertainty,   // base + LocalizeSafe variants with sampled thresholds
  kRandomMacro,   // base + three-random-action macro options
};

struct Catalog {
  CatalogKind kind = CatalogKind::kBase;
  std::size_t size = 4;  // total option count for the sweep kinds
};

/// Parses "base4", "feasible3", "primitive", "uncertainty:N", "random:N".
Catalog parse_catalog(const std::string& text);
std::string to_string(const Catalog& c);

// Option templates. Each controller acts on the belief's mean position and,
// where stated, its spread.
Option go_to_goal(const Params& p);
Option localize_fast(const Params& p, double threshold);
Option localize_from_below(const Params& p, double threshold);
Option localize_safe(const Params& p, double threshold, double margin,
                     std::string label = "LocalizeSafe");
Option random_macro(const std::array<Action, 3>& actions);

Options make_options(const Catalog& catalog, const Params& p,
                     const OptionParams& op = {});

}  // namespace cobets::lightdark
