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
#include <limits>
#include <memory>
#include <vector>

#include "cobets/belief/particle_belief.hpp"
#include "cobets/core/model.hpp"
#include "cobets/options/option.hpp"

// A six-state chain small enough to solve exactly. The robot advances along
// positions 0..5 (5 is an absorbing goal). The safe action advances one
// position; the risky one advances two but may slip in place, which costs.
// A binary sensor reports, with some accuracy, whether the robot is past the
// midpoint.
namespace cobets::minichain {

using State = int;
using Action = int;
using Observation = int;
using Belief = ParticleBelief<State>;
using Options = OptionSet<State, Action>;

inline constexpr Action kRisky = 0;
inline constexpr Action kSafe = 1;
inline constexpr int kNumStates = 6;
inline constexpr int kGoal = kNumStates - 1;
inline constexpr int kNumObservations = 2;

using Distribution = std::array<double, kNumStates>;

struct Params {
  double slip = 0.3;
  double slip_cost = 1.0;
  double goal_reward = 1.0;
  double step_reward = 0.0;
  double sensor_accuracy = 0.85;
  int sensor_boundary = 3;  // o = 1 means "position >= boundary"
  double discount = 0.9;
  double budget = 0.05;
  int horizon = 6;
  Distribution initial = {0.5, 0.5, 0.0, 0.0, 0.0, 0.0};
};

class Model {
 public:
  using State = minichain::State;
  using Action = minichain::Action;
  using Observation = minichain::Observation;

  explicit Model(Params params = {});

  const Params& params() const { return params_; }
  const ProblemSpec& problem() const { return problem_; }
  std::vector<Action> actions() const { return {kRisky, kSafe}; }
  bool is_terminal(State s) const { return s == kGoal; }

  GenerativeStep<State, Observation> step(State s, Action a, Rng& rng) const;
  double observation_density(Action a, State next, Observation o) const;
  State sample_initial_state(Rng& rng) const;
  State jitter(State s, Rng&) const { return s; }

  // Exact tables.
  double transition(State s, Action a, State next) const;
  double reward(State s, Action a, State next) const;
  double cost(State s, Action a, State next) const;
  double observation_prob(State next, Observation o) const;

 private:
  Params params_;
  ProblemSpec problem_;
};

/// Deterministic history-dependent policy: an action and, per observation,
/// the subtree followed afterwards (null past the horizon).
struct PolicyNode {
  Action action = kSafe;
  std::array<std::shared_ptr<const PolicyNode>, kNumObservations> next;
};

struct ExactSolution {
  double value = -std::numeric_limits<double>::infinity();
  double cost = 0.0;
  Action root_action = kSafe;
  std::shared_ptr<const PolicyNode> policy;
  bool feasible = false;
};

// Exact belief-space quantities.
double expected_reward(const Model& m, const Distribution& b, Action a);
double expected_cost(const Model& m, const Distribution& b, Action a);
double observation_likelihood(const Model& m, const Distribution& b, Action a,
                              Observation o);
Distribution bayes_update(const Model& m, const Distribution& b, Action a,
                          Observation o);
Distribution to_distribution(const Belief& b);

/// Constrained-optimal deterministic policy by exhaustive expectimax over
/// history trees. Each belief node keeps the Pareto frontier of achievable
/// (value, cost) pairs; the best point with cost <= budget is returned.
ExactSolution minichain_exact_solve(
    const Model& m, double budget = std::numeric_limits<double>::infinity(),
    int horizon = -1);

/// Independent evaluator: expected discounted (reward, cost) of a policy tree,
/// by forward enumeration over state and observation sequences.
std::pair<double, double> evaluate_policy(const Model& m,
                                          const PolicyNode& policy,
                                          int horizon);

/// Enumerates every deterministic policy tree (horizon <= 4).
ExactSolution brute_force_solve(const Model& m, double budget, int horizon);

/// Value of choosing uniformly at random between the two actions for depth
/// steps from an initial distribution.
std::pair<double, double> uniform_random_value(const Model& m,
                                               const Distribution& b,
                                               int depth);

/// Open-loop policy repeating one action.
std::shared_ptr<const PolicyNode> constant_policy(Action a, int horizon);

Options primitive_options();

}  // namespace cobets::minichain
