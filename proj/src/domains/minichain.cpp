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

#include "cobets/domains/minichain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace cobets::minichain {

Model::Model(Params params) : params_(params) {
  problem_.discount = params_.discount;
  problem_.budget = Budget{params_.budget};
  problem_.validate();
  double total = 0.0;
  for (double p : params_.initial) total += p;
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("minichain: initial distribution must sum to 1");
  }
}

double Model::transition(State s, Action a, State next) const {
  if (s == kGoal) return next == kGoal ? 1.0 : 0.0;
  if (a == kSafe) return next == s + 1 ? 1.0 : 0.0;
  const State advanced = std::min(s + 2, kGoal);
  double p = 0.0;
  if (next == advanced) p += 1.0 - params_.slip;
  if (next == s) p += params_.slip;
  return p;
}

double Model::reward(State s, Action /*a*/, State next) const {
  if (s == kGoal) return 0.0;
  return next == kGoal ? params_.goal_reward : params_.step_reward;
}

double Model::cost(State s, Action a, State next) const {
  return (s != kGoal && a == kRisky && next == s) ? params_.slip_cost : 0.0;
}

double Model::observation_prob(State next, Observation o) const {
  const bool past = next >= params_.sensor_boundary;
  const double p_one = past ? params_.sensor_accuracy : 1.0 - params_.sensor_accuracy;
  return o == 1 ? p_one : 1.0 - p_one;
}

GenerativeStep<State, Observation> Model::step(State s, Action a,
                                               Rng& rng) const {
  if (a != kRisky && a != kSafe) {
    throw std::invalid_argument("minichain: invalid action");
  }
  GenerativeStep<State, Observation> out;
  State next = s;
  if (s != kGoal) {
    if (a == kSafe) {
      next = s + 1;
    } else {
      next = uniform01(rng) < params_.slip ? s : std::min(s + 2, kGoal);
    }
  }
  out.next_state = next;
  out.reward = reward(s, a, next);
  out.cost = CostVector{cost(s, a, next)};
  out.observation = uniform01(rng) < observation_prob(next, 1) ? 1 : 0;
  return out;
}

double Model::observation_density(Action /*a*/, State next,
                                  Observation o) const {
  return observation_prob(next, o);
}

State Model::sample_initial_state(Rng& rng) const {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (State s = 0; s < kNumStates; ++s) {
    acc += params_.initial[s];
    if (u < acc) return s;
  }
  return kNumStates - 1;
}

double expected_reward(const Model& m, const Distribution& b, Action a) {
  double r = 0.0;
  for (State s = 0; s < kNumStates; ++s) {
    for (State n = 0; n < kNumStates; ++n) {
      r += b[s] * m.transition(s, a, n) * m.reward(s, a, n);
    }
  }
  return r;
}

double expected_cost(const Model& m, const Distribution& b, Action a) {
  double c = 0.0;
  for (State s = 0; s < kNumStates; ++s) {
    for (State n = 0; n < kNumStates; ++n) {
      c += b[s] * m.transition(s, a, n) * m.cost(s, a, n);
    }
  }
  return c;
}

double observation_likelihood(const Model& m, const Distribution& b, Action a,
                              Observation o) {
  double p = 0.0;
  for (State s = 0; s < kNumStates; ++s) {
    for (State n = 0; n < kNumStates; ++n) {
      p += b[s] * m.transition(s, a, n) * m.observation_prob(n, o);
    }
  }
  return p;
}

Distribution bayes_update(const Model& m, const Distribution& b, Action a,
                          Observation o) {
  Distribution post{};
  double total = 0.0;
  for (State n = 0; n < kNumStates; ++n) {
    double p = 0.0;
    for (State s = 0; s < kNumStates; ++s) p += b[s] * m.transition(s, a, n);
    post[n] = p * m.observation_prob(n, o);
    total += post[n];
  }
  if (total > 0.0) {
    for (double& p : post) p /= total;
  }
  return post;
}

Distribution to_distribution(const Belief& b) {
  Distribution d{};
  for (std::size_t i = 0; i < b.size(); ++i) d[b.particle(i)] += b.weight(i);
  return d;
}

namespace {

bool is_terminal_belief(const Distribution& b) { return b[kGoal] >= 1.0 - 1e-15; }

struct FrontierPoint {
  double value = 0.0;
  double cost = 0.0;
  std::shared_ptr<const PolicyNode> policy;
};

using Frontier = std::vector<FrontierPoint>;

// Keeps the points not dominated in (higher value, lower cost).
Frontier prune(Frontier f) {
  std::sort(f.begin(), f.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.value > b.value;
  });
  Frontier out;
  for (auto& p : f) {
    if (out.empty() || p.value > out.back().value + 1e-12) {
      out.push_back(std::move(p));
    }
  }
  return out;
}

Frontier solve_frontier(const Model& m, const Distribution& b, int h) {
  if (h <= 0 || is_terminal_belief(b)) return {FrontierPoint{}};
  const double gamma = m.params().discount;
  Frontier all;
  for (Action a : {kRisky, kSafe}) {
    const double r = expected_reward(m, b, a);
    const double c = expected_cost(m, b, a);
    std::array<double, kNumObservations> p_obs{};
    std::array<Frontier, kNumObservations> child;
    for (Observation o = 0; o < kNumObservations; ++o) {
      p_obs[o] = observation_likelihood(m, b, a, o);
      child[o] = p_obs[o] > 0.0 ? solve_frontier(m, bayes_update(m, b, a, o), h - 1)
                                : Frontier{FrontierPoint{}};
    }
    Frontier combos;
    for (const auto& p0 : child[0]) {
      for (const auto& p1 : child[1]) {
        auto node = std::make_shared<PolicyNode>();
        node->action = a;
        node->next = {p0.policy, p1.policy};
        combos.push_back(
            {r + gamma * (p_obs[0] * p0.value + p_obs[1] * p1.value),
             c + gamma * (p_obs[0] * p0.cost + p_obs[1] * p1.cost), node});
      }
    }
    combos = prune(std::move(combos));
    all.insert(all.end(), combos.begin(), combos.end());
  }
  return prune(std::move(all));
}

ExactSolution best_feasible(const Frontier& f, double budget) {
  ExactSolution s;
  for (const auto& p : f) {
    if (p.cost <= budget + 1e-12 && p.value > s.value) {
      s.value = p.value;
      s.cost = p.cost;
      s.policy = p.policy;
      s.root_action = p.policy ? p.policy->action : kSafe;
      s.feasible = true;
    }
  }
  return s;
}

}  // namespace

ExactSolution minichain_exact_solve(const Model& m, double budget, int horizon) {
  if (horizon < 0) horizon = m.params().horizon;
  if (horizon > 6) {
    throw std::invalid_argument("minichain_exact_solve: horizon must be <= 6");
  }
  return best_feasible(solve_frontier(m, m.params().initial, horizon), budget);
}

std::pair<double, double> evaluate_policy(const Model& m,
                                          const PolicyNode& policy,
                                          int horizon) {
  const double gamma = m.params().discount;
  // Sum over hidden state trajectories: at each step the pair (s, node)
  // fully determines what happens next.
  std::function<std::pair<double, double>(State, const PolicyNode*, int)> run =
      [&](State s, const PolicyNode* node, int h) -> std::pair<double, double> {
    if (h <= 0 || node == nullptr || s == kGoal) return {0.0, 0.0};
    double v = 0.0;
    double c = 0.0;
    for (State n = 0; n < kNumStates; ++n) {
      const double pt = m.transition(s, node->action, n);
      if (pt == 0.0) continue;
      v += pt * m.reward(s, node->action, n);
      c += pt * m.cost(s, node->action, n);
      for (Observation o = 0; o < kNumObservations; ++o) {
        const double po = m.observation_prob(n, o);
        if (po == 0.0) continue;
        const auto [vn, cn] = run(n, node->next[o].get(), h - 1);
        v += gamma * pt * po * vn;
        c += gamma * pt * po * cn;
      }
    }
    return {v, c};
  };
  double v = 0.0;
  double c = 0.0;
  for (State s = 0; s < kNumStates; ++s) {
    if (m.params().initial[s] == 0.0) continue;
    const auto [vs, cs] = run(s, &policy, horizon);
    v += m.params().initial[s] * vs;
    c += m.params().initial[s] * cs;
  }
  return {v, c};
}

ExactSolution brute_force_solve(const Model& m, double budget, int horizon) {
  if (horizon < 1 || horizon > 4) {
    throw std::invalid_argument("brute_force_solve: horizon must be in [1, 4]");
  }
  const int decision_nodes = (1 << horizon) - 1;  // complete binary tree
  ExactSolution best;
  for (std::uint64_t bits = 0; bits < (1ULL << decision_nodes); ++bits) {
    // Heap layout: node i has children 2i+1 (o = 0) and 2i+2 (o = 1).
    std::function<std::shared_ptr<const PolicyNode>(int)> build =
        [&](int i) -> std::shared_ptr<const PolicyNode> {
      if (i >= decision_nodes) return nullptr;
      auto node = std::make_shared<PolicyNode>();
      node->action = ((bits >> i) & 1ULL) ? kRisky : kSafe;
      node->next = {build(2 * i + 1), build(2 * i + 2)};
      return node;
    };
    auto policy = build(0);
    const auto [v, c] = evaluate_policy(m, *policy, horizon);
    if (c <= budget + 1e-12 && v > best.value + 1e-12) {
      best.value = v;
      best.cost = c;
      best.policy = policy;
      best.root_action = policy->action;
      best.feasible = true;
    }
  }
  return best;
}

std::pair<double, double> uniform_random_value(const Model& m,
                                               const Distribution& b,
                                               int depth) {
  const double gamma = m.params().discount;
  std::function<std::pair<double, double>(State, int)> run =
      [&](State s, int d) -> std::pair<double, double> {
    if (d <= 0 || s == kGoal) return {0.0, 0.0};
    double v = 0.0;
    double c = 0.0;
    for (Action a : {kRisky, kSafe}) {
      for (State n = 0; n < kNumStates; ++n) {
        const double p = 0.5 * m.transition(s, a, n);
        if (p == 0.0) continue;
        const auto [vn, cn] = run(n, d - 1);
        v += p * (m.reward(s, a, n) + gamma * vn);
        c += p * (m.cost(s, a, n) + gamma * cn);
      }
    }
    return {v, c};
  };
  double v = 0.0;
  double c = 0.0;
  for (State s = 0; s < kNumStates; ++s) {
    if (b[s] == 0.0) continue;
    const auto [vs, cs] = run(s, depth);
    v += b[s] * vs;
    c += b[s] * cs;
  }
  return {v, c};
}

std::shared_ptr<const PolicyNode> constant_policy(Action a, int horizon) {
  if (horizon <= 0) return nullptr;
  auto node = std::make_shared<PolicyNode>();
  node->action = a;
  auto child = constant_policy(a, horizon - 1);
  node->next = {child, child};
  return node;
}

Options primitive_options() {
  return Options({primitive_option<State, Action>("risky", kRisky),
                  primitive_option<State, Action>("safe", kSafe)});
}

}  // namespace cobets::minichain
