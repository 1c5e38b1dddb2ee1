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

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cobets/belief/particle_belief.hpp"
#include "cobets/core/model.hpp"
#include "cobets/core/returns.hpp"
#include "cobets/options/episode_log.hpp"
#include "cobets/options/option.hpp"

namespace cobets {

/// What an option-selection policy hands back to the executor.
struct Decision {
  std::size_t option = 0;
  std::optional<DecisionDiagnostics> diagnostics;
};

template <typename State>
using Selector =
    std::function<Decision(const ParticleBelief<State>&, const Budget&, Rng&)>;

template <typename State>
struct ExecutorConfig {
  int max_steps = 100;
  // Optional belief summary for the log (mean / spread of some feature).
  std::function<BeliefStats(const ParticleBelief<State>&)> summarize;
};

/// Runs one episode of hierarchical option execution. The true initial state
/// is drawn from the model; the agent only sees observations. An option is
/// (re)selected at t = 0 and whenever the active option terminates; after
/// every step the remaining budget becomes [(c - C(b, a)) / gamma]^+ with
/// C(b, a) the belief-expected instantaneous cost, and the belief is updated
/// with the received observation.
template <GenerativeModel M>
EpisodeLog<typename M::Action, typename M::Observation> execute_episode(
    const M& model, const OptionSet<typename M::State, typename M::Action>& options,
    const Selector<typename M::State>& selector,
    ParticleBelief<typename M::State> belief, Budget budget, Rng& rng,
    const ExecutorConfig<typename M::State>& cfg = {}) {
  using Action = typename M::Action;
  using Observation = typename M::Observation;
  const ProblemSpec& problem = model.problem();
  const double gamma = problem.discount;
  if (budget.size() != problem.cost_dim()) {
    throw std::invalid_argument("budget dimension does not match the model");
  }
  budget = clamp_positive(budget);

  // Environment and agent draw from separate streams so that the realized
  // world does not depend on how much randomness the planner consumes.
  Rng env_rng(rng());
  Rng agent_rng(rng());

  EpisodeLog<Action, Observation> log;
  auto state = model.sample_initial_state(env_rng);
  std::optional<std::size_t> active;
  int elapsed = 0;
  std::vector<StepOutcome> realized;

  for (int t = 0; !model.is_terminal(state); ++t) {
    if (t >= cfg.max_steps) {
      log.truncated = true;
      break;
    }
    if (!active || option_terminates(options[*active], belief, elapsed, agent_rng)) {
      EpochRecord epoch;
      epoch.epoch = static_cast<int>(log.epochs.size());
      epoch.start = t;
      const auto avail = available_options(options, belief);
      if (avail.empty()) {
        std::size_t fallback = 0;
        for (std::size_t i = 0; i < options.size(); ++i) {
          if (options[i].primitive) {
            fallback = i;
            break;
          }
        }
        active = fallback;
        epoch.unavailable_fallback = true;
        ++log.unavailable_fallbacks;
      } else {
        Decision d = selector(belief, budget, agent_rng);
        if (d.option >= options.size()) {
          throw std::out_of_range("selector returned an unknown option index");
        }
        active = d.option;
        if (d.diagnostics && d.diagnostics->infeasible_fallback) {
          ++log.infeasible_fallbacks;
        }
        epoch.diagnostics = std::move(d.diagnostics);
      }
      epoch.option = options[*active].label;
      log.epochs.push_back(std::move(epoch));
      elapsed = 0;
    }

    const auto& option = options[*active];
    const Action a = option.action(belief, elapsed);
    auto env = model.step(state, a, env_rng);
    auto update = update_belief(model, belief, a, env.observation, agent_rng);
    budget = propagate_budget(budget, update.cost, gamma, 1);

    StepRecord<Action, Observation> rec;
    rec.t = t;
    rec.epoch = log.epochs.back().epoch;
    if (cfg.summarize) {
      BeliefStats stats = cfg.summarize(belief);
      rec.belief_mean = std::move(stats.mean);
      rec.belief_spread = std::move(stats.spread);
    }
    rec.option = option.label;
    rec.action = a;
    rec.observation = env.observation;
    rec.reward = env.reward;
    rec.cost = env.cost;
    rec.budget = budget;
    rec.degenerate = update.degenerate;
    if (update.degenerate) ++log.degeneracies;
    log.steps.push_back(std::move(rec));
    realized.push_back({env.reward, env.cost});

    ++log.epochs.back().duration;
    belief = std::move(update.belief);
    state = std::move(env.next_state);
    ++elapsed;
  }

  const auto ret = discounted_return(realized, gamma, problem.cost_dim());
  log.value_reward = ret.reward;
  log.value_cost = ret.cost;
  return log;
}

}  // namespace cobets
