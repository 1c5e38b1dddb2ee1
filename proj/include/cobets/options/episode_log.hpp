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

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cobets/core/cost_vector.hpp"
#include "json.hpp"

namespace cobets {

struct RootChildStats {
  std::string label;
  int visits = 0;
  double q = 0.0;
  CostVector q_cost;
  bool feasible = false;
};

/// Per-decision planner diagnostics attached to an epoch.
struct DecisionDiagnostics {
  Multipliers lambda;
  std::vector<RootChildStats> root_children;
  int queries = 0;
  bool infeasible_fallback = false;
  double wall_ms = 0.0;
};

template <typename Action, typename Observation>
struct StepRecord {
  int t = 0;
  int epoch = 0;
  std::vector<double> belief_mean;
  std::vector<double> belief_spread;
  std::string option;
  Action action{};
  Observation observation{};
  double reward = 0.0;
  CostVector cost;
  Budget budget;  // remaining budget after this step's update
  bool degenerate = false;
};

struct EpochRecord {
  int epoch = 0;
  int start = 0;     // t_e
  int duration = 0;  // tau_e
  std::string option;
  bool unavailable_fallback = false;
  std::optional<DecisionDiagnostics> diagnostics;
};

template <typename Action, typename Observation>
struct EpisodeLog {
  std::vector<StepRecord<Action, Observation>> steps;
  std::vector<EpochRecord> epochs;
  double value_reward = 0.0;  // discounted return of realized rewards
  CostVector value_cost;      // discounted return of realized costs
  bool truncated = false;
  int unavailable_fallbacks = 0;
  int infeasible_fallbacks = 0;
  int degeneracies = 0;
};

inline nlohmann::json to_json_array(const CostVector& c) {
  return nlohmann::json(std::vector<double>(c.begin(), c.end()));
}
inline nlohmann::json to_json_array(const Budget& c) {
  return nlohmann::json(std::vector<double>(c.begin(), c.end()));
}
inline nlohmann::json to_json_array(const Multipliers& c) {
  return nlohmann::json(std::vector<double>(c.begin(), c.end()));
}

inline nlohmann::json diagnostics_json(const DecisionDiagnostics& d) {
  nlohmann::json children = nlohmann::json::array();
  for (const auto& c : d.root_children) {
    children.push_back({{"label", c.label},
                        {"N", c.visits},
                        {"Q", c.q},
                        {"Q_C", to_json_array(c.q_cost)},
                        {"feasible", c.feasible}});
  }
  return {{"lambda", to_json_array(d.lambda)},
          {"queries", d.queries},
          {"infeasible_fallback", d.infeasible_fallback},
          {"wall_ms", d.wall_ms},
          {"root_children", children}};
}

/// Line-delimited JSON: one "step" record per environment step, one "epoch"
/// record per decision epoch, and a closing "episode" record.
template <typename Action, typename Observation>
void write_jsonl(const EpisodeLog<Action, Observation>& log, std::ostream& os) {
  for (const auto& s : log.steps) {
    nlohmann::json j = {{"type", "step"},
                        {"t", s.t},
                        {"epoch", s.epoch},
                        {"belief_mean", s.belief_mean},
                        {"belief_spread", s.belief_spread},
                        {"option", s.option},
                        {"action", s.action},
                        {"observation", s.observation},
                        {"reward", s.reward},
                        {"cost", to_json_array(s.cost)},
                        {"budget", to_json_array(s.budget)},
                        {"degenerate", s.degenerate}};
    os << j.dump() << '\n';
  }
  for (const auto& e : log.epochs) {
    nlohmann::json j = {{"type", "epoch"},
                        {"epoch", e.epoch},
                        {"start", e.start},
                        {"duration", e.duration},
                        {"option", e.option},
                        {"unavailable_fallback", e.unavailable_fallback}};
    if (e.diagnostics) j["planner"] = diagnostics_json(*e.diagnostics);
    os << j.dump() << '\n';
  }
  nlohmann::json end = {{"type", "episode"},
                        {"V_R", log.value_reward},
                        {"V_C", to_json_array(log.value_cost)},
                        {"steps", log.steps.size()},
                        {"epochs", log.epochs.size()},
                        {"truncated", log.truncated},
                        {"unavailable_fallbacks", log.unavailable_fallbacks},
                        {"infeasible_fallbacks", log.infeasible_fallbacks},
                        {"degeneracies", log.degeneracies}};
  os << end.dump() << '\n';
}

}  // namespace cobets
