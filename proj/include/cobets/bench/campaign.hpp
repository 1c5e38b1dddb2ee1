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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cobets/bench/config.hpp"
#include "cobets/core/cost_vector.hpp"

namespace cobets::bench {

struct EpisodeResult {
  int episode = 0;
  std::uint64_t seed = 0;
  double value_reward = 0.0;
  CostVector value_cost;
  int steps = 0;
  int epochs = 0;
  int violations = 0;  // cost channels whose discounted cost exceeds the budget
  double wall_ms = 0.0;
  double ms_per_decision = 0.0;
  double queries_per_decision = 0.0;
  bool truncated = false;
};

struct ResultSummary {
  std::string domain;
  std::string arm;
  int episodes = 0;
  double mean_reward = 0.0;
  double se_reward = 0.0;
  std::vector<double> mean_cost;
  std::vector<double> se_cost;
  double violation_fraction = 0.0;
  double ms_per_decision = 0.0;
  double queries_per_decision = 0.0;
};

struct CampaignResult {
  ResultSummary summary;
  std::vector<EpisodeResult> episodes;
};

/// Seed of episode i; independent of worker count and scheduling.
std::uint64_t episode_seed(std::uint64_t base, int index);

/// Runs one episode of the configured domain, catalog and planner.
EpisodeResult run_episode(const ExperimentConfig& cfg, int index);

/// Mean and standard error (sample stddev / sqrt(n); 0 when n < 2).
ResultSummary summarize(const std::string& domain, const std::string& arm,
                        const std::vector<EpisodeResult>& episodes,
                        const Budget& budget);

/// Runs cfg.episodes episodes on cfg.workers threads. When cfg.out_dir is
/// set, writes episodes.csv and summary.csv there. A failing episode aborts
/// the campaign with its seed in the error message.
CampaignResult run_campaign(const ExperimentConfig& cfg);

struct SweepPoint {
  double parameter = 0.0;  // query count or catalog size
  CampaignResult result;
};

/// One campaign per query count; writes anytime.csv when out_dir is set.
std::vector<SweepPoint> anytime_sweep(const ExperimentConfig& cfg,
                                      const std::vector<int>& query_counts);

enum class BranchingStrategy { kUncertainty, kRandomMacro };
BranchingStrategy parse_strategy(const std::string& s);

/// One campaign per option-catalog size; writes branching.csv when out_dir
/// is set. Size 4 is the base catalog.
std::vector<SweepPoint> branching_sweep(const ExperimentConfig& cfg,
                                        const std::vector<int>& catalog_sizes,
                                        BranchingStrategy strategy);

// CSV writers (exposed for tests).
std::string episodes_csv(const std::vector<EpisodeResult>& episodes,
                         std::size_t cost_dim);
std::string summary_csv(const std::vector<ResultSummary>& rows);
std::string sweep_csv(const std::string& parameter_name,
                      const std::vector<SweepPoint>& points);

}  // namespace cobets::bench
