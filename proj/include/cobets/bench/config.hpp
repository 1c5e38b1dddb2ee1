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
#include <string>
#include <vector>

#include "cobets/domains/lightdark.hpp"
#include "cobets/domains/minichain.hpp"
#include "cobets/planner/config.hpp"

namespace cobets::bench {

/// Everything needed to reproduce a campaign. Serializes to an INI file with
/// sections [experiment], [domain], [options] and [planner].
struct ExperimentConfig {
  // [experiment]
  std::string arm;  // label in summaries; defaults to the catalog name
  int episodes = 100;
  std::uint64_t seed = 1;
  int workers = 1;
  int max_steps = 100;
  int belief_particles = 0;    // execution belief size; 0 means planner.particles
  bool write_logs = false;     // per-episode JSONL logs under out_dir/logs
  bool record_timing = false;  // wall-clock columns; zero when off
  std::string out_dir;

  // [domain]
  std::string domain = "lightdark";
  lightdark::Params lightdark;
  minichain::Params minichain;

  // [options]
  std::string catalog = "base4";
  lightdark::OptionParams option_params;

  // [planner]
  PlannerConfig planner;
  double reward_scale = 1.0;  // dual step actually used: dual_step * reward_scale

  std::string arm_label() const { return arm.empty() ? catalog : arm; }
  PlannerConfig effective_planner() const;
  void validate() const;
};

/// Defaults pinned for the LightDark experiments.
ExperimentConfig default_config();

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& ini_text);

/// Applies "section.key=value". Unknown keys are rejected.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);
void set_value(ExperimentConfig& cfg, const std::string& key,
               const std::string& value);

std::string to_ini(const ExperimentConfig& cfg);

}  // namespace cobets::bench
