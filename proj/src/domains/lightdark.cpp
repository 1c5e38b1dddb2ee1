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

#include "cobets/domains/lightdark.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cobets::lightdark {

namespace {

constexpr std::array<int, 3> kMagnitudes = {10, 5, 1};

bool valid_action(Action a) {
  return std::find(kActions.begin(), kActions.end(), a) != kActions.end();
}

// Largest move magnitude not exceeding limit; 1 if none fits.
int largest_step_within(double limit) {
  for (int m : kMagnitudes) {
    if (m <= limit) return m;
  }
  return 1;
}

std::string signed_label(Action a) {
  return (a > 0 ? "+" : "") + std::to_string(a);
}

}  // namespace

Model::Model(Params params) : params_(params) {
  problem_.discount = params_.discount;
  problem_.budget = Budget{params_.budget};
  problem_.validate();
  if (!(params_.sigma_floor > 0.0)) {
    throw std::invalid_argument("sigma_floor must be > 0");
  }
}

double Model::sigma(double position) const {
  return std::abs(position - params_.light_location) + params_.sigma_floor;
}

GenerativeStep<State, Observation> Model::step(const State& s, Action a,
                                               Rng& rng) const {
  if (!valid_action(a)) {
    throw std::invalid_argument("lightdark: invalid action " +
                                std::to_string(a));
  }
  GenerativeStep<State, Observation> out;
  out.cost = CostVector::zeros(1);
  std::normal_distribution<double> noise(0.0, 1.0);
  if (s.terminal) {
    out.next_state = s;
    out.observation = s.position + sigma(s.position) * noise(rng);
    return out;
  }

  out.next_state.position = s.position + a;
  if (a == 0) {
    out.next_state.terminal = true;
    out.reward = std::abs(s.position) <= params_.goal_half_width
                     ? params_.goal_reward
                     : params_.miss_penalty;
  } else {
    out.reward = params_.step_reward;
  }
  if (out.next_state.position > params_.constraint_threshold) {
    out.cost[0] = params_.constraint_cost;
  }
  const double pos = out.next_state.position;
  out.observation = pos + sigma(pos) * noise(rng);
  return out;
}

double Model::observation_density(Action /*a*/, const State& next,
                                  Observation o) const {
  const double sd = sigma(next.position);
  const double z = (o - next.position) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

State Model::sample_initial_state(Rng& rng) const {
  std::normal_distribution<double> d(params_.initial_mean, params_.initial_std);
  return State{d(rng), false};
}

State Model::jitter(const State& s, Rng& rng) const {
  if (s.terminal) return s;
  std::normal_distribution<double> d(0.0, params_.rescue_jitter);
  return State{s.position + d(rng), false};
}

ScalarStats position_stats(const Belief& b) {
  return scalar_stats(b, [](const State& s) { return s.position; });
}

Option go_to_goal(const Params& /*p*/) {
  Option o;
  o.label = "GoToGoal";
  // Greedy on |mean + a|; the stop action 0 wins ties, so it is only chosen
  // once the mean sits within half a unit of the goal center.
  o.policy = [](const Belief& b, int) {
    const double mean = position_stats(b).mean;
    Action best = 0;
    double best_dist = std::abs(mean);
    for (Action a : kActions) {
      const double d = std::abs(mean + a);
      if (d < best_dist) {
        best_dist = d;
        best = a;
      }
    }
    return best;
  };
  o.termination = [](const Belief&, int) { return 0.0; };
  return o;
}

Option localize_fast(const Params& p, double threshold) {
  Option o;
  o.label = "LocalizeFast";
  const double light = p.light_location;
  o.policy = [light](const Belief& b, int) {
    const double dist = light - position_stats(b).mean;
    if (std::abs(dist) < 1.0) return dist > 0.0 ? 1 : -1;
    const int m = largest_step_within(std::abs(dist));
    return dist > 0.0 ? m : -m;
  };
  o.termination = [threshold](const Belief& b, int) {
    return position_stats(b).spread < threshold ? 1.0 : 0.0;
  };
  return o;
}

Option localize_from_below(const Params& p, double threshold) {
  Option o;
  o.label = "LocalizeFromBelow";
  const double light = p.light_location;
  o.policy = [light](const Belief& b, int) {
    const double mean = position_stats(b).mean;
    if (mean + 1.0 <= light) return largest_step_within(light - mean);
    if (mean > light) return -largest_step_within(mean - (light - 1.0));
    return -1;
  };
  o.termination = [threshold](const Belief& b, int) {
    return position_stats(b).spread < threshold ? 1.0 : 0.0;
  };
  return o;
}

Option localize_safe(const Params& p, double threshold, double margin,
                     std::string label) {
  Option o;
  o.label = std::move(label);
  const double light = p.light_location;
  const double ceiling = p.constraint_threshold;
  o.policy = [light, ceiling, margin](const Belief& b, int) {
    const ScalarStats st = position_stats(b);
    const double upper = st.mean + margin * st.spread;
    if (st.mean < light) {
      const double reach = std::max(light - st.mean, 1.0);
      for (int m : kMagnitudes) {
        if (m <= reach && upper + m <= ceiling) return m;
      }
      return -1;
    }
    return -largest_step_within(st.mean - light);
  };
  o.termination = [threshold](const Belief& b, int) {
    return position_stats(b).spread < threshold ? 1.0 : 0.0;
  };
  return o;
}

Option random_macro(const std::array<Action, 3>& actions) {
  Option o;
  o.label = "Random[" + signed_label(actions[0]) + "," +
            signed_label(actions[1]) + "," + signed_label(actions[2]) + "]";
  o.policy = [actions](const Belief&, int elapsed) {
    return actions[std::min(elapsed, 2)];
  };
  o.termination = [](const Belief&, int elapsed) {
    return elapsed >= 3 ? 1.0 : 0.0;
  };
  return o;
}

Catalog parse_catalog(const std::string& text) {
  if (text == "base4" || text == "base") return {CatalogKind::kBase, 4};
  if (text == "feasible3" || text == "feasible") {
    return {CatalogKind::kFeasible, 3};
  }
  if (text == "primitive") return {CatalogKind::kPrimitive, kActions.size()};
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string kind = text.substr(0, colon);
    std::size_t size = 0;
    try {
      size = std::stoul(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad catalog size in '" + text + "'");
    }
    if (size < 4) {
      throw std::invalid_argument("sweep catalogs need at least 4 options");
    }
    if (kind == "uncertainty") return {CatalogKind::kUncertainty, size};
    if (kind == "random") return {CatalogKind::kRandomMacro, size};
  }
  throw std::invalid_argument("unknown option catalog '" + text + "'");
}

std::string to_string(const Catalog& c) {
  switch (c.kind) {
    case CatalogKind::kBase:
      return "base4";
    case CatalogKind::kFeasible:
      return "feasible3";
    case CatalogKind::kPrimitive:
      return "primitive";
    case CatalogKind::kUncertainty:
      return "uncertainty:" + std::to_string(c.size);
    case CatalogKind::kRandomMacro:
      return "random:" + std::to_string(c.size);
  }
  return "unknown";
}

Options make_options(const Catalog& catalog, const Params& p,
                     const OptionParams& op) {
  std::vector<Option> out;
  auto base = [&] {
    out.push_back(go_to_goal(p));
    out.push_back(localize_fast(p, op.localize_threshold));
    out.push_back(localize_from_below(p, op.localize_threshold));
    out.push_back(localize_safe(p, op.localize_threshold, op.safe_margin));
  };

  switch (catalog.kind) {
    case CatalogKind::kBase:
      base();
      break;
    case CatalogKind::kFeasible:
      out.push_back(go_to_goal(p));
      out.push_back(localize_safe(p, op.feasible_theta_low, op.safe_margin,
                                  "LocalizeSafe(lo)"));
      out.push_back(localize_safe(p, op.feasible_theta_high, op.safe_margin,
                                  "LocalizeSafe(hi)"));
      break;
    case CatalogKind::kPrimitive:
      for (Action a : kActions) {
        out.push_back(primitive_option<State, Action>("a=" + signed_label(a), a));
      }
      break;
    case CatalogKind::kUncertainty: {
      base();
      Rng rng(op.sweep_seed);
      std::uniform_real_distribution<double> theta(op.sweep_theta_min,
                                                   op.sweep_theta_max);
      std::set<std::string> seen;
      while (out.size() < catalog.size) {
        const double t = theta(rng);
        std::ostringstream label;
        label << "LocalizeSafe(" << std::fixed << std::setprecision(4) << t
              << ")";
        if (!seen.insert(label.str()).second) continue;
        out.push_back(localize_safe(p, t, op.safe_margin, label.str()));
      }
      break;
    }
    case CatalogKind::kRandomMacro: {
      constexpr std::array<Action, 6> moves = {-1, 1, -5, 5, -10, 10};
      if (catalog.size - 4 > moves.size() * moves.size() * moves.size()) {
        throw std::invalid_argument("too many random macro options requested");
      }
      base();
      Rng rng(op.sweep_seed);
      std::set<std::string> seen;
      while (out.size() < catalog.size) {
        std::array<Action, 3> seq{};
        for (Action& a : seq) a = moves[uniform_index(rng, moves.size())];
        Option o = random_macro(seq);
        if (!seen.insert(o.label).second) continue;
        out.push_back(std::move(o));
      }
      break;
    }
  }
  return Options(std::move(out));
}

}  // namespace cobets::lightdark
