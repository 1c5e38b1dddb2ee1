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

#include "cobets/bench/config.hpp"

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cobets::bench {

namespace pt = boost::property_tree;

namespace {

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: '" + key + "' expects a number, got '" +
                                v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: '" + key +
                                "' expects an integer, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const unsigned long long i = std::stoull(v, &used);
    if (used != v.size() || v.find('-') != std::string::npos) {
      throw std::invalid_argument(v);
    }
    return i;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: '" + key +
                                "' expects an unsigned integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config: '" + key + "' expects a boolean, got '" +
                              v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

// One accessor pair per addressable key, so parsing and serialization can
// never drift apart.
struct Field {
  std::function<void(ExperimentConfig&, const std::string& key,
                     const std::string&)>
      set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define COBETS_DOUBLE(member) \
  Field{[](ExperimentConfig& c, const std::string& k, const std::string& v) { \
          c.member = to_double(k, v);                                         \
        },                                                                    \
        [](const ExperimentConfig& c) { return fmt(c.member); }}
#define COBETS_INT(member) \
  Field{[](ExperimentConfig& c, const std::string& k, const std::string& v) { \
          c.member = static_cast<decltype(c.member)>(to_int(k, v));           \
        },                                                                    \
        [](const ExperimentConfig& c) { return std::to_string(c.member); }}
#define COBETS_BOOL(member) \
  Field{[](ExperimentConfig& c, const std::string& k, const std::string& v) { \
          c.member = to_bool(k, v);                                           \
        },                                                                    \
        [](const ExperimentConfig& c) {                                       \
          return std::string(c.member ? "true" : "false");                    \
        }}
#define COBETS_STRING(member) \
  Field{[](ExperimentConfig& c, const std::string&, const std::string& v) {   \
          c.member = v;                                                       \
        },                                                                    \
        [](const ExperimentConfig& c) { return c.member; }}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"experiment.arm", COBETS_STRING(arm)},
      {"experiment.episodes", COBETS_INT(episodes)},
      {"experiment.seed",
       Field{[](ExperimentConfig& c, const std::string& k,
                const std::string& v) { c.seed = to_u64(k, v); },
             [](const ExperimentConfig& c) { return std::to_string(c.seed); }}},
      {"experiment.workers", COBETS_INT(workers)},
      {"experiment.max_steps", COBETS_INT(max_steps)},
      {"experiment.belief_particles", COBETS_INT(belief_particles)},
      {"experiment.write_logs", COBETS_BOOL(write_logs)},
      {"experiment.record_timing", COBETS_BOOL(record_timing)},

      {"domain.name", COBETS_STRING(domain)},
      {"domain.discount", COBETS_DOUBLE(lightdark.discount)},
      {"domain.budget", COBETS_DOUBLE(lightdark.budget)},
      {"domain.goal_half_width", COBETS_DOUBLE(lightdark.goal_half_width)},
      {"domain.goal_reward", COBETS_DOUBLE(lightdark.goal_reward)},
      {"domain.miss_penalty", COBETS_DOUBLE(lightdark.miss_penalty)},
      {"domain.step_reward", COBETS_DOUBLE(lightdark.step_reward)},
      {"domain.light_location", COBETS_DOUBLE(lightdark.light_location)},
      {"domain.constraint_threshold",
       COBETS_DOUBLE(lightdark.constraint_threshold)},
      {"domain.constraint_cost", COBETS_DOUBLE(lightdark.constraint_cost)},
      {"domain.sigma_floor", COBETS_DOUBLE(lightdark.sigma_floor)},
      {"domain.initial_mean", COBETS_DOUBLE(lightdark.initial_mean)},
      {"domain.initial_std", COBETS_DOUBLE(lightdark.initial_std)},
      {"domain.rescue_jitter", COBETS_DOUBLE(lightdark.rescue_jitter)},
      {"domain.minichain_slip", COBETS_DOUBLE(minichain.slip)},
      {"domain.minichain_discount", COBETS_DOUBLE(minichain.discount)},
      {"domain.minichain_budget", COBETS_DOUBLE(minichain.budget)},
      {"domain.minichain_sensor_accuracy",
       COBETS_DOUBLE(minichain.sensor_accuracy)},

      {"options.catalog", COBETS_STRING(catalog)},
      {"options.localize_threshold",
       COBETS_DOUBLE(option_params.localize_threshold)},
      {"options.safe_margin", COBETS_DOUBLE(option_params.safe_margin)},
      {"options.feasible_theta_low",
       COBETS_DOUBLE(option_params.feasible_theta_low)},
      {"options.feasible_theta_high",
       COBETS_DOUBLE(option_params.feasible_theta_high)},
      {"options.sweep_theta_min", COBETS_DOUBLE(option_params.sweep_theta_min)},
      {"options.sweep_theta_max", COBETS_DOUBLE(option_params.sweep_theta_max)},
      {"options.sweep_seed",
       Field{[](ExperimentConfig& c, const std::string& k,
                const std::string& v) {
               c.option_params.sweep_seed = to_u64(k, v);
             },
             [](const ExperimentConfig& c) {
               return std::to_string(c.option_params.sweep_seed);
             }}},

      {"planner.queries", COBETS_INT(planner.queries)},
      {"planner.max_depth", COBETS_INT(planner.max_depth)},
      {"planner.exploration", COBETS_DOUBLE(planner.exploration)},
      {"planner.option_k", COBETS_DOUBLE(planner.option_k)},
      {"planner.option_alpha", COBETS_DOUBLE(planner.option_alpha)},
      {"planner.transition_k", COBETS_DOUBLE(planner.transition_k)},
      {"planner.transition_alpha", COBETS_DOUBLE(planner.transition_alpha)},
      {"planner.particles", COBETS_INT(planner.particles)},
      {"planner.dual_init",
       Field{[](ExperimentConfig& c, const std::string& k,
                const std::string& v) { c.planner.dual_init = to_list(k, v); },
             [](const ExperimentConfig& c) {
               return fmt_list(c.planner.dual_init);
             }}},
      {"planner.dual_step", COBETS_DOUBLE(planner.dual_step)},
      {"planner.reward_scale", COBETS_DOUBLE(reward_scale)},
      {"planner.warm_start_dual", COBETS_BOOL(planner.warm_start_dual)},
      {"planner.rollout_depth", COBETS_INT(planner.rollout_depth)},
  };
  return table;
}

#undef COBETS_DOUBLE
#undef COBETS_INT
#undef COBETS_BOOL
#undef COBETS_STRING

}  // namespace

PlannerConfig ExperimentConfig::effective_planner() const {
  PlannerConfig p = planner;
  p.dual_step = planner.dual_step * reward_scale;
  return p;
}

void ExperimentConfig::validate() const {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  if (belief_particles < 0) {
    throw std::invalid_argument("belief_particles must be >= 0");
  }
  if (!(reward_scale > 0.0)) {
    throw std::invalid_argument("reward_scale must be > 0");
  }
  if (domain == "lightdark") {
    lightdark::parse_catalog(catalog);
  } else if (domain == "minichain") {
    if (catalog != "primitive") {
      throw std::invalid_argument("minichain only supports the primitive catalog");
    }
  } else {
    throw std::invalid_argument("unknown domain '" + domain + "'");
  }
  effective_planner().validate(1);
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.belief_particles = 5000;
  c.planner.queries = 1000;
  c.planner.max_depth = 30;
  c.planner.exploration = 50.0;
  c.planner.option_k = 4.0;
  c.planner.option_alpha = 0.5;
  c.planner.transition_k = 2.0;
  c.planner.transition_alpha = 0.2;
  c.planner.particles = 200;
  c.planner.dual_step = 1.0;
  c.reward_scale = 100.0;
  c.planner.warm_start_dual = true;
  c.planner.rollout_depth = -1;
  return c;
}

void set_value(ExperimentConfig& cfg, const std::string& key,
               const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  it->second.set(cfg, key, value);
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("override must look like section.key=value: '" +
                                assignment + "'");
  }
  set_value(cfg, boost::algorithm::trim_copy(assignment.substr(0, eq)),
            boost::algorithm::trim_copy(assignment.substr(eq + 1)));
}

ExperimentConfig parse_config(const std::string& ini_text) {
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg = default_config();
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw std::invalid_argument("config: key '" + section +
                                  "' outside of a section");
    }
    for (const auto& [key, value] : body) {
      set_value(cfg, section + "." + key, value.get_value<std::string>());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_ini(const ExperimentConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const auto& [key, field] : fields()) {
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      os << (section.empty() ? "" : "\n") << '[' << s << "]\n";
      section = s;
    }
    os << key.substr(dot + 1) << " = " << field.get(cfg) << '\n';
  }
  return os.str();
}

}  // namespace cobets::bench
