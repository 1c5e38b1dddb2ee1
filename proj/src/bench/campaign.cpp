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

#include "cobets/bench/campaign.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cobets/belief/particle_belief.hpp"
#include "cobets/options/executor.hpp"
#include "cobets/planner/planner.hpp"

namespace cobets::bench {

namespace fs = std::filesystem;

namespace {

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename M, typename Log>
EpisodeResult finish(const ExperimentConfig& cfg, int index,
                     std::uint64_t seed, const M& model, const Log& log,
                     double wall_ms) {
  EpisodeResult r;
  r.episode = index;
  r.seed = seed;
  r.value_reward = log.value_reward;
  r.value_cost = log.value_cost;
  r.steps = static_cast<int>(log.steps.size());
  r.epochs = static_cast<int>(log.epochs.size());
  r.truncated = log.truncated;
  const Budget& budget = model.problem().budget;
  for (std::size_t k = 0; k < budget.size(); ++k) {
    if (log.value_cost[k] > budget[k]) ++r.violations;
  }
  int decisions = 0;
  double ms = 0.0;
  double queries = 0.0;
  for (const auto& e : log.epochs) {
    if (!e.diagnostics) continue;
    ++decisions;
    ms += e.diagnostics->wall_ms;
    queries += e.diagnostics->queries;
  }
  if (decisions > 0) {
    r.queries_per_decision = queries / decisions;
    if (cfg.record_timing) r.ms_per_decision = ms / decisions;
  }
  if (cfg.record_timing) r.wall_ms = wall_ms;
  return r;
}

template <typename Log>
void write_log(const ExperimentConfig& cfg, int index, const Log& log) {
  if (!cfg.write_logs || cfg.out_dir.empty()) return;
  const fs::path dir = fs::path(cfg.out_dir) / "logs";
  fs::create_directories(dir);
  std::ofstream out(dir / ("episode_" + std::to_string(index) + ".jsonl"));
  write_jsonl(log, out);
}

template <typename M>
EpisodeResult run_with_model(const ExperimentConfig& cfg, int index,
                             const M& model, const auto& options,
                             const ExecutorConfig<typename M::State>& exec) {
  const std::uint64_t seed = episode_seed(cfg.seed, index);
  Rng rng(seed);
  const auto t0 = std::chrono::steady_clock::now();
  Planner<M> planner(model, options, cfg.effective_planner());
  const int m = cfg.belief_particles > 0 ? cfg.belief_particles
                                         : cfg.planner.particles;
  auto belief = sample_initial_belief(model, m, rng);
  const auto log = execute_episode(model, options, planner.selector(),
                                   std::move(belief), model.problem().budget,
                                   rng, exec);
  const double wall = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  write_log(cfg, index, log);
  return finish(cfg, index, seed, model, log, wall);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

std::uint64_t episode_seed(std::uint64_t base, int index) {
  return derive_seed(base, static_cast<std::uint64_t>(index));
}

EpisodeResult run_episode(const ExperimentConfig& cfg, int index) {
  if (cfg.domain == "lightdark") {
    const lightdark::Model model(cfg.lightdark);
    const auto options = lightdark::make_options(
        lightdark::parse_catalog(cfg.catalog), cfg.lightdark, cfg.option_params);
    ExecutorConfig<lightdark::State> exec;
    exec.max_steps = cfg.max_steps;
    exec.summarize = [](const lightdark::Belief& b) {
      const ScalarStats s = lightdark::position_stats(b);
      return BeliefStats{{s.mean}, {s.spread}};
    };
    return run_with_model(cfg, index, model, options, exec);
  }
  if (cfg.domain == "minichain") {
    const minichain::Model model(cfg.minichain);
    ExecutorConfig<minichain::State> exec;
    exec.max_steps = cfg.max_steps;
    return run_with_model(cfg, index, model, minichain::primitive_options(),
                          exec);
  }
  throw std::invalid_argument("unknown domain '" + cfg.domain + "'");
}

ResultSummary summarize(const std::string& domain, const std::string& arm,
                        const std::vector<EpisodeResult>& episodes,
                        const Budget& budget) {
  ResultSummary s;
  s.domain = domain;
  s.arm = arm;
  s.episodes = static_cast<int>(episodes.size());
  const std::size_t k = budget.size();
  s.mean_cost.assign(k, 0.0);
  s.se_cost.assign(k, 0.0);
  if (episodes.empty()) return s;
  const double n = static_cast<double>(episodes.size());

  auto mean_se = [&](auto get) {
    double mean = 0.0;
    for (const auto& e : episodes) mean += get(e);
    mean /= n;
    if (episodes.size() < 2) return std::pair{mean, 0.0};
    double ss = 0.0;
    for (const auto& e : episodes) ss += (get(e) - mean) * (get(e) - mean);
    return std::pair{mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
  };

  std::tie(s.mean_reward, s.se_reward) =
      mean_se([](const EpisodeResult& e) { return e.value_reward; });
  for (std::size_t j = 0; j < k; ++j) {
    std::tie(s.mean_cost[j], s.se_cost[j]) =
        mean_se([j](const EpisodeResult& e) { return e.value_cost[j]; });
  }
  double violated = 0.0;
  for (const auto& e : episodes) violated += e.violations > 0 ? 1.0 : 0.0;
  s.violation_fraction = violated / n;
  s.ms_per_decision =
      mean_se([](const EpisodeResult& e) { return e.ms_per_decision; }).first;
  s.queries_per_decision =
      mean_se([](const EpisodeResult& e) { return e.queries_per_decision; })
          .first;
  return s;
}

CampaignResult run_campaign(const ExperimentConfig& cfg) {
  cfg.validate();
  const int n = cfg.episodes;
  std::vector<std::optional<EpisodeResult>> slots(n);
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::optional<std::pair<int, std::string>> failure;

  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard lock(error_mutex);
        if (failure) return;
      }
      try {
        slots[i] = run_episode(cfg, i);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!failure || i < failure->first) failure = {i, e.what()};
      }
    }
  };

  const int workers = std::min(cfg.workers, n);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) {
    throw std::runtime_error("episode " + std::to_string(failure->first) +
                             " (seed " +
                             std::to_string(episode_seed(cfg.seed, failure->first)) +
                             ") failed: " + failure->second);
  }

  CampaignResult out;
  out.episodes.reserve(n);
  for (auto& s : slots) out.episodes.push_back(std::move(*s));
  const Budget budget = cfg.domain == "minichain"
                            ? minichain::Model(cfg.minichain).problem().budget
                            : lightdark::Model(cfg.lightdark).problem().budget;
  out.summary = summarize(cfg.domain, cfg.arm_label(), out.episodes, budget);

  if (!cfg.out_dir.empty()) {
    const fs::path dir(cfg.out_dir);
    write_file(dir / "episodes.csv", episodes_csv(out.episodes, budget.size()));
    write_file(dir / "summary.csv", summary_csv({out.summary}));
    write_file(dir / "config.ini", to_ini(cfg));
  }
  return out;
}

std::vector<SweepPoint> anytime_sweep(const ExperimentConfig& cfg,
                                      const std::vector<int>& query_counts) {
  std::vector<SweepPoint> points;
  for (int q : query_counts) {
    ExperimentConfig c = cfg;
    c.planner.queries = q;
    if (!cfg.out_dir.empty()) {
      c.out_dir = (fs::path(cfg.out_dir) / ("queries_" + std::to_string(q))).string();
    }
    points.push_back({static_cast<double>(q), run_campaign(c)});
  }
  if (!cfg.out_dir.empty()) {
    write_file(fs::path(cfg.out_dir) / "anytime.csv", sweep_csv("queries", points));
  }
  return points;
}

BranchingStrategy parse_strategy(const std::string& s) {
  if (s == "uncertainty" || s == "unc") return BranchingStrategy::kUncertainty;
  if (s == "random" || s == "random-macro") return BranchingStrategy::kRandomMacro;
  throw std::invalid_argument("unknown branching strategy '" + s + "'");
}

std::vector<SweepPoint> branching_sweep(const ExperimentConfig& cfg,
                                        const std::vector<int>& catalog_sizes,
                                        BranchingStrategy strategy) {
  if (cfg.domain != "lightdark") {
    throw std::invalid_argument("branching sweep requires the lightdark domain");
  }
  std::vector<SweepPoint> points;
  for (int size : catalog_sizes) {
    if (size < 4) throw std::invalid_argument("catalog sizes must be >= 4");
    ExperimentConfig c = cfg;
    if (size == 4) {
      c.catalog = "base4";
    } else {
      c.catalog = (strategy == BranchingStrategy::kUncertainty ? "uncertainty:"
                                                               : "random:") +
                  std::to_string(size);
    }
    c.arm = c.catalog;
    if (!cfg.out_dir.empty()) {
      c.out_dir = (fs::path(cfg.out_dir) / ("options_" + std::to_string(size))).string();
    }
    points.push_back({static_cast<double>(size), run_campaign(c)});
  }
  if (!cfg.out_dir.empty()) {
    write_file(fs::path(cfg.out_dir) / "branching.csv",
               sweep_csv("options", points));
  }
  return points;
}

std::string episodes_csv(const std::vector<EpisodeResult>& episodes,
                         std::size_t cost_dim) {
  std::ostringstream os;
  os << "episode,seed,V_R";
  for (std::size_t k = 0; k < cost_dim; ++k) os << ",V_C_" << (k + 1);
  os << ",steps,epochs,violations,wall_ms\n";
  for (const auto& e : episodes) {
    os << e.episode << ',' << e.seed << ',' << num(e.value_reward);
    for (std::size_t k = 0; k < cost_dim; ++k) os << ',' << num(e.value_cost[k]);
    os << ',' << e.steps << ',' << e.epochs << ',' << e.violations << ','
       << num(e.wall_ms) << '\n';
  }
  return os.str();
}

std::string summary_csv(const std::vector<ResultSummary>& rows) {
  std::ostringstream os;
  const std::size_t k = rows.empty() ? 1 : rows.front().mean_cost.size();
  os << "domain,arm,episodes,mean_V_R,se_V_R";
  for (std::size_t j = 0; j < k; ++j) {
    os << ",mean_V_C_" << (j + 1) << ",se_V_C_" << (j + 1);
  }
  os << ",violation_fraction,ms_per_decision,queries_per_decision\n";
  for (const auto& r : rows) {
    os << r.domain << ',' << r.arm << ',' << r.episodes << ','
       << num(r.mean_reward) << ',' << num(r.se_reward);
    for (std::size_t j = 0; j < k; ++j) {
      os << ',' << num(r.mean_cost[j]) << ',' << num(r.se_cost[j]);
    }
    os << ',' << num(r.violation_fraction) << ',' << num(r.ms_per_decision)
       << ',' << num(r.queries_per_decision) << '\n';
  }
  return os.str();
}

std::string sweep_csv(const std::string& parameter_name,
                      const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  const std::size_t k =
      points.empty() ? 1 : points.front().result.summary.mean_cost.size();
  os << parameter_name << ",arm,episodes,mean_V_R,se_V_R";
  for (std::size_t j = 0; j < k; ++j) {
    os << ",mean_V_C_" << (j + 1) << ",se_V_C_" << (j + 1);
  }
  os << ",violation_fraction\n";
  for (const auto& p : points) {
    const auto& s = p.result.summary;
    os << num(p.parameter) << ',' << s.arm << ',' << s.episodes << ','
       << num(s.mean_reward) << ',' << num(s.se_reward);
    for (std::size_t j = 0; j < k; ++j) {
      os << ',' << num(s.mean_cost[j]) << ',' << num(s.se_cost[j]);
    }
    os << ',' << num(s.violation_fraction) << '\n';
  }
  return os.str();
}

}  // namespace cobets::bench
