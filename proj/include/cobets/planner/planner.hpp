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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cobets/belief/particle_belief.hpp"
#include "cobets/core/cost_vector.hpp"
#include "cobets/core/model.hpp"
#include "cobets/core/returns.hpp"
#include "cobets/options/executor.hpp"
#include "cobets/options/option.hpp"
#include "cobets/planner/config.hpp"
#include "cobets/planner/dual.hpp"

namespace cobets {

using NodeId = std::size_t;

/// A sampled semi-Markov belief jump (b', r~, c~, tau).
template <typename State>
struct SemiMarkovTransition {
  ParticleBelief<State> belief;
  double reward = 0.0;  // discounted reward accumulated over the option
  CostVector cost;      // discounted cost accumulated over the option
  int duration = 0;     // tau, underlying steps
  std::vector<StepOutcome> steps;  // raw outcomes, only when recording
};

struct ValueEstimate {
  double value = 0.0;
  CostVector cost;
};

struct BeliefNode {
  int visits = 0;
  std::vector<NodeId> children;  // option nodes
};

struct StoredTransition {
  NodeId child = 0;  // belief node
  double reward = 0.0;
  CostVector cost;
  int duration = 0;
  std::vector<StepOutcome> steps;
};

struct OptionNode {
  std::size_t option = 0;  // index into the option set
  int visits = 0;
  double q = 0.0;
  CostVector q_cost;
  std::vector<StoredTransition> transitions;
};

/// Per-decision search statistics. Belief nodes own their particle beliefs.
template <typename State>
struct SearchTree {
  std::vector<BeliefNode> belief_nodes;
  std::vector<ParticleBelief<State>> beliefs;
  std::vector<OptionNode> option_nodes;

  NodeId add_belief(ParticleBelief<State> b) {
    belief_nodes.emplace_back();
    beliefs.push_back(std::move(b));
    return belief_nodes.size() - 1;
  }

  void clear() {
    belief_nodes.clear();
    beliefs.clear();
    option_nodes.clear();
  }
};

/// Trace hook for instrumentation and seed-matched comparisons.
struct TraceEvent {
  enum class Kind {
    kAddChild,         // option/action added to C(b); index = option
    kSelect,           // child chosen by the UCB rule; index = option
    kNewTransition,    // transition widened; index = duration
    kReuseTransition,  // stored transition resampled; index = slot
    kBackup,           // backed-up (V, C) at this node
  };
  Kind kind;
  int depth = 0;
  std::size_t index = 0;
  double value = 0.0;
  CostVector cost;
};

/// Draws the next option to add to C(b): uniform over available options not
/// yet expanded; once those run out, uniform over all available options (the
/// caller then finds an existing child and C(b) stays unchanged). The budget
/// is accepted for budget-aware samplers and unused here.
template <typename State, typename Action>
std::size_t sample_next_option(const ParticleBelief<State>& b,
                               const Budget& /*budget*/,
                               const OptionSet<State, Action>& options,
                               const std::vector<std::size_t>& existing,
                               Rng& rng) {
  const auto available = available_options(options, b);
  if (available.empty()) throw NoAvailableOption();
  std::vector<std::size_t> fresh;
  fresh.reserve(available.size());
  for (std::size_t o : available) {
    if (std::find(existing.begin(), existing.end(), o) == existing.end()) {
      fresh.push_back(o);
    }
  }
  if (!fresh.empty()) return fresh[uniform_index(rng, fresh.size())];
  return available[uniform_index(rng, available.size())];
}

/// Option-level Lagrangian belief-tree search over a particle-filter belief.
template <GenerativeModel M>
class Planner {
 public:
  using State = typename M::State;
  using Action = typename M::Action;
  using Belief = ParticleBelief<State>;
  using Options = OptionSet<State, Action>;
  using Estimator =
      std::function<ValueEstimate(const Belief&, const Budget&, int, Rng&)>;
  using Tracer = std::function<void(const TraceEvent&)>;

  Planner(const M& model, Options options, PlannerConfig cfg)
      : model_(model), options_(std::move(options)), cfg_(std::move(cfg)) {
    model_.problem().validate();
    cfg_.validate(cost_dim());
    reset_dual();
  }

  const PlannerConfig& config() const { return cfg_; }
  const Options& options() const { return options_; }
  const SearchTree<State>& tree() const { return tree_; }
  const DualState& dual() const { return dual_; }
  std::size_t cost_dim() const { return model_.problem().cost_dim(); }

  void set_value_estimator(Estimator e) { estimator_ = std::move(e); }
  void set_tracer(Tracer t) { tracer_ = std::move(t); }

  /// Sets lambda back to lambda_0 (and forgets any warm start).
  void reset_dual() {
    dual_.lambda = Multipliers(cost_dim());
    for (std::size_t k = 0; k < cfg_.dual_init.size(); ++k) {
      dual_.lambda[k] = cfg_.dual_init[k];
    }
    dual_.iteration = 0;
  }

  void set_dual(DualState d) { dual_ = std::move(d); }

  /// Discards the tree and roots a fresh one at b.
  NodeId reset_tree(const Belief& b) {
    tree_.clear();
    return tree_.add_belief(b);
  }

  /// Runs the configured number of queries from b (first resampled down to m
  /// particles if larger) and returns the best root
  /// option whose estimated cost fits the budget. When no root child fits,
  /// returns the one with the smallest worst-channel violation and flags it.
  Decision select_option(const Belief& b, const Budget& budget, Rng& rng) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!cfg_.warm_start_dual) reset_dual();
    dual_.iteration = 0;
    const NodeId root =
        b.size() > static_cast<std::size_t>(cfg_.particles)
            ? reset_tree(resample_belief(b, cfg_.particles, rng))
            : reset_tree(b);
    for (int i = 1; i <= cfg_.queries; ++i) {
      simulate(root, budget, cfg_.max_depth, rng);
      const NodeId greedy = greedy_child(root);
      dual_ = dual_update(dual_, tree_.option_nodes[greedy].q_cost, budget,
                          dual_step_size(cfg_.dual_step, i));
    }

    Decision d;
    DecisionDiagnostics diag;
    diag.queries = cfg_.queries;
    diag.lambda = dual_.lambda;
    std::optional<NodeId> best;
    for (NodeId c : tree_.belief_nodes[root].children) {
      const OptionNode& node = tree_.option_nodes[c];
      const bool feasible = within_budget(node.q_cost, budget);
      diag.root_children.push_back({options_[node.option].label, node.visits,
                                    node.q, node.q_cost, feasible});
      if (feasible && (!best || node.q > tree_.option_nodes[*best].q)) {
        best = c;
      }
    }
    if (!best) {
      diag.infeasible_fallback = true;
      double least = std::numeric_limits<double>::infinity();
      for (NodeId c : tree_.belief_nodes[root].children) {
        const double v = worst_violation(tree_.option_nodes[c].q_cost, budget);
        if (v < least) {
          least = v;
          best = c;
        }
      }
    }
    d.option = tree_.option_nodes[*best].option;
    diag.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    d.diagnostics = std::move(diag);
    return d;
  }

  /// Adapter for the episode executor.
  Selector<State> selector() {
    return [this](const Belief& b, const Budget& c, Rng& rng) {
      return select_option(b, c, rng);
    };
  }

  /// Lagrangian value Q - lambda^T Q_C of an option node.
  double lagrangian_value(const OptionNode& node) const {
    return node.q - dot(dual_.lambda, node.q_cost);
  }

  /// Root child maximizing Q_lambda (first inserted on ties).
  NodeId greedy_child(NodeId b) const {
    const auto& children = tree_.belief_nodes[b].children;
    if (children.empty()) throw std::logic_error("node has no children");
    NodeId best = children.front();
    double best_value = lagrangian_value(tree_.option_nodes[best]);
    for (NodeId c : children) {
      const double v = lagrangian_value(tree_.option_nodes[c]);
      if (v > best_value) {
        best_value = v;
        best = c;
      }
    }
    return best;
  }

  /// Progressive widening over options followed by the Lagrangian UCB rule.
  /// Unvisited children score +infinity; the first inserted wins ties.
  NodeId option_prog_widen(NodeId b, const Budget& budget, Rng& rng,
                           int depth = 0) {
    {
      const BeliefNode& node = tree_.belief_nodes[b];
      if (static_cast<double>(node.children.size()) <=
          cfg_.option_k * std::pow(static_cast<double>(node.visits),
                                   cfg_.option_alpha)) {
        std::vector<std::size_t> existing;
        existing.reserve(node.children.size());
        for (NodeId c : node.children) {
          existing.push_back(tree_.option_nodes[c].option);
        }
        const std::size_t o = sample_next_option(
            tree_.beliefs[b], clamp_positive(budget), options_, existing, rng);
        if (std::find(existing.begin(), existing.end(), o) == existing.end()) {
          OptionNode child;
          child.option = o;
          child.q_cost = CostVector::zeros(cost_dim());
          tree_.option_nodes.push_back(std::move(child));
          tree_.belief_nodes[b].children.push_back(tree_.option_nodes.size() - 1);
          trace(TraceEvent::Kind::kAddChild, depth, o);
        }
      }
    }

    const BeliefNode& node = tree_.belief_nodes[b];
    const double log_n = std::log(static_cast<double>(node.visits));
    NodeId best = node.children.front();
    double best_score = -std::numeric_limits<double>::infinity();
    for (NodeId c : node.children) {
      const OptionNode& child = tree_.option_nodes[c];
      double score;
      if (child.visits == 0) {
        score = std::numeric_limits<double>::infinity();
      } else {
        score = lagrangian_value(child) +
                cfg_.exploration * std::sqrt(log_n / child.visits);
      }
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    trace(TraceEvent::Kind::kSelect, depth, tree_.option_nodes[best].option);
    return best;
  }

  /// Imagines executing an option from b until it terminates, the belief
  /// becomes terminal, or the depth budget runs out.
  SemiMarkovTransition<State> option_rollout(const Belief& b, std::size_t o,
                                             int depth, Rng& rng) const {
    if (depth < 1) throw std::invalid_argument("option_rollout: depth >= 1");
    const auto& option = options_[o];
    const double gamma = model_.problem().discount;

    auto step = pf_generative_step(model_, b, option.action(b, 0), rng);
    SemiMarkovTransition<State> tr;
    tr.reward = step.reward;
    tr.cost = step.cost;
    tr.duration = 1;
    if (cfg_.record_steps) tr.steps.push_back({step.reward, step.cost});
    tr.belief = std::move(step.belief);
    if (step.exhausted) return tr;

    double discount = gamma;
    while (!all_terminal(model_, tr.belief) &&
           !option_terminates(option, tr.belief, tr.duration, rng) &&
           depth - tr.duration > 0) {
      auto next = pf_generative_step(model_, tr.belief,
                                     option.action(tr.belief, tr.duration), rng);
      tr.reward += discount * next.reward;
      tr.cost += next.cost * discount;
      if (cfg_.record_steps) tr.steps.push_back({next.reward, next.cost});
      ++tr.duration;
      discount *= gamma;
      tr.belief = std::move(next.belief);
    }
    return tr;
  }

  /// Leaf value. Default: chain uniformly random available options until the
  /// depth (capped by rollout_depth) is used up.
  ValueEstimate estimate_value(const Belief& b, const Budget& budget, int depth,
                               Rng& rng) {
    if (estimator_) return estimator_(b, budget, depth, rng);
    ValueEstimate out{0.0, CostVector::zeros(cost_dim())};
    if (cfg_.rollout_depth >= 0) depth = std::min(depth, cfg_.rollout_depth);
    const double gamma = model_.problem().discount;
    double discount = 1.0;
    Belief current = b;
    while (depth > 0 && !all_terminal(model_, current)) {
      const auto avail = available_options(options_, current);
      if (avail.empty()) break;
      const std::size_t o = avail[uniform_index(rng, avail.size())];
      auto tr = option_rollout(current, o, depth, rng);
      out.value += discount * tr.reward;
      out.cost += tr.cost * discount;
      if (path_) path_->insert(path_->end(), tr.steps.begin(), tr.steps.end());
      discount *= discount_power(gamma, tr.duration);
      depth -= tr.duration;
      current = std::move(tr.belief);
    }
    return out;
  }

  /// One tree query from belief node b with budget c and depth d.
  ValueEstimate simulate(NodeId b, const Budget& budget, int depth, Rng& rng,
                         int level = 0) {
    if (depth <= 0 || all_terminal(model_, tree_.beliefs[b])) {
      return {0.0, CostVector::zeros(cost_dim())};
    }
    const double gamma = model_.problem().discount;
    const NodeId a = option_prog_widen(b, budget, rng, level);

    double reward;
    CostVector cost;
    int tau;
    ValueEstimate next;
    const OptionNode& anode = tree_.option_nodes[a];
    if (static_cast<double>(anode.transitions.size()) <=
        cfg_.transition_k *
            std::pow(static_cast<double>(anode.visits), cfg_.transition_alpha)) {
      auto tr = option_rollout(tree_.beliefs[b], anode.option, depth, rng);
      reward = tr.reward;
      cost = tr.cost;
      tau = tr.duration;
      if (path_) path_->insert(path_->end(), tr.steps.begin(), tr.steps.end());
      const NodeId child = tree_.add_belief(std::move(tr.belief));
      tree_.option_nodes[a].transitions.push_back(
          {child, reward, cost, tau, std::move(tr.steps)});
      trace(TraceEvent::Kind::kNewTransition, level, tau, reward, cost);
      next = estimate_value(
          tree_.beliefs[child],
          propagate_budget_unclamped(budget, cost, gamma, tau), depth - tau, rng);
    } else {
      const std::size_t slot = uniform_index(rng, anode.transitions.size());
      const StoredTransition& tr = anode.transitions[slot];
      reward = tr.reward;
      cost = tr.cost;
      tau = tr.duration;
      const NodeId child = tr.child;
      if (path_) path_->insert(path_->end(), tr.steps.begin(), tr.steps.end());
      trace(TraceEvent::Kind::kReuseTransition, level, slot, reward, cost);
      next = simulate(child, propagate_budget_unclamped(budget, cost, gamma, tau),
                      depth - tau, rng, level + 1);
    }

    const double g = discount_power(gamma, tau);
    ValueEstimate out{reward + g * next.value, cost + next.cost * g};

    ++tree_.belief_nodes[b].visits;
    OptionNode& node = tree_.option_nodes[a];
    ++node.visits;
    node.q += (out.value - node.q) / node.visits;
    node.q_cost += (out.cost - node.q_cost) / static_cast<double>(node.visits);
    trace(TraceEvent::Kind::kBackup, level, node.option, out.value, out.cost);
    return out;
  }

  /// Collects the raw underlying-step outcomes of subsequent simulate calls
  /// in path order (requires record_steps). Pass nullptr to stop.
  void record_path(std::vector<StepOutcome>* path) { path_ = path; }

 private:
  void trace(TraceEvent::Kind kind, int depth, std::size_t index,
             double value = 0.0, const CostVector& cost = {}) {
    if (tracer_) tracer_(TraceEvent{kind, depth, index, value, cost});
  }

  const M& model_;
  Options options_;
  PlannerConfig cfg_;
  SearchTree<State> tree_;
  DualState dual_;
  Estimator estimator_;
  Tracer tracer_;
  std::vector<StepOutcome>* path_ = nullptr;
};

}  // namespace cobets
