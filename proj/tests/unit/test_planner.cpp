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

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "cobets/domains/lightdark.hpp"
#include "cobets/domains/minichain.hpp"
#include "cobets/planner/planner.hpp"
#include "cobets/planner/tree_size.hpp"
#include "doctest.h"
#include "support/cpft_dpw_reference.hpp"

using namespace cobets;

namespace {

// Deterministic line: s' = s + a, reward r(a), cost c(a), noiseless sensor.
struct Line {
  using State = int;
  using Action = int;
  using Observation = int;
  ProblemSpec spec{0.9, Budget{0.1}};
  std::map<int, double> reward{{0, 0.0}, {1, -1.0}, {2, 1.0}};
  std::map<int, double> cost{{0, 0.0}, {1, 0.0}, {2, 0.2}};
  const ProblemSpec& problem() const { return spec; }
  std::vector<int> actions() const { return {0, 1, 2}; }
  bool is_terminal(int s) const { return s >= 1000; }
  GenerativeStep<int, int> step(int s, int a, Rng&) const {
    return {s + a, s + a, reward.at(a), CostVector{cost.at(a)}};
  }
  double observation_density(int, int n, int o) const { return n == o ? 1.0 : 0.0; }
  int sample_initial_state(Rng&) const { return 0; }
  int jitter(int s, Rng&) const { return s; }
};

using LineOption = OptionSpec<int, int>;
using LineOptions = OptionSet<int, int>;

LineOption scripted(std::string label, std::vector<int> plan) {
  LineOption o;
  o.label = std::move(label);
  o.policy = [plan](const ParticleBelief<int>&, int k) {
    return plan[std::min<std::size_t>(k, plan.size() - 1)];
  };
  const int len = static_cast<int>(plan.size());
  o.termination = [len](const ParticleBelief<int>&, int k) { return k >= len ? 1.0 : 0.0; };
  return o;
}

LineOption looping(std::string label, int a) {
  LineOption o;
  o.label = std::move(label);
  o.policy = [a](const ParticleBelief<int>&, int) { return a; };
  o.termination = [](const ParticleBelief<int>&, int) { return 0.0; };
  return o;
}

PlannerConfig small_config() {
  PlannerConfig c;
  c.queries = 50;
  c.max_depth = 5;
  c.particles = 1;
  return c;
}

}  // namespace

TEST_CASE("dual_update examples") {
  DualState d{Multipliers{0.0}, 0};
  d = dual_update(d, CostVector{0.2}, Budget{0.1}, 0.1);
  CHECK(d.lambda[0] == doctest::Approx(0.01));
  CHECK(d.iteration == 1);
  d = dual_update({Multipliers{0.005}, 0}, CostVector{0.0}, Budget{0.1}, 0.1);
  CHECK(d.lambda[0] == 0.0);
  d = dual_update({Multipliers{0.3}, 0}, CostVector{0.1}, Budget{0.1}, 0.7);
  CHECK(d.lambda[0] == 0.3);
  CHECK_THROWS(dual_update(d, CostVector{0.1}, Budget{0.1}, 0.0));
  CHECK(dual_step_size(2.0, 4) == 1.0);
}

TEST_CASE("lambda stays nonnegative under random updates") {
  Rng rng(1);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  DualState d{Multipliers{0.0, 0.0}, 0};
  for (int i = 1; i <= 10000; ++i) {
    d = dual_update(d, CostVector{u(rng), u(rng)}, Budget{u(rng), u(rng)},
                    dual_step_size(u(rng) + 0.01, i));
    REQUIRE(d.lambda[0] >= 0.0);
    REQUIRE(d.lambda[1] >= 0.0);
  }
}

TEST_CASE("sample_next_option") {
  Rng rng(2);
  ParticleBelief<int> b({0});
  LineOptions one({looping("a", 0)});
  CHECK(sample_next_option(b, Budget{0.1}, one, {}, rng) == 0);
  LineOptions four({looping("a", 0), looping("b", 0), looping("c", 0), looping("d", 0)});
  const auto again = sample_next_option(b, Budget{0.1}, four, {0, 1, 2, 3}, rng);
  CHECK(again < 4);
  CHECK(sample_next_option(b, Budget{0.1}, four, {0, 1, 3}, rng) == 2);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 10000; ++i) ++counts[sample_next_option(b, Budget{0.1}, four, {}, rng)];
  for (int c : counts) CHECK(std::abs(c / 10000.0 - 0.25) <= 0.02);
  auto gated = looping("g", 0);
  gated.initiation = [](const ParticleBelief<int>&) { return false; };
  LineOptions none({gated});
  CHECK_THROWS_AS(sample_next_option(b, Budget{0.1}, none, {}, rng), NoAvailableOption);
}

TEST_CASE("option_rollout examples") {
  Line model;
  model.reward[1] = -1.0;
  LineOptions opts({primitive_option<int, int>("p", 1), looping("loop", 1),
                    scripted("two", {1, 1})});
  Planner<Line> planner(model, opts, small_config());
  Rng rng(3);
  ParticleBelief<int> b({0});
  const auto one = planner.option_rollout(b, 0, 5, rng);
  CHECK(one.duration == 1);
  CHECK(one.reward == -1.0);
  const auto loop = planner.option_rollout(b, 1, 3, rng);
  CHECK(loop.duration == 3);
  CHECK(loop.belief.particle(0) == 3);
  const auto two = planner.option_rollout(b, 2, 10, rng);
  CHECK(two.duration == 2);
  CHECK(two.reward == doctest::Approx(-1.9));
  CHECK_THROWS(planner.option_rollout(b, 0, 0, rng));
}

TEST_CASE("simulate base cases") {
  Line model;
  LineOptions opts({primitive_option<int, int>("p", 2)});
  Planner<Line> planner(model, opts, small_config());
  Rng rng(4);
  const NodeId root = planner.reset_tree(ParticleBelief<int>({0}));
  const auto zero = planner.simulate(root, Budget{0.1}, 0, rng);
  CHECK(zero.value == 0.0);
  CHECK(zero.cost == CostVector{0.0});
  const auto v = planner.simulate(root, Budget{0.1}, 3, rng);
  // Single path of three +2 steps: reward 1 and cost 0.2 each.
  CHECK(v.value == doctest::Approx(1 + 0.9 + 0.81));
  CHECK(v.cost[0] == doctest::Approx(0.2 * (1 + 0.9 + 0.81)));
  const auto e = planner.estimate_value(ParticleBelief<int>({0}), Budget{0.1}, 0, rng);
  CHECK(e.value == 0.0);
}

TEST_CASE("option_prog_widen rules") {
  Line model;
  LineOptions opts({primitive_option<int, int>("a", 0), primitive_option<int, int>("b", 1),
                    primitive_option<int, int>("c", 2), primitive_option<int, int>("d", 0)});
  SUBCASE("unvisited children win, first inserted first") {
    PlannerConfig c = small_config();
    c.option_k = 100;
    Planner<Line> planner(model, opts, c);
    Rng rng(5);
    const NodeId root = planner.reset_tree(ParticleBelief<int>({0}));
    const NodeId first = planner.option_prog_widen(root, Budget{0.1}, rng);
    CHECK(first == planner.tree().belief_nodes[root].children.front());
  }
  SUBCASE("widening threshold") {
    LineOptions six({primitive_option<int, int>("a", 0), primitive_option<int, int>("b", 1),
                     primitive_option<int, int>("c", 2), primitive_option<int, int>("d", 0),
                     primitive_option<int, int>("e", 1), primitive_option<int, int>("f", 2)});
    PlannerConfig c = small_config();
    c.option_k = 2;
    c.option_alpha = 0.5;
    Planner<Line> planner(model, six, c);
    Rng rng(6);
    const NodeId root = planner.reset_tree(ParticleBelief<int>({0}));
    for (int i = 0; i < 12; ++i) {
      const auto& node = planner.tree().belief_nodes[root];
      const std::size_t before = node.children.size();
      const bool widen = before <= 2.0 * std::sqrt(static_cast<double>(node.visits));
      planner.simulate(root, Budget{0.1}, 1, rng);
      CHECK(planner.tree().belief_nodes[root].children.size() ==
            std::min<std::size_t>(6, before + (widen ? 1 : 0)));
    }
    // N(b) = 4 and |C(b)| = 3 widens since 3 <= 2 sqrt(4).
    CHECK(3.0 <= 2.0 * std::sqrt(4.0));
  }
  SUBCASE("kappa 0 and lambda 0 pick the best Q") {
    PlannerConfig c = small_config();
    c.option_k = 100;
    c.exploration = 0;
    Planner<Line> planner(model, opts, c);
    Rng rng(7);
    const NodeId root = planner.reset_tree(ParticleBelief<int>({0}));
    for (int i = 0; i < 20; ++i) planner.simulate(root, Budget{0.1}, 1, rng);
    const NodeId pick = planner.option_prog_widen(root, Budget{0.1}, rng);
    CHECK(planner.options()[planner.tree().option_nodes[pick].option].label == "c");
  }
}

TEST_CASE("select_option feasibility filter") {
  Line model;
  SUBCASE("single option") {
    LineOptions opts({primitive_option<int, int>("only", 1)});
    PlannerConfig c = small_config();
    c.queries = 1;
    Planner<Line> planner(model, opts, c);
    Rng rng(8);
    CHECK(planner.select_option(ParticleBelief<int>({0}), Budget{0.1}, rng).option == 0);
  }
  SUBCASE("costly high-Q option rejected") {
    LineOptions opts({primitive_option<int, int>("costly", 2), primitive_option<int, int>("free", 0)});
    PlannerConfig c = small_config();
    c.max_depth = 1;
    c.option_k = 10;
    Planner<Line> planner(model, opts, c);
    Rng rng(9);
    const auto d = planner.select_option(ParticleBelief<int>({0}), Budget{0.1}, rng);
    CHECK(opts[d.option].label == "free");
    CHECK_FALSE(d.diagnostics->infeasible_fallback);
  }
  SUBCASE("no feasible child falls back to least violation") {
    model.cost[0] = 0.5;
    model.cost[1] = 0.3;
    LineOptions opts({primitive_option<int, int>("worse", 0), primitive_option<int, int>("less", 1)});
    PlannerConfig c = small_config();
    c.max_depth = 1;
    c.option_k = 10;
    Planner<Line> planner(model, opts, c);
    Rng rng(10);
    const auto d = planner.select_option(ParticleBelief<int>({0}), Budget{0.1}, rng);
    CHECK(opts[d.option].label == "less");
    CHECK(d.diagnostics->infeasible_fallback);
  }
}

TEST_CASE("tree statistics invariants after every query") {
  lightdark::Model model;
  const auto opts = lightdark::make_options(lightdark::parse_catalog("uncertainty:8"), model.params());
  PlannerConfig c;
  c.queries = 1;
  c.max_depth = 20;
  c.particles = 30;
  c.option_k = 1.5;
  c.transition_k = 1.5;
  Planner<lightdark::Model> planner(model, opts, c);
  Rng rng(11);
  const NodeId root = planner.reset_tree(sample_initial_belief(model, 30, rng));
  for (int q = 0; q < 300; ++q) {
    planner.simulate(root, Budget{0.1}, c.max_depth, rng);
    const auto& tree = planner.tree();
    for (const auto& bn : tree.belief_nodes) {
      int sum = 0;
      for (NodeId ch : bn.children) sum += tree.option_nodes[ch].visits;
      REQUIRE(bn.visits == sum);
      REQUIRE(bn.children.size() <= c.option_k * std::pow(bn.visits, c.option_alpha) + 1);
    }
    for (const auto& on : tree.option_nodes) {
      REQUIRE(on.transitions.size() <=
              c.transition_k * std::pow(on.visits, c.transition_alpha) + 1);
      for (const auto& tr : on.transitions) REQUIRE(tr.duration >= 1);
    }
  }
}

TEST_CASE("backed-up values equal the flat discounted sum of the path") {
  lightdark::Model model;
  const auto opts = lightdark::make_options(lightdark::parse_catalog("base4"), model.params());
  PlannerConfig c;
  c.max_depth = 25;
  c.particles = 20;
  c.record_steps = true;
  Planner<lightdark::Model> planner(model, opts, c);
  Rng rng(12);
  const NodeId root = planner.reset_tree(sample_initial_belief(model, 20, rng));
  for (int q = 0; q < 200; ++q) {
    std::vector<StepOutcome> path;
    planner.record_path(&path);
    const auto v = planner.simulate(root, Budget{0.1}, c.max_depth, rng);
    const auto flat = discounted_return(path, model.problem().discount);
    CHECK(std::abs(v.value - flat.reward) <= 1e-9);
    CHECK(std::abs(v.cost[0] - flat.cost[0]) <= 1e-9);
    CHECK(path.size() <= static_cast<std::size_t>(c.max_depth));
  }
}

TEST_CASE("random-option rollouts match the exact random-policy value") {
  minichain::Model model;
  PlannerConfig c;
  c.particles = 50;
  Planner<minichain::Model> planner(model, minichain::primitive_options(), c);
  Rng rng(13);
  const int depth = 5;
  const auto exact = minichain::uniform_random_value(model, model.params().initial, depth);
  const int n = 10000;
  double sum = 0.0, sq = 0.0, csum = 0.0, csq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto b = sample_initial_belief(model, 50, rng);
    const auto v = planner.estimate_value(b, Budget{0.05}, depth, rng);
    sum += v.value;
    sq += v.value * v.value;
    csum += v.cost[0];
    csq += v.cost[0] * v.cost[0];
  }
  const double mean = sum / n, cmean = csum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  const double cse = std::sqrt((csq / n - cmean * cmean) / n);
  CHECK(std::abs(mean - exact.first) <= 3 * se);
  CHECK(std::abs(cmean - exact.second) <= 3 * cse);
}

TEST_CASE("zero-reward domain rolls out to zero value") {
  Line model;
  model.reward = {{0, 0.0}, {1, 0.0}, {2, 0.0}};
  LineOptions opts({primitive_option<int, int>("a", 1), looping("b", 2)});
  Planner<Line> planner(model, opts, small_config());
  Rng rng(14);
  for (int i = 0; i < 100; ++i) {
    CHECK(planner.estimate_value(ParticleBelief<int>({0}), Budget{0.1}, 7, rng).value == 0.0);
  }
}

TEST_CASE("Q converges to the exact open-loop option value on the mini-chain") {
  minichain::Model model;
  const auto all = minichain::primitive_options();
  for (int a : {minichain::kRisky, minichain::kSafe}) {
    minichain::Options single({all[static_cast<std::size_t>(a)]});
    PlannerConfig c;
    c.max_depth = model.params().horizon;
    c.particles = 200;
    c.queries = 2000;
    Planner<minichain::Model> planner(model, single, c);
    Rng rng(15 + a);
    const NodeId root = planner.reset_tree(sample_initial_belief(model, 200, rng));
    for (int q = 0; q < c.queries; ++q) planner.simulate(root, Budget{0.05}, c.max_depth, rng);
    const auto exact = minichain::evaluate_policy(
        model, *minichain::constant_policy(a, c.max_depth), c.max_depth);
    const auto& node = planner.tree().option_nodes[planner.tree().belief_nodes[root].children[0]];
    CHECK(std::abs(node.q - exact.first) <= 0.05);
    CHECK(std::abs(node.q_cost[0] - exact.second) <= 0.05);
  }
}

TEST_CASE("primitive options trace identically to a flat CPFT-DPW") {
  minichain::Model model;
  const auto opts = minichain::primitive_options();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PlannerConfig c;
    c.queries = 200;
    c.max_depth = 6;
    c.particles = 40;
    c.exploration = 0.5;
    c.option_k = 1.0;
    c.option_alpha = 0.5;
    c.transition_k = 2.0;
    c.transition_alpha = 0.3;
    c.dual_step = 5.0;
    Planner<minichain::Model> planner(model, opts, c);
    std::vector<TraceEvent> got;
    planner.set_tracer([&](const TraceEvent& e) { got.push_back(e); });

    testing::CpftDpw<minichain::Model>::Params p;
    p.queries = c.queries;
    p.depth = c.max_depth;
    p.c = c.exploration;
    p.k_a = c.option_k;
    p.alpha_a = c.option_alpha;
    p.k_o = c.transition_k;
    p.alpha_o = c.transition_alpha;
    p.alpha0 = c.dual_step;
    testing::CpftDpw<minichain::Model> ref(model, {minichain::kRisky, minichain::kSafe}, p);

    Rng init(seed);
    const auto b = sample_initial_belief(model, 40, init);
    Rng r1(derive_seed(seed, 1)), r2(derive_seed(seed, 1));
    const auto d = planner.select_option(b, Budget{0.05}, r1);
    const auto a = ref.plan(b, 0.05, r2);
    CHECK(d.option == a);
    CHECK(planner.dual().lambda[0] == ref.lambda());
    REQUIRE(got.size() == ref.events.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      REQUIRE(got[i].kind == ref.events[i].kind);
      REQUIRE(got[i].depth == ref.events[i].depth);
      REQUIRE(got[i].index == ref.events[i].index);
      REQUIRE(got[i].value == ref.events[i].value);
      REQUIRE(got[i].cost == ref.events[i].cost);
    }
    CHECK(r1() == r2());
  }
}

TEST_CASE("tree_size_ratio") {
  CHECK(tree_size_ratio(7, 10, 1, 1, 10, 1) == doctest::Approx(1.0));
  CHECK(tree_size_ratio(2, 2, 1, 1, 4, 2) == doctest::Approx(1.0 / 16));
  const double A = 7, O = 10, c1 = 2, c2 = 1, T = 10, tau = 5;
  const double direct = std::pow(c1 * c2 * A * O, T / tau) / std::pow(A * O, T);
  const double simplified = std::pow(c1 * c2, T / tau) / std::pow(A * O, T * (tau - 1) / tau);
  CHECK(tree_size_ratio(A, O, c1, c2, T, tau) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(direct == doctest::Approx(simplified).epsilon(1e-12));
  CHECK_THROWS(tree_size_ratio(0, 1, 1, 1, 1, 1));
  CHECK_THROWS(tree_size_ratio(1, 1, 1, 1, 1, 0.5));
}
