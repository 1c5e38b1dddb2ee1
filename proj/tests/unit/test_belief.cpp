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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "cobets/belief/particle_belief.hpp"
#include "cobets/domains/lightdark.hpp"
#include "cobets/domains/minichain.hpp"
#include "doctest.h"

using namespace cobets;

namespace {

// Deterministic counter domain with a noiseless sensor: s' = s + a, o = s'.
struct Counter {
  using State = int;
  using Action = int;
  using Observation = int;
  ProblemSpec spec{0.9, Budget{1.0}};
  const ProblemSpec& problem() const { return spec; }
  std::vector<int> actions() const { return {-1, 1}; }
  bool is_terminal(int s) const { return s >= 100; }
  GenerativeStep<int, int> step(int s, int a, Rng&) const {
    return {s + a, s + a, static_cast<double>(s), CostVector{s > 3 ? 1.0 : 0.0}};
  }
  double observation_density(int, int next, int o) const {
    return next == o ? 1.0 : 0.0;
  }
  int sample_initial_state(Rng& rng) const {
    return static_cast<int>(uniform_index(rng, 6));
  }
  int jitter(int s, Rng&) const { return s; }
};

double weight_sum(const std::vector<double>& w) {
  double t = 0.0;
  for (double x : w) t += x;
  return t;
}

}  // namespace

TEST_CASE("ParticleBelief validates and normalizes") {
  ParticleBelief<int> b({1, 2, 3}, {1.0, 1.0, 2.0});
  CHECK(b.weight(2) == doctest::Approx(0.5));
  CHECK_THROWS(ParticleBelief<int>(std::vector<int>{}));
  CHECK_THROWS(ParticleBelief<int>({1, 2}, {1.0}));
  CHECK_THROWS(ParticleBelief<int>({1, 2}, {0.0, 0.0}));
  CHECK_THROWS(ParticleBelief<int>({1, 2}, {-1.0, 2.0}));
}

TEST_CASE("systematic resampling reproduces weights") {
  Rng rng(1);
  const std::vector<double> w = {0.1, 0.2, 0.3, 0.4};
  const auto idx = systematic_resample(w, 1000, rng);
  std::vector<int> counts(4, 0);
  for (auto i : idx) ++counts[i];
  for (int i = 0; i < 4; ++i) CHECK(std::abs(counts[i] - 1000 * w[i]) <= 1.0);
}

TEST_CASE("point-mass belief steps to a point mass") {
  Counter model;
  Rng rng(2);
  ParticleBelief<int> b(std::vector<int>(10, 2));
  const auto out = pf_generative_step(model, b, 1, rng);
  for (int s : out.belief.particles()) CHECK(s == 3);
  CHECK(out.reward == 2.0);
  CHECK(out.cost[0] == 0.0);
}

TEST_CASE("LightDark particles at 0 moved by +1") {
  lightdark::Model model;
  Rng rng(3);
  lightdark::Belief b(std::vector<lightdark::State>(50, {0.0, false}));
  const auto out = pf_generative_step(model, b, 1, rng);
  for (const auto& s : out.belief.particles()) CHECK(s.position == 1.0);
  CHECK(out.reward == -1.0);
  CHECK(out.cost[0] == 0.0);
}

TEST_CASE("pf_generative_step reports exhausted beliefs") {
  Counter model;
  Rng rng(4);
  ParticleBelief<int> b(std::vector<int>(5, 100));
  const auto out = pf_generative_step(model, b, 1, rng);
  CHECK(out.exhausted);
  CHECK(out.reward == 0.0);
}

TEST_CASE("mini-chain mean reward within three standard errors") {
  minichain::Params p;
  p.step_reward = -0.1;
  minichain::Model model(p);
  Rng rng(5);
  const std::size_t m = 10000;
  std::vector<int> particles;
  for (std::size_t i = 0; i < m; ++i) particles.push_back(static_cast<int>(i % 5));
  ParticleBelief<int> b(particles);
  const auto dist = minichain::to_distribution(b);
  for (int a : {minichain::kRisky, minichain::kSafe}) {
    // Oracle: exact per-state reward mean and variance.
    double mean = 0.0, second = 0.0;
    for (int s = 0; s < minichain::kNumStates; ++s) {
      for (int n = 0; n < minichain::kNumStates; ++n) {
        const double pr = dist[s] * model.transition(s, a, n);
        mean += pr * model.reward(s, a, n);
        second += pr * model.reward(s, a, n) * model.reward(s, a, n);
      }
    }
    const double se = std::sqrt((second - mean * mean) / m);
    const auto out = pf_generative_step(model, b, a, rng);
    CHECK(std::abs(out.reward - mean) <= 3.0 * se + 1e-12);
    CHECK(minichain::expected_reward(model, dist, a) == doctest::Approx(mean));
  }
}

TEST_CASE("noiseless update concentrates on the true successor") {
  Counter model;
  Rng rng(6);
  ParticleBelief<int> b({0, 1, 2, 3, 4, 5});
  const auto out = update_belief(model, b, 1, 4, rng);
  for (int s : out.belief.particles()) CHECK(s == 4);
  CHECK_FALSE(out.degenerate);
}

TEST_CASE("zero likelihood engages the rescue") {
  Counter model;
  Rng rng(7);
  ParticleBelief<int> b({0, 1, 2});
  const auto out = update_belief(model, b, 1, 50, rng);
  CHECK(out.degenerate);
  CHECK(out.belief.size() == 3);
  CHECK(weight_sum(out.belief.weights()) == doctest::Approx(1.0));
}

TEST_CASE("posterior is tighter near the light") {
  lightdark::Model model;
  Rng rng(8);
  auto spread_after = [&](double center) {
    double total = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      std::normal_distribution<double> n(center, 1.0);
      std::vector<lightdark::State> ps;
      for (int i = 0; i < 2000; ++i) ps.push_back({n(rng), false});
      lightdark::Belief b(ps);
      const auto obs = model.step({center, false}, 1, rng).observation;
      total += lightdark::position_stats(update_belief(model, b, 1, obs, rng).belief).spread;
    }
    return total / 20;
  };
  CHECK(spread_after(9.0) < spread_after(-1.0));
}

TEST_CASE("mini-chain posterior matches the exact Bayes filter") {
  minichain::Model model;
  Rng rng(9);
  const std::size_t m = 10000;
  std::vector<int> ps;
  for (std::size_t i = 0; i < m; ++i) ps.push_back(model.sample_initial_state(rng));
  ParticleBelief<int> b(ps);
  minichain::Distribution exact = model.params().initial;
  const int actions[] = {minichain::kRisky, minichain::kSafe, minichain::kRisky};
  const int obs[] = {0, 1, 1};
  for (int k = 0; k < 3; ++k) {
    b = update_belief(model, b, actions[k], obs[k], rng).belief;
    // Oracle: enumerate the Bayes update directly from the tables.
    minichain::Distribution next{};
    double z = 0.0;
    for (int s = 0; s < minichain::kNumStates; ++s) {
      for (int n = 0; n < minichain::kNumStates; ++n) {
        const double v = exact[s] * model.transition(s, actions[k], n) *
                         model.observation_prob(n, obs[k]);
        next[n] += v;
        z += v;
      }
    }
    for (double& v : next) v /= z;
    exact = next;
    const auto approx = minichain::to_distribution(b);
    double tv = 0.0;
    for (int s = 0; s < minichain::kNumStates; ++s) tv += std::abs(approx[s] - exact[s]);
    CHECK(0.5 * tv <= 0.05);
    const auto lib = minichain::bayes_update(model, model.params().initial, minichain::kRisky, 0);
    if (k == 0) {
      for (int s = 0; s < minichain::kNumStates; ++s) CHECK(lib[s] == doctest::Approx(exact[s]));
    }
  }
}

TEST_CASE("belief_stats examples") {
  auto id = [](double x) { return x; };
  const auto a = belief_stats(ParticleBelief<double>({1.0, 1.0, 1.0}), id);
  CHECK(a.mean[0] == 1.0);
  CHECK(a.spread[0] == 0.0);
  const auto b = belief_stats(ParticleBelief<double>({0.0, 2.0}), id);
  CHECK(b.mean[0] == 1.0);
  CHECK(b.spread[0] == 1.0);
  const auto v = belief_stats(ParticleBelief<double>({0.0, 2.0}),
                              [](double x) { return std::vector<double>{x, -x}; });
  CHECK(v.mean[1] == -1.0);
  CHECK(v.spread[1] == 1.0);

  Rng rng(10);
  std::normal_distribution<double> n(2.0, 2.0);
  std::vector<double> xs;
  for (int i = 0; i < 10000; ++i) xs.push_back(n(rng));
  const auto s = belief_stats(ParticleBelief<double>(xs), id);
  CHECK(std::abs(s.mean[0] - 2.0) <= 0.07);
  CHECK(std::abs(s.spread[0] - 2.0) <= 0.05);
}

TEST_CASE("belief invariants under randomized operations") {
  minichain::Model chain;
  lightdark::Model dark;
  Rng rng(11);
  ParticleBelief<int> cb = sample_initial_belief(chain, 37, rng);
  lightdark::Belief db = sample_initial_belief(dark, 23, rng);
  int ops = 0;
  while (ops < 100000) {
    const int a = static_cast<int>(uniform_index(rng, 2));
    const int o = static_cast<int>(uniform_index(rng, 2));
    const auto prev = cb;
    const auto step = uniform01(rng) < 0.5 ? pf_generative_step(chain, cb, a, rng)
                                           : update_belief(chain, cb, a, o, rng);
    REQUIRE(step.belief.size() == 37);
    REQUIRE(std::abs(weight_sum(step.belief.weights()) - 1.0) <= 1e-9);
    if (!step.exhausted) {
      // Convex combination of per-particle rewards and costs.
      double lo = 1e300, hi = -1e300;
      for (int s : prev.particles()) {
        for (int n = 0; n < minichain::kNumStates; ++n) {
          if (chain.transition(s, a, n) > 0) {
            lo = std::min(lo, chain.reward(s, a, n));
            hi = std::max(hi, chain.reward(s, a, n));
          }
        }
      }
      REQUIRE(step.reward >= lo - 1e-12);
      REQUIRE(step.reward <= hi + 1e-12);
      REQUIRE(step.cost[0] >= 0.0);
      REQUIRE(step.cost[0] <= chain.params().slip_cost);
    }
    cb = all_terminal(chain, step.belief) ? sample_initial_belief(chain, 37, rng)
                                          : step.belief;
    ++ops;

    const int da = lightdark::kActions[1 + uniform_index(rng, 6)];
    auto dstep = pf_generative_step(dark, db, da, rng);
    REQUIRE(dstep.belief.size() == 23);
    REQUIRE(std::abs(weight_sum(dstep.belief.weights()) - 1.0) <= 1e-9);
    REQUIRE(dstep.reward == -1.0);
    db = std::abs(lightdark::position_stats(dstep.belief).mean) > 60
             ? sample_initial_belief(dark, 23, rng)
             : dstep.belief;
    ++ops;
  }
}

TEST_CASE("noiseless updates never add distinct particle values") {
  Counter model;
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    ParticleBelief<int> b = sample_initial_belief(model, 20, rng);
    const int a = uniform01(rng) < 0.5 ? -1 : 1;
    const int o = b.particle(uniform_index(rng, 20)) + a;
    const auto out = update_belief(model, b, a, o, rng);
    const std::set<int> before(b.particles().begin(), b.particles().end());
    const std::set<int> after(out.belief.particles().begin(), out.belief.particles().end());
    CHECK(after.size() <= before.size());
  }
}

TEST_CASE("resample_belief keeps the requested size") {
  Rng rng(13);
  ParticleBelief<int> b({0, 1, 2, 3}, {0.0, 0.0, 0.5, 0.5});
  const auto r = resample_belief(b, 10, rng);
  CHECK(r.size() == 10);
  for (int s : r.particles()) CHECK(s >= 2);
}
