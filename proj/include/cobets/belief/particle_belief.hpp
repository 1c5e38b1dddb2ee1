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

#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "cobets/core/cost_vector.hpp"
#include "cobets/core/model.hpp"
#include "cobets/core/rng.hpp"

namespace cobets {

/// Total likelihood below which an update counts as degenerate.
inline constexpr double kDegenerateLikelihood = 1e-12;

/// Weighted particle approximation of a belief. Weights always sum to one.
template <typename State>
class ParticleBelief {
 public:
  ParticleBelief() = default;

  explicit ParticleBelief(std::vector<State> particles)
      : particles_(std::move(particles)) {
    if (particles_.empty()) {
      throw std::invalid_argument("belief needs at least one particle");
    }
    weights_.assign(particles_.size(), 1.0 / particles_.size());
  }

  ParticleBelief(std::vector<State> particles, std::vector<double> weights)
      : particles_(std::move(particles)), weights_(std::move(weights)) {
    if (particles_.empty()) {
      throw std::invalid_argument("belief needs at least one particle");
    }
    if (weights_.size() != particles_.size()) {
      throw std::invalid_argument("particle/weight count mismatch");
    }
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("particle weights must be finite and >= 0");
      }
      total += w;
    }
    if (!(total > 0.0)) {
      throw std::invalid_argument("particle weights sum to zero");
    }
    for (double& w : weights_) w /= total;
  }

  std::size_t size() const { return particles_.size(); }
  const std::vector<State>& particles() const { return particles_; }
  const std::vector<double>& weights() const { return weights_; }
  /// Sum of the stored weights; 1 up to rounding.
  double total_weight() const {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
  }
  const State& particle(std::size_t i) const { return particles_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// Index drawn proportionally to weight.
  std::size_t sample_index(Rng& rng) const {
    double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      acc += weights_[i];
      if (u < acc) return i;
    }
    return weights_.size() - 1;
  }

 private:
  std::vector<State> particles_;
  std::vector<double> weights_;
};

/// Systematic resampling: one uniform offset, m evenly spaced pointers.
inline std::vector<std::size_t> systematic_resample(
    std::span<const double> weights, std::size_t m, Rng& rng) {
  std::vector<std::size_t> idx;
  idx.reserve(m);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double step = total / static_cast<double>(m);
  double u = uniform01(rng) * step;
  double cumulative = weights[0];
  std::size_t j = 0;
  for (std::size_t i = 0; i < m; ++i) {
    while (u > cumulative && j + 1 < weights.size()) {
      ++j;
      cumulative += weights[j];
    }
    idx.push_back(j);
    u += step;
  }
  return idx;
}

/// Draws an m-particle belief from b by systematic resampling.
template <typename State>
ParticleBelief<State> resample_belief(const ParticleBelief<State>& b,
                                      std::size_t m, Rng& rng) {
  if (m == 0) throw std::invalid_argument("particle count must be >= 1");
  std::vector<State> out;
  out.reserve(m);
  for (std::size_t i : systematic_resample(b.weights(), m, rng)) {
    out.push_back(b.particle(i));
  }
  return ParticleBelief<State>(std::move(out));
}

template <GenerativeModel M>
ParticleBelief<typename M::State> sample_initial_belief(const M& model,
                                                        std::size_t m,
                                                        Rng& rng) {
  if (m == 0) throw std::invalid_argument("particle count must be >= 1");
  std::vector<typename M::State> particles;
  particles.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    particles.push_back(model.sample_initial_state(rng));
  }
  return ParticleBelief<typename M::State>(std::move(particles));
}

template <GenerativeModel M>
bool all_terminal(const M& model, const ParticleBelief<typename M::State>& b) {
  for (const auto& s : b.particles()) {
    if (!model.is_terminal(s)) return false;
  }
  return true;
}

/// Result of one belief transition. reward and cost are the belief-weighted
/// means over particles, i.e. estimates of R(b, a) and C(b, a).
template <typename State>
struct BeliefStep {
  ParticleBelief<State> belief;
  double reward = 0.0;
  CostVector cost;
  bool exhausted = false;   // every particle was already terminal
  bool degenerate = false;  // depletion rescue engaged
};

namespace detail {

template <GenerativeModel M>
BeliefStep<typename M::State> weight_and_resample(
    const M& model, const ParticleBelief<typename M::State>& prior,
    const typename M::Action& a, std::vector<typename M::State> propagated,
    const typename M::Observation& o, double reward, CostVector cost,
    Rng& rng) {
  using State = typename M::State;
  const std::size_t m = prior.size();
  std::vector<double> w(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = prior.weight(i) * model.observation_density(a, propagated[i], o);
    total += w[i];
  }

  BeliefStep<State> out;
  out.reward = reward;
  out.cost = std::move(cost);
  if (!(total >= kDegenerateLikelihood) || !std::isfinite(total)) {
    for (auto& s : propagated) s = model.jitter(s, rng);
    out.belief = ParticleBelief<State>(std::move(propagated));
    out.degenerate = true;
    return out;
  }

  const auto idx = systematic_resample(w, m, rng);
  std::vector<State> resampled;
  resampled.reserve(m);
  for (std::size_t i : idx) resampled.push_back(propagated[i]);
  out.belief = ParticleBelief<State>(std::move(resampled));
  return out;
}

}  // namespace detail

/// Generative particle-filter step used inside the search tree. Each particle
/// is pushed through the model once; one particle drawn by weight supplies the
/// reference observation against which all particles are reweighted and
/// resampled, so the successor belief is itself random.
template <GenerativeModel M>
BeliefStep<typename M::State> pf_generative_step(
    const M& model, const ParticleBelief<typename M::State>& b,
    const typename M::Action& a, Rng& rng) {
  using State = typename M::State;
  const std::size_t m = b.size();
  const std::size_t k = model.problem().cost_dim();
  if (all_terminal(model, b)) {
    BeliefStep<State> out{b, 0.0, CostVector::zeros(k)};
    out.exhausted = true;
    return out;
  }

  std::vector<State> propagated;
  propagated.reserve(m);
  std::vector<typename M::Observation> observations;
  observations.reserve(m);
  double reward = 0.0;
  CostVector cost = CostVector::zeros(k);
  for (std::size_t i = 0; i < m; ++i) {
    auto step = model.step(b.particle(i), a, rng);
    reward += b.weight(i) * step.reward;
    cost += step.cost * b.weight(i);
    propagated.push_back(std::move(step.next_state));
    observations.push_back(std::move(step.observation));
  }
  reward /= b.total_weight();
  cost /= b.total_weight();
  const std::size_t ref = b.sample_index(rng);
  return detail::weight_and_resample(model, b, a, std::move(propagated),
                                     observations[ref], reward,
                                     std::move(cost), rng);
}

/// Bootstrap filter update against an observation received from the
/// environment after executing a.
template <GenerativeModel M>
BeliefStep<typename M::State> update_belief(
    const M& model, const ParticleBelief<typename M::State>& b,
    const typename M::Action& a, const typename M::Observation& o, Rng& rng) {
  using State = typename M::State;
  const std::size_t m = b.size();
  const std::size_t k = model.problem().cost_dim();
  std::vector<State> propagated;
  propagated.reserve(m);
  double reward = 0.0;
  CostVector cost = CostVector::zeros(k);
  for (std::size_t i = 0; i < m; ++i) {
    auto step = model.step(b.particle(i), a, rng);
    reward += b.weight(i) * step.reward;
    cost += step.cost * b.weight(i);
    propagated.push_back(std::move(step.next_state));
  }
  reward /= b.total_weight();
  cost /= b.total_weight();
  return detail::weight_and_resample(model, b, a, std::move(propagated), o,
                                     reward, std::move(cost), rng);
}

struct BeliefStats {
  std::vector<double> mean;
  std::vector<double> spread;
};

struct ScalarStats {
  double mean = 0.0;
  double spread = 0.0;
};

/// Weighted mean and standard deviation of a scalar feature of the state.
template <typename State, typename Proj>
ScalarStats scalar_stats(const ParticleBelief<State>& b, Proj proj) {
  ScalarStats out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    out.mean += b.weight(i) * static_cast<double>(proj(b.particle(i)));
  }
  double var = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double d = static_cast<double>(proj(b.particle(i))) - out.mean;
    var += b.weight(i) * d * d;
  }
  out.spread = std::sqrt(var);
  return out;
}

/// Weighted mean and standard deviation of each component of proj(state).
/// proj may return a double or a std::vector<double>.
template <typename State, typename Proj>
BeliefStats belief_stats(const ParticleBelief<State>& b, Proj proj) {
  using Out = std::invoke_result_t<Proj, const State&>;
  if constexpr (std::is_convertible_v<Out, double>) {
    const ScalarStats s = scalar_stats(b, proj);
    return {{s.mean}, {s.spread}};
  } else {
    std::vector<std::vector<double>> cache;
    cache.reserve(b.size());
    for (const auto& p : b.particles()) cache.push_back(proj(p));
    const std::size_t dim = cache.front().size();
    BeliefStats out{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
    for (std::size_t i = 0; i < b.size(); ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        out.mean[j] += b.weight(i) * cache[i][j];
      }
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        const double d = cache[i][j] - out.mean[j];
        out.spread[j] += b.weight(i) * d * d;
      }
    }
    for (double& v : out.spread) v = std::sqrt(v);
    return out;
  }
}

}  // namespace cobets
