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

#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cobets/belief/particle_belief.hpp"
#include "cobets/core/rng.hpp"

namespace cobets {

/// Raised when no option's initiation predicate holds in the current belief.
class NoAvailableOption : public std::runtime_error {
 public:
  NoAvailableOption() : std::runtime_error("no available option") {}
};

// An option {I, pi^L, beta}. The low-level policy and the termination
// function also receive the number of underlying steps the option has already
// executed since it was selected; options that only look at the belief ignore
// it.
template <typename State, typename Action>
struct OptionSpec {
  using Belief = ParticleBelief<State>;

  std::string label;
  std::function<bool(const Belief&)> initiation;  // empty: available everywhere
  std::function<Action(const Belief&, int)> policy;
  std::function<double(const Belief&, int)> termination;
  // Set when the option is a one-step wrapper around a single primitive action.
  std::optional<Action> primitive;

  bool available(const Belief& b) const { return !initiation || initiation(b); }

  Action action(const Belief& b, int elapsed) const {
    return policy(b, elapsed);
  }

  double termination_probability(const Belief& b, int elapsed) const {
    const double beta = termination(b, elapsed);
    if (!(beta >= 0.0 && beta <= 1.0)) {
      throw std::logic_error("option '" + label +
                             "' returned a termination probability outside "
                             "[0, 1]");
    }
    return beta;
  }
};

/// One-step option (beta == 1) that always plays a.
template <typename State, typename Action>
OptionSpec<State, Action> primitive_option(std::string label, Action a) {
  OptionSpec<State, Action> o;
  o.label = std::move(label);
  o.policy = [a](const ParticleBelief<State>&, int) { return a; };
  o.termination = [](const ParticleBelief<State>&, int) { return 1.0; };
  o.primitive = a;
  return o;
}

/// Ordered, non-empty collection of options with unique labels.
template <typename State, typename Action>
class OptionSet {
 public:
  using Option = OptionSpec<State, Action>;

  OptionSet() = default;

  explicit OptionSet(std::vector<Option> options)
      : options_(std::move(options)) {
    if (options_.empty()) throw std::invalid_argument("option set is empty");
    std::set<std::string> labels;
    for (const auto& o : options_) {
      if (!o.policy || !o.termination) {
        throw std::invalid_argument("option '" + o.label +
                                    "' is missing a policy or termination");
      }
      if (!labels.insert(o.label).second) {
        throw std::invalid_argument("duplicate option label '" + o.label + "'");
      }
    }
  }

  std::size_t size() const { return options_.size(); }
  const Option& operator[](std::size_t i) const { return options_[i]; }
  auto begin() const { return options_.begin(); }
  auto end() const { return options_.end(); }

  std::optional<std::size_t> index_of(const std::string& label) const {
    for (std::size_t i = 0; i < options_.size(); ++i) {
      if (options_[i].label == label) return i;
    }
    return std::nullopt;
  }

 private:
  std::vector<Option> options_;
};

/// Indices (in set order) of the options whose initiation predicate holds.
/// An empty result means nothing is available; callers choose the fallback.
template <typename State, typename Action>
std::vector<std::size_t> available_options(
    const OptionSet<State, Action>& options, const ParticleBelief<State>& b) {
  std::vector<std::size_t> out;
  out.reserve(options.size());
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (options[i].available(b)) out.push_back(i);
  }
  return out;
}

/// Bernoulli(beta(b)) draw. beta of exactly 0 or 1 does not touch the rng.
template <typename State, typename Action>
bool option_terminates(const OptionSpec<State, Action>& option,
                       const ParticleBelief<State>& b, int elapsed, Rng& rng) {
  const double beta = option.termination_probability(b, elapsed);
  if (beta >= 1.0) return true;
  if (beta <= 0.0) return false;
  return uniform01(rng) < beta;
}

}  // namespace cobets
