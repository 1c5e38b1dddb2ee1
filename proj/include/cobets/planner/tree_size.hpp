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
#include <stdexcept>

namespace cobets {

/// Ratio of option-tree size to flat-tree size for a horizon of T steps:
/// (c1 c2 A O)^(T / tau) / (A O)^T, evaluated in log space.
inline double tree_size_ratio(double A, double O, double c1, double c2,
                              double T, double tau) {
  if (!(A > 0 && O > 0 && c1 > 0 && c2 > 0 && T > 0)) {
    throw std::invalid_argument("tree_size_ratio: inputs must be positive");
  }
  if (!(tau >= 1.0)) throw std::invalid_argument("tree_size_ratio: tau >= 1");
  const double log_ratio =
      (T / tau) * std::log(c1 * c2 * A * O) - T * std::log(A * O);
  return std::exp(log_ratio);
}

}  // namespace cobets
