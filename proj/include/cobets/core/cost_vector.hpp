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
#include <array>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <stdexcept>

namespace cobets {

inline constexpr std::size_t kMaxCostDim = 8;

namespace detail {

// Fixed-capacity vector of k reals. Cost quantities are small (k is 1 in the
// shipped domains) and are created per particle per step, so storage is
// inline.
template <typename Tag>
class KVector {
 public:
  KVector() = default;

  explicit KVector(std::size_t dim, double fill = 0.0) : dim_(dim) {
    if (dim > kMaxCostDim) {
      throw std::invalid_argument("cost dimension exceeds kMaxCostDim");
    }
    values_.fill(0.0);
    std::fill_n(values_.begin(), dim_, fill);
  }

  KVector(std::initializer_list<double> init) : KVector(init.size()) {
    std::copy(init.begin(), init.end(), values_.begin());
  }

  static KVector zeros(std::size_t dim) { return KVector(dim, 0.0); }

  std::size_t size() const { return dim_; }
  bool empty() const { return dim_ == 0; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  const double* begin() const { return values_.data(); }
  const double* end() const { return values_.data() + dim_; }
  double* begin() { return values_.data(); }
  double* end() { return values_.data() + dim_; }

  KVector& operator+=(const KVector& o) {
    check_dim(o);
    for (std::size_t i = 0; i < dim_; ++i) values_[i] += o.values_[i];
    return *this;
  }
  KVector& operator-=(const KVector& o) {
    check_dim(o);
    for (std::size_t i = 0; i < dim_; ++i) values_[i] -= o.values_[i];
    return *this;
  }
  KVector& operator*=(double s) {
    for (std::size_t i = 0; i < dim_; ++i) values_[i] *= s;
    return *this;
  }
  KVector& operator/=(double s) {
    for (std::size_t i = 0; i < dim_; ++i) values_[i] /= s;
    return *this;
  }

  friend KVector operator+(KVector a, const KVector& b) { return a += b; }
  friend KVector operator-(KVector a, const KVector& b) { return a -= b; }
  friend KVector operator*(KVector a, double s) { return a *= s; }
  friend KVector operator*(double s, KVector a) { return a *= s; }
  friend KVector operator/(KVector a, double s) { return a /= s; }

  friend bool operator==(const KVector& a, const KVector& b) {
    return a.dim_ == b.dim_ && std::equal(a.begin(), a.end(), b.begin());
  }

  friend std::ostream& operator<<(std::ostream& os, const KVector& v) {
    os << '[';
    for (std::size_t i = 0; i < v.dim_; ++i) os << (i ? ", " : "") << v[i];
    return os << ']';
  }

  void check_dim(const KVector& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("cost dimension mismatch");
  }

 private:
  std::array<double, kMaxCostDim> values_{};
  std::size_t dim_ = 0;
};

}  // namespace detail

/// Instantaneous or accumulated (discounted) costs, one entry per channel.
using CostVector = detail::KVector<struct CostTag>;

/// Remaining discounted cost budget, one entry per channel.
using Budget = detail::KVector<struct BudgetTag>;

/// Lagrange multipliers, one per cost channel.
using Multipliers = detail::KVector<struct MultiplierTag>;

inline Budget as_budget(const CostVector& c) {
  Budget b(c.size());
  std::copy(c.begin(), c.end(), b.begin());
  return b;
}

inline CostVector as_cost(const Budget& b) {
  CostVector c(b.size());
  std::copy(b.begin(), b.end(), c.begin());
  return c;
}

/// Elementwise positive part.
inline Budget clamp_positive(Budget b) {
  for (double& v : b) v = std::max(v, 0.0);
  return b;
}

/// True when c <= budget in every channel.
inline bool within_budget(const CostVector& c, const Budget& budget) {
  if (c.size() != budget.size()) {
    throw std::invalid_argument("cost dimension mismatch");
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] > budget[i]) return false;
  }
  return true;
}

/// Largest per-channel excess of c over the budget (negative when slack).
inline double worst_violation(const CostVector& c, const Budget& budget) {
  if (c.size() != budget.size()) {
    throw std::invalid_argument("cost dimension mismatch");
  }
  double worst = c[0] - budget[0];
  for (std::size_t i = 1; i < c.size(); ++i) {
    worst = std::max(worst, c[i] - budget[i]);
  }
  return worst;
}

inline double dot(const Multipliers& lambda, const CostVector& c) {
  if (c.size() != lambda.size()) {
    throw std::invalid_argument("cost dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += lambda[i] * c[i];
  return s;
}

}  // namespace cobets
