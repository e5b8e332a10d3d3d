// Copyright 2026 The Tasksynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cmath>
#include <cstddef>

#include "tasksynth/privacy.hpp"
#include "tasksynth/structure.hpp"
#include "tasksynth/workload.hpp"

namespace tasksynth {

/// Fractions of the total epsilon given to each pool.
struct PoolShares {
  double selection = 0.10;
  double mi = 0.05;
  double task = 0.65;
  double background = 0.20;
};

struct PoolSplit {
  double eps_sel = 0.0;
  double eps_mi = 0.0;
  double eps_task = 0.0;
  double eps_bg = 0.0;
  double delta_mi = 0.0;
  double delta_task = 0.0;
  double delta_bg = 0.0;

  PrivacySpec total() const;
};

/// Selection share survives only for the predictive regime, the MI share
/// only when `uses_mi`; dropped shares fold into the task pool. Delta is
/// split over the Gaussian-measured pools (MI, task, background) in
/// proportion to their epsilon.
PoolSplit split_pools(const PrivacySpec& total, const RegimeChoice& regime, bool uses_mi,
                      const PoolShares& shares = {});

/// eps_t = eps_pool * sqrt(a_t) / sum_s sqrt(a_s); the last entry absorbs
/// rounding so the result sums to eps_pool.
template <class Derived>
vec_type<typename Derived::Scalar> closed_form_allocation(const Eigen::MatrixBase<Derived>& a,
                                                          typename Derived::Scalar eps_pool) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index m = a.size();
  if (m == 0) throw ParameterError("closed_form_allocation: empty cost vector");
  if (!(eps_pool > Scalar(0))) throw ParameterError("closed_form_allocation: eps_pool must be positive");
  if (!(a.array() > Scalar(0)).all()) throw ParameterError("closed_form_allocation: costs must be positive");
  const vec_type<Scalar> root = a.array().sqrt().matrix();
  vec_type<Scalar> eps = eps_pool * root / root.sum();
  eps[m - 1] = eps_pool - eps.head(m - 1).sum();
  return eps;
}

Vector uniform_allocation(std::size_t count, double eps_pool);

/// sum_t a_t / eps_t: the variance proxy minimized by the closed form.
template <class DerivedA, class DerivedE>
typename DerivedA::Scalar allocation_objective(const Eigen::MatrixBase<DerivedA>& a,
                                               const Eigen::MatrixBase<DerivedE>& eps) {
  return (a.array() / eps.array()).sum();
}

enum class AllocationMode { Optimal, Uniform };

/// a_q = w_q * |Omega_q| * c_q for the given queries, with
/// c_q = marginal_sensitivity(n) * sqrt(2 ln(1.25 / delta_q)).
Vector allocation_costs(const Workload& workload, std::span<const std::size_t> queries,
                        const Schema& schema, double delta_per_query, std::size_t n);

/// Within each pool: delta_q = pool delta / count, then eps_q by `mode`.
/// Throws ContractError if any query already has a budget, and
/// ParameterError if a nonempty pool has no epsilon or an empty pool has
/// some.
Workload assign_budgets(Workload workload, const PoolSplit& pools, AllocationMode mode,
                        const Schema& schema, std::size_t n);

}  // namespace tasksynth
