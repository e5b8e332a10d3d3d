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
#include "tasksynth/allocation.hpp"

namespace tasksynth {

PrivacySpec PoolSplit::total() const {
  return {eps_sel + eps_mi + eps_task + eps_bg, delta_mi + delta_task + delta_bg};
}

PoolSplit split_pools(const PrivacySpec& total, const RegimeChoice& regime, bool uses_mi,
                      const PoolShares& shares) {
  validate_budget(total);
  regime.validate();
  const double share_sum = shares.selection + shares.mi + shares.task + shares.background;
  if (shares.selection < 0.0 || shares.mi < 0.0 || !(shares.task > 0.0) || !(shares.background > 0.0) ||
      std::abs(share_sum - 1.0) > 1e-12) {
    throw ParameterError("pool shares must be nonnegative, task/background positive, and sum to 1");
  }
  PoolSplit split;
  const double eps = total.epsilon;
  split.eps_sel = regime.regime == Regime::Predictive ? shares.selection * eps : 0.0;
  split.eps_mi = uses_mi ? shares.mi * eps : 0.0;
  split.eps_bg = shares.background * eps;
  split.eps_task = eps - split.eps_sel - split.eps_mi - split.eps_bg;

  const double measured = split.eps_mi + split.eps_task + split.eps_bg;
  split.delta_mi = total.delta * split.eps_mi / measured;
  split.delta_bg = total.delta * split.eps_bg / measured;
  split.delta_task = total.delta - split.delta_mi - split.delta_bg;
  return split;
}

Vector uniform_allocation(std::size_t count, double eps_pool) {
  if (count == 0) throw ParameterError("uniform_allocation: count must be >= 1");
  if (!(eps_pool > 0.0)) throw ParameterError("uniform_allocation: eps_pool must be positive");
  Vector eps = Vector::Constant(static_cast<Eigen::Index>(count), eps_pool / static_cast<double>(count));
  eps[eps.size() - 1] = eps_pool - eps.head(eps.size() - 1).sum();
  return eps;
}

Vector allocation_costs(const Workload& workload, std::span<const std::size_t> queries,
                        const Schema& schema, double delta_per_query, std::size_t n) {
  const double c = marginal_sensitivity(n) * std::sqrt(2.0 * std::log(1.25 / delta_per_query));
  Vector a(static_cast<Eigen::Index>(queries.size()));
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = workload.queries().at(queries[i]);
    a[static_cast<Eigen::Index>(i)] = q.weight * static_cast<double>(domain_size(schema, q.clique)) * c;
  }
  return a;
}

Workload assign_budgets(Workload workload, const PoolSplit& pools, AllocationMode mode,
                        const Schema& schema, std::size_t n) {
  if (workload.has_any_budget()) throw ContractError("assign_budgets: workload already has budgets");
  for (const auto pool : {Pool::Task, Pool::Background}) {
    const auto members = workload.indices(pool);
    const double eps_pool = pool == Pool::Task ? pools.eps_task : pools.eps_bg;
    const double delta_pool = pool == Pool::Task ? pools.delta_task : pools.delta_bg;
    if (members.empty()) {
      if (eps_pool != 0.0 || delta_pool != 0.0) {
        throw ParameterError("assign_budgets: budget given to an empty " + std::string(to_string(pool)) +
                             " pool");
      }
      continue;
    }
    if (!(eps_pool > 0.0) || !(delta_pool > 0.0)) {
      throw ParameterError("assign_budgets: the " + std::string(to_string(pool)) +
                           " pool needs positive epsilon and delta");
    }
    const double delta_q = delta_pool / static_cast<double>(members.size());
    const Vector eps = mode == AllocationMode::Optimal
                           ? Vector(closed_form_allocation(
                                 allocation_costs(workload, members, schema, delta_q, n), eps_pool))
                           : uniform_allocation(members.size(), eps_pool);
    for (std::size_t i = 0; i < members.size(); ++i) {
      workload.assign(members[i], {eps[static_cast<Eigen::Index>(i)], delta_q});
    }
  }
  return workload;
}

}  // namespace tasksynth
