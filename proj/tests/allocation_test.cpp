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

#include <gtest/gtest.h>

#include <cmath>

#include "tasksynth/bench.hpp"
#include "test_support.hpp"

namespace tasksynth {
namespace {

TEST(SplitPoolsTest, PredictiveWithMi) {
  const auto p = split_pools({1.0, 1e-8}, RegimeChoice::predictive(8), true);
  EXPECT_NEAR(p.eps_sel, 0.10, 1e-15);
  EXPECT_NEAR(p.eps_mi, 0.05, 1e-15);
  EXPECT_NEAR(p.eps_task, 0.65, 1e-15);
  EXPECT_NEAR(p.eps_bg, 0.20, 1e-15);
  EXPECT_NEAR(p.total().epsilon, 1.0, 1e-15);
  EXPECT_NEAR(p.total().delta, 1e-8, 1e-23);
}

TEST(SplitPoolsTest, CausalWithoutMiFoldsIntoTask) {
  const auto p = split_pools({1.0, 1e-8}, RegimeChoice::causal(), false);
  EXPECT_EQ(p.eps_sel, 0.0);
  EXPECT_EQ(p.eps_mi, 0.0);
  EXPECT_NEAR(p.eps_task, 0.80, 1e-15);
  EXPECT_NEAR(p.eps_bg, 0.20, 1e-15);
  EXPECT_EQ(p.delta_mi, 0.0);
  EXPECT_NEAR(p.delta_task / p.delta_bg, 4.0, 1e-12);
}

TEST(SplitPoolsTest, CausalWithMi) {
  const auto p = split_pools({1.0, 1e-8}, RegimeChoice::graphical(), true);
  EXPECT_NEAR(p.eps_task, 0.75, 1e-15);
  EXPECT_NEAR(p.eps_mi, 0.05, 1e-15);
}

TEST(SplitPoolsTest, ScalesLinearly) {
  const auto a = split_pools({1.0, 1e-8}, RegimeChoice::predictive(3), true);
  const auto b = split_pools({2.0, 1e-8}, RegimeChoice::predictive(3), true);
  EXPECT_NEAR(b.eps_sel, 2 * a.eps_sel, 1e-15);
  EXPECT_NEAR(b.eps_mi, 2 * a.eps_mi, 1e-15);
  EXPECT_NEAR(b.eps_task, 2 * a.eps_task, 1e-15);
  EXPECT_NEAR(b.eps_bg, 2 * a.eps_bg, 1e-15);
}

TEST(SplitPoolsTest, RejectsBadShares) {
  PoolShares bad;
  bad.task = 0.9;
  EXPECT_THROW(split_pools({1.0, 1e-8}, RegimeChoice::causal(), false, bad), ParameterError);
}

TEST(ClosedFormTest, HandExample) {
  Vector a(2);
  a << 1.0, 4.0;
  const Vector eps = closed_form_allocation(a, 3.0);
  EXPECT_NEAR(eps[0], 1.0, 1e-15);
  EXPECT_NEAR(eps[1], 2.0, 1e-15);
  EXPECT_NEAR(allocation_objective(a, eps), 3.0, 1e-14);
  EXPECT_NEAR(allocation_objective(a, eps), std::pow(a.array().sqrt().sum(), 2) / 3.0, 1e-14);
}

TEST(ClosedFormTest, EqualCostsUniform) {
  const Vector a = Vector::Constant(5, 0.7);
  const Vector eps = closed_form_allocation(a, 1.0);
  const Vector unif = uniform_allocation(5, 1.0);
  EXPECT_LT((eps - unif).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ClosedFormTest, SumsExactlyAndRejectsBadInput) {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    Vector a(7);
    for (Eigen::Index i = 0; i < 7; ++i) a[i] = 1e-3 + 10 * rng.uniform();
    const double pool = 0.1 + rng.uniform();
    EXPECT_NEAR(closed_form_allocation(a, pool).sum(), pool, 1e-15);
  }
  EXPECT_THROW(closed_form_allocation(Vector(0), 1.0), ParameterError);
  EXPECT_THROW(closed_form_allocation(Vector::Constant(2, -1.0), 1.0), ParameterError);
  EXPECT_THROW(closed_form_allocation(Vector::Constant(2, 1.0), 0.0), ParameterError);
}

TEST(ClosedFormTest, BeatsRandomAndGridAllocations) {
  Rng rng(2);
  Vector a(6);
  for (Eigen::Index i = 0; i < 6; ++i) a[i] = 0.05 + rng.uniform();
  const double best = allocation_objective(a, closed_form_allocation(a, 1.0));
  for (int t = 0; t < 100000; ++t) {
    const Vector e = testing::random_simplex(6, rng);
    ASSERT_LE(best, allocation_objective(a, e) + 1e-9);
  }
  // Grid over the first two coordinates, the rest fixed at their optimum
  // rescaled to the remaining mass.
  const Vector opt = closed_form_allocation(a, 1.0);
  const double tail = opt.tail(4).sum();
  for (int i = 1; i < 100; ++i) {
    for (int j = 1; i + j < 100; ++j) {
      const double e0 = i / 100.0, e1 = j / 100.0;
      const double rest = 1.0 - e0 - e1;
      Vector e(6);
      e << e0, e1, opt.tail(4) * (rest / tail);
      ASSERT_LE(best, allocation_objective(a, e) + 1e-9);
    }
  }
}

TEST(ClosedFormTest, KktConstancyAndDominance) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 1 + rng.uniform_index(8);
    Vector a(static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = std::exp(3 * rng.normal());
    const Vector eps = closed_form_allocation(a, 2.0);
    const Vector ratio = a.array() / eps.array().square();
    EXPECT_LT((ratio.array() / ratio[0] - 1.0).abs().maxCoeff(), 1e-9);
    const double opt = allocation_objective(a, eps);
    const double unif = allocation_objective(a, uniform_allocation(m, 2.0));
    EXPECT_LE(opt, unif * (1 + 1e-12));
  }
  // Strict when costs differ.
  Vector a(2);
  a << 1.0, 2.0;
  EXPECT_LT(allocation_objective(a, closed_form_allocation(a, 1.0)),
            allocation_objective(a, uniform_allocation(2, 1.0)));
}

TEST(ClosedFormTest, FloatScalar) {
  Eigen::VectorXf a(2);
  a << 1.0f, 4.0f;
  const Eigen::VectorXf eps = closed_form_allocation(a, 3.0f);
  EXPECT_FLOAT_EQ(eps[0], 1.0f);
}

TEST(UniformAllocationTest, Examples) {
  const Vector e = uniform_allocation(4, 1.0);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(e[i], 0.25);
  EXPECT_EQ(uniform_allocation(1, 0.3)[0], 0.3);
  EXPECT_THROW(uniform_allocation(0, 1.0), ParameterError);
}

Workload two_task_queries(const Schema& schema, Clique a, Clique b) {
  Workload w(schema.target_index());
  w.add({std::move(a), Pool::Task, 1.0, std::nullopt});
  w.add({std::move(b), Pool::Task, 1.0, std::nullopt});
  w.add({Clique{schema.target_index()}, Pool::Background, 1.0, std::nullopt});
  return w;
}

PoolSplit task_and_bg(double eps_task, double eps_bg, double delta) {
  PoolSplit p;
  p.eps_task = eps_task;
  p.eps_bg = eps_bg;
  p.delta_task = delta * eps_task / (eps_task + eps_bg);
  p.delta_bg = delta - p.delta_task;
  return p;
}

TEST(AssignBudgetsTest, SymmetricQueriesEqualBudgets) {
  const Schema schema({{"a", 3}, {"b", 3}, {"y", 2}}, 2);
  for (auto mode : {AllocationMode::Optimal, AllocationMode::Uniform}) {
    const auto w = assign_budgets(two_task_queries(schema, Clique{0, 2}, Clique{1, 2}), task_and_bg(0.8, 0.2, 1e-8),
                                  mode, schema, 1000);
    EXPECT_TRUE(w.fully_assigned());
    EXPECT_NEAR(w.queries()[0].allocated->epsilon, 0.4, 1e-15);
    EXPECT_NEAR(w.queries()[1].allocated->epsilon, 0.4, 1e-15);
    EXPECT_EQ(w.queries()[0].allocated->delta, w.queries()[1].allocated->delta);
  }
}

TEST(AssignBudgetsTest, DomainRatioOneToTwo) {
  // |Omega| = 6 and 24.
  const Schema schema({{"a", 3}, {"b", 12}, {"y", 2}}, 2);
  const auto w = assign_budgets(two_task_queries(schema, Clique{0, 2}, Clique{1, 2}), task_and_bg(0.9, 0.1, 1e-8),
                                AllocationMode::Optimal, schema, 1000);
  EXPECT_NEAR(w.queries()[1].allocated->epsilon / w.queries()[0].allocated->epsilon, 2.0, 1e-12);
}

TEST(AssignBudgetsTest, PoolsConserved) {
  const Schema schema({{"a", 3}, {"b", 12}, {"y", 2}}, 2);
  const auto pools = task_and_bg(0.9, 0.1, 1e-8);
  const auto w = assign_budgets(two_task_queries(schema, Clique{0, 2}, Clique{1, 2}), pools, AllocationMode::Optimal,
                                schema, 1000);
  double eps = 0, delta = 0;
  for (const auto& q : w.queries()) {
    eps += q.allocated->epsilon;
    delta += q.allocated->delta;
  }
  EXPECT_NEAR(eps, 1.0, 1e-12);
  EXPECT_NEAR(delta, 1e-8, 1e-20);
}

TEST(AssignBudgetsTest, OracleWeightsFavorStrongFeatures) {
  const auto bench = gen_alloc_bench(0);
  const auto& schema = bench.train.schema();
  Workload w(schema.target_index());
  for (const auto& [feature, weight] : *bench.oracle_weights) {
    w.add({Clique{feature, schema.target_index()}, Pool::Task, weight, std::nullopt});
  }
  w.add({Clique{schema.target_index()}, Pool::Background, 1.0, std::nullopt});
  const auto out = assign_budgets(w, task_and_bg(0.8, 0.2, 1e-6), AllocationMode::Optimal, schema, bench.train.size());
  double strong_min = 1e9, weak_max = 0;
  for (const auto& q : out.queries()) {
    if (q.pool != Pool::Task) continue;
    const double weight = bench.oracle_weights->at(q.clique.columns()[0]);
    if (weight > 0.1) strong_min = std::min(strong_min, q.allocated->epsilon);
    else weak_max = std::max(weak_max, q.allocated->epsilon);
  }
  EXPECT_GT(strong_min, weak_max);
}

TEST(AssignBudgetsTest, ContractAndParameterErrors) {
  const Schema schema({{"a", 3}, {"b", 3}, {"y", 2}}, 2);
  auto w = two_task_queries(schema, Clique{0, 2}, Clique{1, 2});
  w.assign(0, {0.1, 1e-9});
  EXPECT_THROW(assign_budgets(w, task_and_bg(0.8, 0.2, 1e-8), AllocationMode::Optimal, schema, 100), ContractError);
  const auto fresh = two_task_queries(schema, Clique{0, 2}, Clique{1, 2});
  EXPECT_THROW(assign_budgets(fresh, task_and_bg(0.0, 1.0, 1e-8), AllocationMode::Optimal, schema, 100),
               ParameterError);
  Workload bg_only(2);
  bg_only.add({Clique{0}, Pool::Background, 1.0, std::nullopt});
  EXPECT_THROW(assign_budgets(bg_only, task_and_bg(0.5, 0.5, 1e-8), AllocationMode::Optimal, schema, 100),
               ParameterError);
}

TEST(AllocationCostsTest, Formula) {
  const Schema schema({{"a", 3}, {"b", 3}, {"y", 2}}, 2);
  Workload w(2);
  w.add({Clique{0, 2}, Pool::Task, 2.5, std::nullopt});
  const std::vector<std::size_t> members{0};
  const Vector a = allocation_costs(w, members, schema, 1e-9, 400);
  const double c = std::sqrt(2.0) / 400 * std::sqrt(2 * std::log(1.25 / 1e-9));
  EXPECT_NEAR(a[0], 2.5 * 6 * c, 1e-15);
}

}  // namespace
}  // namespace tasksynth
