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

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tasksynth/core.hpp"
#include "tasksynth/privacy.hpp"
#include "tasksynth/structure.hpp"

namespace tasksynth {

enum class Pool { Task, Background };

std::string_view to_string(Pool pool);

struct Query {
  Clique clique;
  Pool pool = Pool::Task;
  double weight = 1.0;
  std::optional<PrivacySpec> allocated;
};

/// Queries split into task and background pools. Task cliques always
/// contain the target; no clique appears twice, in either pool.
class Workload {
 public:
  explicit Workload(std::size_t target_index) : target_index_(target_index) {}

  void add(Query query);
  void add_all(const std::vector<Query>& queries);

  std::size_t target_index() const { return target_index_; }
  const std::vector<Query>& queries() const { return queries_; }
  std::size_t size() const { return queries_.size(); }
  std::size_t count(Pool pool) const;
  std::vector<std::size_t> indices(Pool pool) const;
  bool has_any_budget() const;
  bool fully_assigned() const;
  std::optional<std::size_t> find(const Clique& clique) const;

  /// Sets a query's budget; throws ContractError if already set.
  void assign(std::size_t query, PrivacySpec budget);

 private:
  std::size_t target_index_;
  std::vector<Query> queries_;
};

/// Unordered feature pair, stored with first < second.
using FeaturePair = std::pair<std::size_t, std::size_t>;

struct TaskWorkloadOptions {
  std::size_t max_3way = 0;
  /// Scores (e.g. DP conditional MI) for candidate 3-way pairs.
  std::optional<std::map<FeaturePair, double>> mi_estimates;
  bool include_full_joint = false;
  std::size_t full_joint_cap = 1u << 16;
  /// Replaces the unit weights of the 2-way queries (keyed by feature).
  /// Applied after clipping/flooring and normalizing to average 1.
  std::optional<std::map<std::size_t, double>> two_way_weights;
};

/// Floor added to clipped scores before normalizing them into weights.
inline constexpr double kWeightFloor = 1e-6;

/// Clips each score at 0, adds kWeightFloor and scales so the mean is 1.
std::vector<double> normalize_weights(const std::vector<double>& scores);

/// One (X_j, Y) query per j in S, up to max_3way (X_j, X_j', Y) queries for
/// the top-scoring pairs, and optionally the full joint (X_S, Y) with
/// weight |S|.
std::vector<Query> build_task_workload(const FeatureSubset& subset, const Schema& schema,
                                       const TaskWorkloadOptions& options = {});

/// One 1-way query per column, target included, weight 1.
std::vector<Query> build_background_workload(const Schema& schema);

struct ScoredPair {
  std::size_t a = 0;
  std::size_t b = 0;
  double score = 0.0;
};

/// Kruskal on descending score; equal scores keep input order.
std::vector<Edge> max_spanning_tree(std::size_t node_count, std::vector<ScoredPair> pairs);

struct SpanningBackground {
  std::vector<Query> queries;
  PrivacyLedger ledger;
};

/// Maximum spanning tree over the feature columns on DP pairwise MI scores;
/// the budget is split uniformly over all feature pairs.
SpanningBackground build_spanning_background(const DiscreteDataset& dataset,
                                             const PrivacySpec& budget, Rng& rng);

/// Audit dump: `clique,pool,weight,epsilon,delta`; clique columns joined by
/// '|'; budget fields empty until assigned.
void write_workload_csv(const std::string& path, const Workload& workload, const Schema& schema);

}  // namespace tasksynth
