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
#include <vector>

#include "tasksynth/allocation.hpp"
#include "tasksynth/core.hpp"
#include "tasksynth/privacy.hpp"
#include "tasksynth/structure.hpp"
#include "tasksynth/synthesis.hpp"
#include "tasksynth/workload.hpp"

namespace tasksynth {

enum class Backend { NaiveBayes, Tree, Independent };

struct PipelineConfig {
  double epsilon = 1.0;
  /// Defaults to 1 / n^2.
  std::optional<double> delta;
  RegimeChoice regime = RegimeChoice::causal();
  /// Skips regime resolution and uses these features at no selection cost.
  std::optional<std::vector<std::size_t>> fixed_subset;
  AllocationMode allocation = AllocationMode::Optimal;
  Backend backend = Backend::NaiveBayes;
  std::size_t n_syn = 5000;
  PoolShares shares;

  /// Weight the 2-way task queries by DP estimates of I(X_j; Y).
  bool mi_task_weights = false;
  /// Fixed 2-way task weights keyed by feature (e.g. oracle weights).
  std::optional<std::map<std::size_t, double>> task_weights;
  std::size_t max_3way = 0;
  bool include_full_joint = false;
  std::size_t full_joint_cap = 1u << 16;

  /// Tree backend: explicit edges over S and the target, rooted here.
  std::vector<Edge> tree_edges;
  std::optional<std::size_t> tree_root;

  /// Adds a spanning tree of 2-way background queries chosen on DP MI.
  bool spanning_background = false;
  /// Fraction of the background pool spent scoring pairs for the tree.
  double spanning_share = 0.1;

  PriorEstimate prior = PriorEstimate::Pooled;
};

struct PipelineResult {
  DiscreteDataset synthetic;
  PrivacyLedger ledger;
  FeatureSubset subset;
  Workload workload;
  PoolSplit pools;
};

/// Select -> build workloads -> allocate -> measure -> fit -> sample.
/// The ledger covers every private step, and totals (epsilon, delta).
PipelineResult synthesize(const DiscreteDataset& train, const Dag* dag, const PipelineConfig& config, Rng& rng);

}  // namespace tasksynth
