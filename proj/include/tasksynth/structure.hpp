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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tasksynth/core.hpp"
#include "tasksynth/privacy.hpp"

namespace tasksynth {

using Edge = std::pair<std::size_t, std::size_t>;

/// Directed acyclic graph over schema columns (node i == column i).
/// Construction rejects self-loops, duplicate edges and cycles.
class Dag {
 public:
  Dag(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const { return node_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& children(std::size_t node) const { return children_.at(node); }
  const std::vector<std::size_t>& parents(std::size_t node) const { return parents_.at(node); }
  const std::vector<std::size_t>& topological_order() const { return topo_; }

 private:
  std::size_t node_count_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> topo_;
};

/// Edge list, one `parent child` pair of column names per line; `#` starts a
/// comment.
Dag read_dag_file(const std::string& path, const Schema& schema);

std::vector<std::size_t> parents(const Dag& dag, std::size_t node);

/// Parents, children and co-parents of children, excluding the node itself.
std::vector<std::size_t> markov_blanket(const Dag& dag, std::size_t node);

enum class Regime { Causal, Graphical, Predictive };

struct RegimeChoice {
  Regime regime = Regime::Causal;
  std::optional<std::size_t> subset_size_k;

  static RegimeChoice causal() { return {Regime::Causal, std::nullopt}; }
  static RegimeChoice graphical() { return {Regime::Graphical, std::nullopt}; }
  static RegimeChoice predictive(std::size_t k) { return {Regime::Predictive, k}; }

  /// k present iff Predictive.
  void validate() const;
};

struct FeatureSubset {
  std::vector<std::size_t> indices;
  LedgerEntry selection_cost{"selection", 0.0, 0.0};
};

/// min(chi^2 / n, clip_bound) for the (feature, target) contingency table.
/// Cells with zero expected count contribute nothing.
double chi2_score(const DiscreteDataset& dataset, std::size_t feature, double clip_bound = 1.0);

/// Utility sensitivity used for chi2 selection: 2 * clip_bound / n.
double chi2_sensitivity(std::size_t n, double clip_bound = 1.0);

/// k rounds of the exponential mechanism over not-yet-chosen features, each
/// with budget eps_sel / k, scored by chi2_score.
FeatureSubset greedy_dp_select(const DiscreteDataset& dataset, std::size_t k, double eps_sel,
                               Rng& rng, double clip_bound = 1.0);

/// Plug-in mutual information (nats) between two columns of a table.
double mutual_information(const MarginalTable& table, std::size_t a, std::size_t b);
/// Plug-in I(a; b | given) from a table over {a, b, given}.
double conditional_mutual_information(const MarginalTable& table, std::size_t a, std::size_t b,
                                      std::size_t given);

/// MI of columns a, b (conditioned on the target when requested) from a
/// Gaussian-measured, simplex-projected joint marginal, clipped at 0. The
/// caller records `budget` in its ledger.
double dp_mutual_information(const DiscreteDataset& dataset, std::size_t a, std::size_t b,
                             bool conditional_on_target, const PrivacySpec& budget, Rng& rng);

/// Causal -> Pa(target), Graphical -> MB(target), both free; Predictive ->
/// greedy_dp_select costing (eps_sel, 0).
FeatureSubset resolve_subset(const RegimeChoice& regime, const Dag* dag,
                             const DiscreteDataset& dataset, double eps_sel, Rng& rng);

}  // namespace tasksynth
