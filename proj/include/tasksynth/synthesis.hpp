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

#include "tasksynth/core.hpp"
#include "tasksynth/privacy.hpp"
#include "tasksynth/structure.hpp"
#include "tasksynth/workload.hpp"

namespace tasksynth {

struct Measurement {
  MarginalTable table;
  LedgerEntry cost;
  double sigma = 0.0;
};

class NoisyMeasurements {
 public:
  void insert(Measurement measurement);

  bool contains(const Clique& clique) const { return tables_.count(clique) != 0; }
  /// Throws ContractError when the clique was not measured.
  const Measurement& at(const Clique& clique) const;
  const std::map<Clique, Measurement>& all() const { return tables_; }
  std::size_t size() const { return tables_.size(); }

  /// One entry per measurement, in clique order.
  PrivacyLedger ledger() const;

 private:
  std::map<Clique, Measurement> tables_;
};

/// Gaussian-measures every query at its assigned budget. Each query draws
/// from its own child stream, keyed by its clique.
NoisyMeasurements measure_workload(const DiscreteDataset& dataset, const Workload& workload, Rng& rng);

enum class ModelKind { NaiveBayes, Tree, Independent };

/// How the root (target) marginal is read off the measurements.
enum class PriorEstimate {
  /// The noisy 1-way table alone.
  OneWay,
  /// Inverse-variance combination of the column's margin in every
  /// measured table that contains it, projected to the simplex.
  Pooled,
};

/// P(child | parent) as a column-stochastic matrix: probs(x, parent value).
/// A root-less conditional (no parent) has a single column.
struct ConditionalTable {
  std::size_t child = 0;
  std::optional<std::size_t> parent;
  Matrix probs;
};

struct SynthModel {
  ModelKind kind = ModelKind::NaiveBayes;
  std::size_t root = 0;
  Vector root_marginal;
  /// Parents always precede children.
  std::vector<ConditionalTable> conditionals;
  /// Independent kind: one table per column.
  std::map<std::size_t, Vector> independent_marginals;
  /// When present, the modeled block is sampled from this joint instead.
  std::optional<MarginalTable> joint;

  /// Columns generated by the model itself (root, conditionals or joint).
  std::vector<std::size_t> modeled_columns() const;
};

/// Column-normalizes a measured table over {child, parent}; zero-mass
/// parent slices become uniform.
ConditionalTable conditional_from_table(const MarginalTable& table, std::size_t child, std::size_t parent);

/// Marginal of `column` under `estimate`; requires the 1-way table.
Vector estimate_marginal(const NoisyMeasurements& measurements, std::size_t column, PriorEstimate estimate);

struct NaiveBayesOptions {
  PriorEstimate prior = PriorEstimate::Pooled;
  /// Sample S and the target from the measured full joint when available.
  bool use_full_joint = true;
};

SynthModel fit_naive_bayes(const NoisyMeasurements& measurements, const FeatureSubset& subset,
                           const Schema& schema, const NaiveBayesOptions& options = {});

/// Orients `edges` away from `root`; they must form a spanning tree over the
/// nodes they touch (plus the root). Needs the root's 1-way table and one
/// pairwise table per edge.
SynthModel fit_tree(const NoisyMeasurements& measurements, const std::vector<Edge>& edges, std::size_t root,
                    PriorEstimate prior = PriorEstimate::Pooled);

SynthModel fit_independent(const NoisyMeasurements& measurements, const Schema& schema);

/// Samples the modeled columns ancestrally and fills every other column
/// from its noisy 1-way table in `background`.
DiscreteDataset sample_synthetic(const SynthModel& model, const NoisyMeasurements& background,
                                 const Schema& schema, std::size_t n_syn, Rng& rng);

/// Exact joint over the model's columns (ascending order) by enumeration.
/// Intended for small models.
MarginalTable model_joint(const SynthModel& model, const Schema& schema);

}  // namespace tasksynth
