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
#include "tasksynth/pipeline.hpp"

#include <algorithm>
#include <set>

namespace tasksynth {

namespace {

FeatureSubset checked_fixed_subset(const std::vector<std::size_t>& indices, const Schema& schema) {
  const std::set<std::size_t> unique(indices.begin(), indices.end());
  if (unique.size() != indices.size()) throw ParameterError("fixed feature subset has duplicates");
  for (const auto j : unique) {
    if (j >= schema.size() || j == schema.target_index()) {
      throw ParameterError("fixed feature subset contains an invalid column");
    }
  }
  FeatureSubset subset;
  subset.indices.assign(unique.begin(), unique.end());
  return subset;
}

struct MiRequest {
  std::size_t a;
  std::size_t b;
  bool conditional;
};

}  // namespace

PipelineResult synthesize(const DiscreteDataset& train, const Dag* dag, const PipelineConfig& config, Rng& rng) {
  const auto& schema = train.schema();
  const auto target = schema.target_index();
  const auto n = train.size();
  const PrivacySpec total{config.epsilon,
                          config.delta.value_or(1.0 / (static_cast<double>(n) * static_cast<double>(n)))};
  validate_budget(total);
  if (!(total.delta > 0.0)) throw UnsupportedError("measurement uses the Gaussian mechanism and needs delta > 0");

  const bool independent = config.backend == Backend::Independent;
  const bool selects = !independent && !config.fixed_subset && config.regime.regime == Regime::Predictive;
  const bool uses_mi = !independent && (config.mi_task_weights || config.max_3way > 0);
  PoolSplit pools = split_pools(total, selects ? config.regime : RegimeChoice::causal(), uses_mi, config.shares);

  PrivacyLedger ledger;
  FeatureSubset subset;
  if (independent) {
    // every column comes from its 1-way table
  } else if (config.fixed_subset) {
    subset = checked_fixed_subset(*config.fixed_subset, schema);
  } else {
    auto select_rng = rng.split("select");
    subset = resolve_subset(config.regime, dag, train, pools.eps_sel, select_rng);
  }
  if (!independent) ledger.record(subset.selection_cost.label, subset.selection_cost.epsilon, subset.selection_cost.delta);

  std::vector<MiRequest> requests;
  if (uses_mi) {
    if (config.mi_task_weights) {
      for (const auto j : subset.indices) requests.push_back({j, target, false});
    }
    if (config.max_3way > 0) {
      for (std::size_t i = 0; i < subset.indices.size(); ++i) {
        for (std::size_t k = i + 1; k < subset.indices.size(); ++k) {
          requests.push_back({subset.indices[i], subset.indices[k], true});
        }
      }
    }
  }
  if (requests.empty() && (pools.eps_mi > 0.0 || pools.delta_mi > 0.0)) {
    pools.eps_task += pools.eps_mi;
    pools.delta_task += pools.delta_mi;
    pools.eps_mi = pools.delta_mi = 0.0;
  }

  TaskWorkloadOptions task_options;
  task_options.max_3way = config.max_3way;
  task_options.include_full_joint = config.include_full_joint;
  task_options.full_joint_cap = config.full_joint_cap;
  task_options.two_way_weights = config.task_weights;
  if (!requests.empty()) {
    const PrivacySpec share{pools.eps_mi / static_cast<double>(requests.size()),
                            pools.delta_mi / static_cast<double>(requests.size())};
    std::map<std::size_t, double> two_way;
    std::map<FeaturePair, double> three_way;
    for (const auto& r : requests) {
      const Clique clique = r.conditional ? Clique{r.a, r.b, target} : Clique{r.a, r.b};
      auto mi_rng = rng.split("mi/" + std::to_string(r.a) + "," + std::to_string(r.b) + (r.conditional ? "|y" : ""));
      const double score = dp_mutual_information(train, r.a, r.b, r.conditional, share, mi_rng);
      ledger.record("mi/" + to_string(clique, schema), share.epsilon, share.delta);
      if (r.conditional) {
        three_way[{r.a, r.b}] = score;
      } else {
        two_way[r.a] = score;
      }
    }
    if (config.mi_task_weights) task_options.two_way_weights = two_way;
    if (!three_way.empty()) task_options.mi_estimates = three_way;
  }

  Workload workload(target);
  if (!independent && !subset.indices.empty()) {
    workload.add_all(build_task_workload(subset, schema, task_options));
  }
  workload.add_all(build_background_workload(schema));
  if (config.backend == Backend::Tree) {
    for (const auto& [u, v] : config.tree_edges) {
      if (u == target || v == target) {
        const auto feature = u == target ? v : u;
        if (!std::binary_search(subset.indices.begin(), subset.indices.end(), feature)) {
          throw ParameterError("tree edge joins the target to a feature outside the subset");
        }
        continue;
      }
      if (!workload.find(Clique{u, v})) workload.add({Clique{u, v}, Pool::Background, 1.0, std::nullopt});
    }
  }
  if (workload.count(Pool::Task) == 0) {
    pools.eps_bg += pools.eps_task;
    pools.delta_bg += pools.delta_task;
    pools.eps_task = pools.delta_task = 0.0;
  }
  if (config.spanning_background) {
    if (!(config.spanning_share > 0.0 && config.spanning_share < 1.0)) {
      throw ParameterError("spanning_share must lie in (0, 1)");
    }
    const PrivacySpec scoring{pools.eps_bg * config.spanning_share, pools.delta_bg * config.spanning_share};
    auto span_rng = rng.split("spanning");
    auto spanning = build_spanning_background(train, scoring, span_rng);
    pools.eps_bg -= scoring.epsilon;
    pools.delta_bg -= scoring.delta;
    ledger.append(spanning.ledger);
    for (auto& q : spanning.queries) {
      if (!workload.find(q.clique)) workload.add(std::move(q));
    }
  }

  workload = assign_budgets(std::move(workload), pools, config.allocation, schema, n);
  auto measure_rng = rng.split("measure");
  const auto measurements = measure_workload(train, workload, measure_rng);
  ledger.append(measurements.ledger());

  SynthModel model;
  switch (config.backend) {
    case Backend::NaiveBayes:
      model = fit_naive_bayes(measurements, subset, schema, {config.prior, true});
      break;
    case Backend::Tree:
      model = fit_tree(measurements, config.tree_edges, config.tree_root.value_or(target), config.prior);
      break;
    case Backend::Independent:
      model = fit_independent(measurements, schema);
      break;
  }
  auto sample_rng = rng.split("sample");
  auto synthetic = sample_synthetic(model, measurements, schema, config.n_syn, sample_rng);
  return {std::move(synthetic), std::move(ledger), std::move(subset), std::move(workload), pools};
}

}  // namespace tasksynth
