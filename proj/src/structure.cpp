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
#include "tasksynth/structure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "text_util.hpp"

namespace tasksynth {

Dag::Dag(std::size_t node_count, std::vector<Edge> edges)
    : node_count_(node_count),
      edges_(std::move(edges)),
      parents_(node_count),
      children_(node_count) {
  std::set<Edge> seen;
  for (const auto& [u, v] : edges_) {
    if (u >= node_count_ || v >= node_count_) throw ParameterError("DAG edge references a missing node");
    if (u == v) throw ParameterError("DAG has a self-loop on node " + std::to_string(u));
    if (!seen.insert({u, v}).second) throw ParameterError("DAG has a duplicate edge");
    children_[u].push_back(v);
    parents_[v].push_back(u);
  }
  for (auto& p : parents_) std::sort(p.begin(), p.end());
  for (auto& c : children_) std::sort(c.begin(), c.end());

  // Kahn's algorithm, smallest index first for a deterministic order
  std::vector<std::size_t> indegree(node_count_);
  for (std::size_t v = 0; v < node_count_; ++v) indegree[v] = parents_[v].size();
  std::set<std::size_t> ready;
  for (std::size_t v = 0; v < node_count_; ++v) {
    if (indegree[v] == 0) ready.insert(v);
  }
  while (!ready.empty()) {
    const auto v = *ready.begin();
    ready.erase(ready.begin());
    topo_.push_back(v);
    for (const auto c : children_[v]) {
      if (--indegree[c] == 0) ready.insert(c);
    }
  }
  if (topo_.size() != node_count_) throw ParameterError("graph has a directed cycle");
}

Dag read_dag_file(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open DAG file '" + path + "'");
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    std::vector<std::string> names;
    std::size_t pos = 0;
    while (pos < body.size()) {
      const auto start = body.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      const auto end = body.find_first_of(" \t", start);
      names.emplace_back(body.substr(start, end - start));
      pos = end == std::string_view::npos ? body.size() : end;
    }
    if (names.size() != 2) {
      throw IngestionError(path + ":" + std::to_string(line_no) + ": expected 'parent child'");
    }
    const auto u = schema.index_of(names[0]);
    const auto v = schema.index_of(names[1]);
    if (!u || !v) {
      throw IngestionError(path + ":" + std::to_string(line_no) + ": unknown column '" +
                           (u ? names[1] : names[0]) + "'");
    }
    edges.emplace_back(*u, *v);
  }
  return Dag(schema.size(), std::move(edges));
}

std::vector<std::size_t> parents(const Dag& dag, std::size_t node) {
  if (node >= dag.node_count()) throw ParameterError("invalid node " + std::to_string(node));
  return dag.parents(node);
}

std::vector<std::size_t> markov_blanket(const Dag& dag, std::size_t node) {
  if (node >= dag.node_count()) throw ParameterError("invalid node " + std::to_string(node));
  std::set<std::size_t> blanket(dag.parents(node).begin(), dag.parents(node).end());
  for (const auto c : dag.children(node)) {
    blanket.insert(c);
    blanket.insert(dag.parents(c).begin(), dag.parents(c).end());
  }
  blanket.erase(node);
  return {blanket.begin(), blanket.end()};
}

void RegimeChoice::validate() const {
  if ((regime == Regime::Predictive) != subset_size_k.has_value()) {
    throw ParameterError("subset size k is required for, and only for, the predictive regime");
  }
  if (subset_size_k && *subset_size_k == 0) throw ParameterError("subset size k must be positive");
}

double chi2_score(const DiscreteDataset& dataset, std::size_t feature, double clip_bound) {
  const auto& schema = dataset.schema();
  const auto target = schema.target_index();
  if (feature == target) throw ParameterError("chi2_score: feature is the target column");
  if (!(clip_bound > 0.0)) throw ParameterError("chi2_score: clip bound must be positive");
  const auto table = compute_marginal(dataset, Clique{feature, target});
  const auto& p = table.probs();
  // the clique is sorted; locate rows (feature) and columns (target)
  const bool feature_first = feature < target;
  const auto rows = schema.cardinality(feature);
  const auto cols = schema.cardinality(target);
  auto cell = [&](std::size_t x, std::size_t y) {
    return p[static_cast<Eigen::Index>(feature_first ? x * cols + y : y * rows + x)];
  };
  Vector row_mass = Vector::Zero(static_cast<Eigen::Index>(rows));
  Vector col_mass = Vector::Zero(static_cast<Eigen::Index>(cols));
  for (std::size_t x = 0; x < rows; ++x) {
    for (std::size_t y = 0; y < cols; ++y) {
      row_mass[static_cast<Eigen::Index>(x)] += cell(x, y);
      col_mass[static_cast<Eigen::Index>(y)] += cell(x, y);
    }
  }
  // chi^2 / n computed directly on proportions
  double stat = 0.0;
  for (std::size_t x = 0; x < rows; ++x) {
    for (std::size_t y = 0; y < cols; ++y) {
      const double expected = row_mass[static_cast<Eigen::Index>(x)] * col_mass[static_cast<Eigen::Index>(y)];
      if (expected <= 0.0) continue;
      const double diff = cell(x, y) - expected;
      stat += diff * diff / expected;
    }
  }
  return std::min(stat, clip_bound);
}

double chi2_sensitivity(std::size_t n, double clip_bound) {
  if (n < 1) throw ParameterError("chi2_sensitivity: n must be >= 1");
  return 2.0 * clip_bound / static_cast<double>(n);
}

FeatureSubset greedy_dp_select(const DiscreteDataset& dataset, std::size_t k, double eps_sel,
                               Rng& rng, double clip_bound) {
  auto remaining = dataset.schema().feature_indices();
  if (k < 1 || k > remaining.size()) {
    throw ParameterError("greedy selection: k must be in 1.." + std::to_string(remaining.size()));
  }
  if (!(eps_sel > 0.0)) throw ParameterError("greedy selection: eps_sel must be positive");

  std::vector<double> scores;
  scores.reserve(remaining.size());
  for (const auto j : remaining) scores.push_back(chi2_score(dataset, j, clip_bound));
  const double sensitivity = chi2_sensitivity(dataset.size(), clip_bound);
  const double eps_round = eps_sel / static_cast<double>(k);

  FeatureSubset subset;
  for (std::size_t round = 0; round < k; ++round) {
    const auto pick = exponential_select(scores, eps_round, sensitivity, rng);
    subset.indices.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    scores.erase(scores.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  std::sort(subset.indices.begin(), subset.indices.end());
  subset.selection_cost = {"selection", eps_sel, 0.0};
  return subset;
}

namespace {

double entropy(const MarginalTable& table) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < table.probs().size(); ++i) {
    const double p = table.probs()[i];
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double mutual_information(const MarginalTable& table, std::size_t a, std::size_t b) {
  const double mi = entropy(marginalize(table, Clique{a})) + entropy(marginalize(table, Clique{b})) -
                    entropy(marginalize(table, Clique{a, b}));
  return std::max(0.0, mi);
}

double conditional_mutual_information(const MarginalTable& table, std::size_t a, std::size_t b,
                                      std::size_t given) {
  const double cmi = entropy(marginalize(table, Clique{a, given})) +
                     entropy(marginalize(table, Clique{b, given})) -
                     entropy(marginalize(table, Clique{a, b, given})) -
                     entropy(marginalize(table, Clique{given}));
  return std::max(0.0, cmi);
}

double dp_mutual_information(const DiscreteDataset& dataset, std::size_t a, std::size_t b,
                             bool conditional_on_target, const PrivacySpec& budget, Rng& rng) {
  const auto& schema = dataset.schema();
  const auto target = schema.target_index();
  if (a == b || a >= schema.size() || b >= schema.size()) {
    throw ParameterError("dp_mutual_information needs two distinct valid columns");
  }
  if (conditional_on_target && (a == target || b == target)) {
    throw ParameterError("conditional MI given the target needs two feature columns");
  }
  if (!(budget.epsilon > 0.0)) throw ParameterError("dp_mutual_information: eps share must be positive");
  const Clique clique = conditional_on_target ? Clique{a, b, target} : Clique{a, b};
  const double sigma = gaussian_sigma(marginal_sensitivity(dataset.size()), budget.epsilon, budget.delta);
  const auto noisy = gaussian_measure(compute_marginal(dataset, clique), sigma, rng);
  return conditional_on_target ? conditional_mutual_information(noisy, a, b, target)
                               : mutual_information(noisy, a, b);
}

FeatureSubset resolve_subset(const RegimeChoice& regime, const Dag* dag,
                             const DiscreteDataset& dataset, double eps_sel, Rng& rng) {
  regime.validate();
  const auto target = dataset.schema().target_index();
  if (regime.regime == Regime::Predictive) {
    return greedy_dp_select(dataset, *regime.subset_size_k, eps_sel, rng);
  }
  if (dag == nullptr) throw ParameterError("causal and graphical regimes require a DAG");
  if (dag->node_count() != dataset.schema().size()) {
    throw ParameterError("DAG node count does not match the schema");
  }
  FeatureSubset subset;
  subset.indices = regime.regime == Regime::Causal ? parents(*dag, target) : markov_blanket(*dag, target);
  return subset;
}

}  // namespace tasksynth
