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
#include "tasksynth/workload.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "text_util.hpp"

namespace tasksynth {

std::string_view to_string(Pool pool) { return pool == Pool::Task ? "task" : "background"; }

void Workload::add(Query query) {
  if (!(query.weight > 0.0)) throw ParameterError("query weight must be positive");
  if (query.pool == Pool::Task && !query.clique.contains(target_index_)) {
    throw ParameterError("task queries must contain the target column");
  }
  for (const auto& q : queries_) {
    if (q.clique == query.clique) throw ParameterError("duplicate clique in workload");
  }
  queries_.push_back(std::move(query));
}

void Workload::add_all(const std::vector<Query>& queries) {
  for (const auto& q : queries) add(q);
}

std::size_t Workload::count(Pool pool) const {
  return static_cast<std::size_t>(
      std::count_if(queries_.begin(), queries_.end(), [&](const Query& q) { return q.pool == pool; }));
}

std::vector<std::size_t> Workload::indices(Pool pool) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < queries_.size(); ++i) {
    if (queries_[i].pool == pool) out.push_back(i);
  }
  return out;
}

bool Workload::has_any_budget() const {
  return std::any_of(queries_.begin(), queries_.end(), [](const Query& q) { return q.allocated.has_value(); });
}

bool Workload::fully_assigned() const {
  return std::all_of(queries_.begin(), queries_.end(), [](const Query& q) { return q.allocated.has_value(); });
}

std::optional<std::size_t> Workload::find(const Clique& clique) const {
  for (std::size_t i = 0; i < queries_.size(); ++i) {
    if (queries_[i].clique == clique) return i;
  }
  return std::nullopt;
}

void Workload::assign(std::size_t query, PrivacySpec budget) {
  auto& q = queries_.at(query);
  if (q.allocated) throw ContractError("query budget already assigned");
  q.allocated = budget;
}

std::vector<double> normalize_weights(const std::vector<double>& scores) {
  std::vector<double> w(scores.size());
  std::transform(scores.begin(), scores.end(), w.begin(),
                 [](double s) { return std::max(s, 0.0) + kWeightFloor; });
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  for (auto& x : w) x /= mean;
  return w;
}

std::vector<Query> build_task_workload(const FeatureSubset& subset, const Schema& schema,
                                       const TaskWorkloadOptions& options) {
  if (subset.indices.empty()) throw ParameterError("task workload needs a nonempty feature subset");
  const auto target = schema.target_index();
  std::vector<Query> out;

  std::vector<double> two_way(subset.indices.size(), 1.0);
  if (options.two_way_weights) {
    std::vector<double> raw;
    for (const auto j : subset.indices) {
      const auto it = options.two_way_weights->find(j);
      raw.push_back(it == options.two_way_weights->end() ? 0.0 : it->second);
    }
    two_way = normalize_weights(raw);
  }
  for (std::size_t i = 0; i < subset.indices.size(); ++i) {
    out.push_back({Clique{subset.indices[i], target}, Pool::Task, two_way[i], std::nullopt});
  }

  if (options.max_3way > 0 && options.mi_estimates && subset.indices.size() >= 2) {
    std::vector<std::pair<FeaturePair, double>> ranked;
    for (std::size_t a = 0; a < subset.indices.size(); ++a) {
      for (std::size_t b = a + 1; b < subset.indices.size(); ++b) {
        const FeaturePair key{subset.indices[a], subset.indices[b]};
        const auto it = options.mi_estimates->find(key);
        if (it != options.mi_estimates->end()) ranked.emplace_back(key, it->second);
      }
    }
    // stable: equal scores keep pair order
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& x, const auto& y) { return x.second > y.second; });
    ranked.resize(std::min(ranked.size(), options.max_3way));
    std::vector<double> scores;
    for (const auto& r : ranked) scores.push_back(r.second);
    const auto weights = normalize_weights(scores);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      out.push_back({Clique{ranked[i].first.first, ranked[i].first.second, target}, Pool::Task,
                     weights[i], std::nullopt});
    }
  }

  if (options.include_full_joint && subset.indices.size() >= 2) {
    auto cols = subset.indices;
    cols.push_back(target);
    Clique joint(cols);
    const auto size = domain_size(schema, joint);
    if (size > options.full_joint_cap) {
      throw ParameterError("full joint over S and the target has " + std::to_string(size) +
                           " cells, above the cap of " + std::to_string(options.full_joint_cap));
    }
    out.push_back({std::move(joint), Pool::Task, static_cast<double>(subset.indices.size()), std::nullopt});
  }
  return out;
}

std::vector<Query> build_background_workload(const Schema& schema) {
  std::vector<Query> out;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    out.push_back({Clique{j}, Pool::Background, 1.0, std::nullopt});
  }
  return out;
}

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
  std::vector<std::size_t> parent;
};

}  // namespace

std::vector<Edge> max_spanning_tree(std::size_t node_count, std::vector<ScoredPair> pairs) {
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const ScoredPair& x, const ScoredPair& y) { return x.score > y.score; });
  DisjointSets sets(node_count);
  std::vector<Edge> tree;
  for (const auto& p : pairs) {
    if (p.a >= node_count || p.b >= node_count) throw ParameterError("max_spanning_tree: node out of range");
    if (sets.unite(p.a, p.b)) tree.emplace_back(p.a, p.b);
  }
  return tree;
}

SpanningBackground build_spanning_background(const DiscreteDataset& dataset,
                                             const PrivacySpec& budget, Rng& rng) {
  const auto features = dataset.schema().feature_indices();
  SpanningBackground out;
  if (features.size() < 2) return out;
  const std::size_t pairs = features.size() * (features.size() - 1) / 2;
  const PrivacySpec share{budget.epsilon / static_cast<double>(pairs),
                          budget.delta / static_cast<double>(pairs)};

  std::vector<ScoredPair> scored;
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (std::size_t k = i + 1; k < features.size(); ++k) {
      const auto a = features[i];
      const auto b = features[k];
      auto pair_rng = rng.split("bg-mi/" + std::to_string(a) + "," + std::to_string(b));
      scored.push_back({a, b, dp_mutual_information(dataset, a, b, false, share, pair_rng)});
      out.ledger.record("bg-mi/" + to_string(Clique{a, b}, dataset.schema()), share.epsilon, share.delta);
    }
  }
  for (const auto& [a, b] : max_spanning_tree(dataset.schema().size(), std::move(scored))) {
    out.queries.push_back({Clique{a, b}, Pool::Background, 1.0, std::nullopt});
  }
  return out;
}

void write_workload_csv(const std::string& path, const Workload& workload, const Schema& schema) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write workload file '" + path + "'");
  out << "clique,pool,weight,epsilon,delta\n";
  for (const auto& q : workload.queries()) {
    out << to_string(q.clique, schema) << ',' << to_string(q.pool) << ',' << detail::format_double(q.weight)
        << ',';
    if (q.allocated) {
      out << detail::format_double(q.allocated->epsilon) << ',' << detail::format_double(q.allocated->delta);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

}  // namespace tasksynth
