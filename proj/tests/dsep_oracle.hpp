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

#include <algorithm>
#include <vector>

#include "tasksynth/structure.hpp"

namespace tasksynth::testing {

/// d-separation of x and y given z via the moralized ancestral graph:
/// restrict to ancestors of {x, y} u z, marry co-parents, drop directions,
/// delete z, and test connectivity.
inline bool d_separated(const Dag& dag, std::size_t x, std::size_t y, const std::vector<std::size_t>& z) {
  const std::size_t n = dag.node_count();
  std::vector<char> keep(n, 0);
  std::vector<std::size_t> stack{x, y};
  stack.insert(stack.end(), z.begin(), z.end());
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    if (keep[v]) continue;
    keep[v] = 1;
    for (auto p : dag.parents(v)) stack.push_back(p);
  }
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (std::size_t v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    const auto& pa = dag.parents(v);
    for (auto p : pa) adj[p][v] = adj[v][p] = 1;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      for (std::size_t j = i + 1; j < pa.size(); ++j) adj[pa[i]][pa[j]] = adj[pa[j]][pa[i]] = 1;
    }
  }
  std::vector<char> blocked(n, 0);
  for (auto v : z) blocked[v] = 1;
  std::vector<char> seen(n, 0);
  stack = {x};
  seen[x] = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    if (v == y) return false;
    for (std::size_t u = 0; u < n; ++u) {
      if (adj[v][u] && keep[u] && !blocked[u] && !seen[u]) {
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  return true;
}

/// Random DAG: edges only from lower to higher position in a random order.
inline Dag random_dag(std::size_t n, double edge_prob, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < edge_prob) edges.emplace_back(order[i], order[j]);
    }
  }
  return Dag(n, std::move(edges));
}

/// Y is d-separated from every node outside the blanket given the blanket,
/// and no blanket member can be dropped.
inline bool blanket_agrees_with_oracle(const Dag& dag, std::size_t node) {
  const auto mb = markov_blanket(dag, node);
  for (std::size_t v = 0; v < dag.node_count(); ++v) {
    if (v == node || std::find(mb.begin(), mb.end(), v) != mb.end()) continue;
    if (!d_separated(dag, node, v, mb)) return false;
  }
  for (auto m : mb) {
    std::vector<std::size_t> rest;
    for (auto o : mb) {
      if (o != m) rest.push_back(o);
    }
    if (d_separated(dag, node, m, rest)) return false;
  }
  return true;
}

}  // namespace tasksynth::testing
