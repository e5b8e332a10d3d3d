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
#include "tasksynth/synthesis.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace tasksynth {

void NoisyMeasurements::insert(Measurement measurement) {
  const Clique key = measurement.table.clique();
  if (!tables_.emplace(key, std::move(measurement)).second) {
    throw ContractError("clique measured twice");
  }
}

const Measurement& NoisyMeasurements::at(const Clique& clique) const {
  const auto it = tables_.find(clique);
  if (it == tables_.end()) throw ContractError("required marginal was not measured");
  return it->second;
}

PrivacyLedger NoisyMeasurements::ledger() const {
  PrivacyLedger ledger;
  for (const auto& [clique, m] : tables_) ledger.record(m.cost.label, m.cost.epsilon, m.cost.delta);
  return ledger;
}

NoisyMeasurements measure_workload(const DiscreteDataset& dataset, const Workload& workload, Rng& rng) {
  if (!workload.fully_assigned()) throw ContractError("measure_workload: a query has no budget");
  const auto& schema = dataset.schema();
  const double sensitivity = marginal_sensitivity(dataset.size());
  NoisyMeasurements out;
  for (const auto& q : workload.queries()) {
    std::string key = "measure";
    for (const auto c : q.clique.columns()) key += "/" + std::to_string(c);
    auto child = rng.split(key);
    const double sigma = gaussian_sigma(sensitivity, q.allocated->epsilon, q.allocated->delta);
    auto table = gaussian_measure(compute_marginal(dataset, q.clique), sigma, child);
    out.insert({std::move(table),
                {std::string(to_string(q.pool)) + "/" + to_string(q.clique, schema), q.allocated->epsilon,
                 q.allocated->delta},
                sigma});
  }
  return out;
}

std::vector<std::size_t> SynthModel::modeled_columns() const {
  std::set<std::size_t> cols;
  if (kind == ModelKind::Independent) {
    for (const auto& [c, p] : independent_marginals) cols.insert(c);
  } else if (joint) {
    cols.insert(joint->clique().columns().begin(), joint->clique().columns().end());
  } else {
    cols.insert(root);
    for (const auto& c : conditionals) cols.insert(c.child);
  }
  return {cols.begin(), cols.end()};
}

ConditionalTable conditional_from_table(const MarginalTable& table, std::size_t child, std::size_t parent) {
  if (table.clique() != Clique{child, parent}) {
    throw ContractError("conditional_from_table: table is not over {child, parent}");
  }
  const bool child_first = child < parent;
  const auto child_card = table.shape()[child_first ? 0 : 1];
  const auto parent_card = table.shape()[child_first ? 1 : 0];
  ConditionalTable out{child, parent,
                       Matrix(static_cast<Eigen::Index>(child_card), static_cast<Eigen::Index>(parent_card))};
  for (std::size_t x = 0; x < child_card; ++x) {
    for (std::size_t y = 0; y < parent_card; ++y) {
      const auto cell = child_first ? x * parent_card + y : y * child_card + x;
      out.probs(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
          table.probs()[static_cast<Eigen::Index>(cell)];
    }
  }
  for (Eigen::Index y = 0; y < out.probs.cols(); ++y) {
    const double mass = out.probs.col(y).sum();
    if (mass > 0.0) {
      out.probs.col(y) /= mass;
    } else {
      out.probs.col(y).setConstant(1.0 / static_cast<double>(child_card));
    }
  }
  return out;
}

Vector estimate_marginal(const NoisyMeasurements& measurements, std::size_t column, PriorEstimate estimate) {
  const auto& one_way = measurements.at(Clique{column});
  if (estimate == PriorEstimate::OneWay) return one_way.table.probs();
  const double card = static_cast<double>(one_way.table.size());
  Vector numerator = Vector::Zero(one_way.table.probs().size());
  double denominator = 0.0;
  for (const auto& [clique, m] : measurements.all()) {
    if (!clique.contains(column)) continue;
    const Vector margin = clique.size() == 1 ? m.table.probs() : marginalize(m.table, Clique{column}).probs();
    if (m.sigma == 0.0) return margin;
    // each margin cell sums |Omega| / card noisy cells
    const double variance = m.sigma * m.sigma * static_cast<double>(m.table.size()) / card;
    numerator += margin / variance;
    denominator += 1.0 / variance;
  }
  return project_simplex(numerator / denominator);
}

SynthModel fit_naive_bayes(const NoisyMeasurements& measurements, const FeatureSubset& subset,
                           const Schema& schema, const NaiveBayesOptions& options) {
  const auto target = schema.target_index();
  SynthModel model;
  model.kind = ModelKind::NaiveBayes;
  model.root = target;
  model.root_marginal = estimate_marginal(measurements, target, options.prior);
  if (options.use_full_joint && subset.indices.size() >= 2) {
    auto cols = subset.indices;
    cols.push_back(target);
    const Clique joint(cols);
    if (measurements.contains(joint)) {
      model.joint = measurements.at(joint).table;
      return model;
    }
  }
  for (const auto j : subset.indices) {
    model.conditionals.push_back(conditional_from_table(measurements.at(Clique{j, target}).table, j, target));
  }
  return model;
}

SynthModel fit_tree(const NoisyMeasurements& measurements, const std::vector<Edge>& edges, std::size_t root,
                    PriorEstimate prior) {
  std::set<std::size_t> nodes{root};
  std::map<std::size_t, std::vector<std::size_t>> adjacent;
  for (const auto& [u, v] : edges) {
    if (u == v) throw ParameterError("fit_tree: self-loop edge");
    nodes.insert(u);
    nodes.insert(v);
    adjacent[u].push_back(v);
    adjacent[v].push_back(u);
  }
  if (edges.size() + 1 != nodes.size()) throw ParameterError("fit_tree: edges do not form a spanning tree");

  SynthModel model;
  model.kind = ModelKind::Tree;
  model.root = root;
  model.root_marginal = estimate_marginal(measurements, root, prior);
  std::set<std::size_t> visited{root};
  std::deque<std::size_t> frontier{root};
  while (!frontier.empty()) {
    const auto parent = frontier.front();
    frontier.pop_front();
    auto next = adjacent[parent];
    std::sort(next.begin(), next.end());
    for (const auto child : next) {
      if (!visited.insert(child).second) continue;
      model.conditionals.push_back(
          conditional_from_table(measurements.at(Clique{child, parent}).table, child, parent));
      frontier.push_back(child);
    }
  }
  if (visited.size() != nodes.size()) throw ParameterError("fit_tree: edges do not form a spanning tree");
  return model;
}

SynthModel fit_independent(const NoisyMeasurements& measurements, const Schema& schema) {
  SynthModel model;
  model.kind = ModelKind::Independent;
  model.root = schema.target_index();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    model.independent_marginals[j] = measurements.at(Clique{j}).table.probs();
  }
  model.root_marginal = model.independent_marginals.at(model.root);
  return model;
}

namespace {

class Sampler {
 public:
  template <class Derived>
  explicit Sampler(const Eigen::MatrixBase<Derived>& probs) : cumulative_(static_cast<std::size_t>(probs.size())) {
    double running = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      running += probs[i];
      cumulative_[static_cast<std::size_t>(i)] = running;
    }
  }

  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

void fill_column(CategoryMatrix& out, std::size_t column, const Vector& probs, Rng& rng) {
  const Sampler sampler(probs);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out(i, static_cast<Eigen::Index>(column)) = static_cast<std::int32_t>(sampler.draw(rng));
  }
}

}  // namespace

DiscreteDataset sample_synthetic(const SynthModel& model, const NoisyMeasurements& background,
                                 const Schema& schema, std::size_t n_syn, Rng& rng) {
  if (n_syn < 1) throw ParameterError("sample_synthetic: n_syn must be >= 1");
  CategoryMatrix out(static_cast<Eigen::Index>(n_syn), static_cast<Eigen::Index>(schema.size()));
  std::vector<bool> done(schema.size(), false);

  if (model.kind == ModelKind::Independent) {
    for (const auto& [column, probs] : model.independent_marginals) {
      fill_column(out, column, probs, rng);
      done.at(column) = true;
    }
  } else if (model.joint) {
    const auto& joint = *model.joint;
    const Sampler sampler(joint.probs());
    const auto& cols = joint.clique().columns();
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const auto values = joint.cell_values(sampler.draw(rng));
      for (std::size_t k = 0; k < cols.size(); ++k) {
        out(i, static_cast<Eigen::Index>(cols[k])) = static_cast<std::int32_t>(values[k]);
      }
    }
    for (const auto c : cols) done.at(c) = true;
  } else {
    fill_column(out, model.root, model.root_marginal, rng);
    done.at(model.root) = true;
    for (const auto& cond : model.conditionals) {
      if (!cond.parent || !done.at(*cond.parent)) throw ContractError("conditional sampled before its parent");
      std::vector<Sampler> per_parent;
      for (Eigen::Index y = 0; y < cond.probs.cols(); ++y) per_parent.emplace_back(cond.probs.col(y));
      const auto parent = static_cast<Eigen::Index>(*cond.parent);
      for (Eigen::Index i = 0; i < out.rows(); ++i) {
        out(i, static_cast<Eigen::Index>(cond.child)) =
            static_cast<std::int32_t>(per_parent[static_cast<std::size_t>(out(i, parent))].draw(rng));
      }
      done.at(cond.child) = true;
    }
  }

  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (!done[j]) fill_column(out, j, background.at(Clique{j}).table.probs(), rng);
  }
  return DiscreteDataset(schema, std::move(out));
}

MarginalTable model_joint(const SynthModel& model, const Schema& schema) {
  if (model.kind != ModelKind::Independent && model.joint) return *model.joint;
  const Clique clique(model.modeled_columns());
  const auto& cols = clique.columns();
  std::vector<std::size_t> shape;
  for (const auto c : cols) shape.push_back(schema.cardinality(c));
  const auto size = domain_size(schema, clique);
  Vector probs(static_cast<Eigen::Index>(size));
  std::vector<std::size_t> value_of(schema.size(), 0);
  const MarginalTable layout(clique, shape, Vector::Constant(static_cast<Eigen::Index>(size), 1.0 / size));
  for (std::size_t cell = 0; cell < size; ++cell) {
    const auto values = layout.cell_values(cell);
    for (std::size_t k = 0; k < cols.size(); ++k) value_of[cols[k]] = values[k];
    double p = 1.0;
    if (model.kind == ModelKind::Independent) {
      for (const auto& [c, m] : model.independent_marginals) p *= m[static_cast<Eigen::Index>(value_of[c])];
    } else {
      p = model.root_marginal[static_cast<Eigen::Index>(value_of[model.root])];
      for (const auto& cond : model.conditionals) {
        p *= cond.probs(static_cast<Eigen::Index>(value_of[cond.child]),
                        static_cast<Eigen::Index>(value_of[*cond.parent]));
      }
    }
    probs[static_cast<Eigen::Index>(cell)] = p;
  }
  probs /= probs.sum();
  return MarginalTable(clique, shape, std::move(probs));
}

}  // namespace tasksynth
