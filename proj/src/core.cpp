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
#include "tasksynth/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "text_util.hpp"

namespace tasksynth {

Schema::Schema(std::vector<Column> columns, std::size_t target_index)
    : columns_(std::move(columns)), target_index_(target_index) {
  if (columns_.empty()) throw SchemaError("schema has no columns");
  if (target_index_ >= columns_.size()) {
    throw SchemaError("target index " + std::to_string(target_index_) + " out of range");
  }
  for (const auto& c : columns_) {
    if (c.cardinality < 1) throw SchemaError("column '" + c.name + "' has cardinality 0");
  }
  for (std::size_t j = 1; j < columns_.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (columns_[i].name == columns_[j].name) throw SchemaError("duplicate column name '" + columns_[j].name + "'");
    }
  }
  if (columns_[target_index_].cardinality < 2) {
    throw SchemaError("target column '" + columns_[target_index_].name +
                      "' needs at least two categories");
  }
}

std::vector<std::size_t> Schema::feature_indices() const {
  std::vector<std::size_t> out;
  out.reserve(columns_.size() - 1);
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (j != target_index_) out.push_back(j);
  }
  return out;
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].name == name) return j;
  }
  return std::nullopt;
}

DiscreteDataset::DiscreteDataset(Schema schema, CategoryMatrix rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {
  if (rows_.rows() < 1) throw ParameterError("dataset must contain at least one row");
  if (static_cast<std::size_t>(rows_.cols()) != schema_.size()) {
    throw SchemaError("dataset has " + std::to_string(rows_.cols()) + " columns, schema has " +
                      std::to_string(schema_.size()));
  }
  for (Eigen::Index j = 0; j < rows_.cols(); ++j) {
    const auto card = static_cast<std::int32_t>(schema_.cardinality(static_cast<std::size_t>(j)));
    const auto col = rows_.col(j);
    if ((col.array() < 0).any() || (col.array() >= card).any()) {
      throw SchemaError("column '" + schema_.column(static_cast<std::size_t>(j)).name +
                        "' has a value outside 0.." + std::to_string(card - 1));
    }
  }
}

DiscreteDataset DiscreteDataset::select_rows(std::span<const std::size_t> row_indices) const {
  CategoryMatrix out(static_cast<Eigen::Index>(row_indices.size()), rows_.cols());
  for (std::size_t i = 0; i < row_indices.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = rows_.row(static_cast<Eigen::Index>(row_indices[i]));
  }
  return DiscreteDataset(schema_, std::move(out));
}

Clique::Clique(std::vector<std::size_t> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw ParameterError("clique must be nonempty");
  std::sort(columns_.begin(), columns_.end());
  if (std::adjacent_find(columns_.begin(), columns_.end()) != columns_.end()) {
    throw ParameterError("clique has duplicate columns");
  }
}

bool Clique::contains(std::size_t column) const {
  return std::binary_search(columns_.begin(), columns_.end(), column);
}

bool Clique::is_subset_of(const Clique& other) const {
  return std::includes(other.columns_.begin(), other.columns_.end(), columns_.begin(),
                       columns_.end());
}

std::string to_string(const Clique& clique, const Schema& schema) {
  std::string out;
  for (const auto c : clique.columns()) {
    if (!out.empty()) out += '|';
    out += schema.column(c).name;
  }
  return out;
}

MarginalTable::MarginalTable(Clique clique, std::vector<std::size_t> shape, Vector probs)
    : clique_(std::move(clique)), shape_(std::move(shape)), probs_(std::move(probs)) {
  if (shape_.size() != clique_.size()) throw ParameterError("shape rank differs from clique size");
  std::size_t cells = 1;
  for (const auto s : shape_) cells *= s;
  if (static_cast<std::size_t>(probs_.size()) != cells) {
    throw ParameterError("marginal has " + std::to_string(probs_.size()) + " cells, expected " +
                         std::to_string(cells));
  }
  if ((probs_.array() < 0.0).any() || !probs_.allFinite()) {
    throw ParameterError("marginal has negative or non-finite entries");
  }
  if (std::abs(probs_.sum() - 1.0) > 1e-9) {
    throw ParameterError("marginal does not sum to 1");
  }
}

std::size_t MarginalTable::cell_index(std::span<const std::size_t> values) const {
  std::size_t cell = 0;
  for (std::size_t i = 0; i < shape_.size(); ++i) cell = cell * shape_[i] + values[i];
  return cell;
}

std::vector<std::size_t> MarginalTable::cell_values(std::size_t cell) const {
  std::vector<std::size_t> values(shape_.size());
  for (std::size_t i = shape_.size(); i-- > 0;) {
    values[i] = cell % shape_[i];
    cell /= shape_[i];
  }
  return values;
}

namespace {

void check_clique(const Schema& schema, const Clique& clique) {
  if (clique.columns().back() >= schema.size()) {
    throw SchemaError("clique column " + std::to_string(clique.columns().back()) +
                      " out of range for schema with " + std::to_string(schema.size()) +
                      " columns");
  }
}

}  // namespace

std::size_t domain_size(const Schema& schema, const Clique& clique) {
  check_clique(schema, clique);
  std::size_t size = 1;
  for (const auto c : clique.columns()) size *= schema.cardinality(c);
  return size;
}

MarginalTable compute_marginal(const DiscreteDataset& dataset, const Clique& clique) {
  const auto& schema = dataset.schema();
  const auto cells = domain_size(schema, clique);
  std::vector<std::size_t> shape;
  for (const auto c : clique.columns()) shape.push_back(schema.cardinality(c));

  Vector counts = Vector::Zero(static_cast<Eigen::Index>(cells));
  const auto& rows = dataset.rows();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    std::size_t cell = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) {
      cell = cell * shape[k] +
             static_cast<std::size_t>(rows(i, static_cast<Eigen::Index>(clique.columns()[k])));
    }
    counts[static_cast<Eigen::Index>(cell)] += 1.0;
  }
  counts /= static_cast<double>(dataset.size());
  return MarginalTable(clique, std::move(shape), std::move(counts));
}

MarginalTable marginalize(const MarginalTable& table, const Clique& sub) {
  if (!sub.is_subset_of(table.clique())) {
    throw ParameterError("marginalize: target clique is not a subset of the table's clique");
  }
  // positions of the kept columns inside the parent clique
  std::vector<std::size_t> keep;
  std::vector<std::size_t> sub_shape;
  const auto& parent = table.clique().columns();
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (sub.contains(parent[i])) {
      keep.push_back(i);
      sub_shape.push_back(table.shape()[i]);
    }
  }
  std::size_t sub_cells = 1;
  for (const auto s : sub_shape) sub_cells *= s;

  Vector out = Vector::Zero(static_cast<Eigen::Index>(sub_cells));
  for (std::size_t cell = 0; cell < table.size(); ++cell) {
    const auto values = table.cell_values(cell);
    std::size_t sub_cell = 0;
    for (std::size_t k = 0; k < keep.size(); ++k) sub_cell = sub_cell * sub_shape[k] + values[keep[k]];
    out[static_cast<Eigen::Index>(sub_cell)] += table.probs()[static_cast<Eigen::Index>(cell)];
  }
  // rounding drift from the summation stays far below the 1e-9 invariant
  return MarginalTable(sub, std::move(sub_shape), std::move(out));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

Rng Rng::derive(std::uint64_t parent_seed, std::string_view label) {
  return Rng(splitmix64(parent_seed ^ fnv1a64(label)));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (cached_normal_) {
    const double z = *cached_normal_;
    cached_normal_.reset();
    return z;
  }
  // Box-Muller; 1 - u keeps the log argument in (0, 1]
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (const double w : weights) total += w;
  if (weights.empty() || !(total > 0.0)) {
    throw ParameterError("categorical draw needs positive total weight");
  }
  const double u = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw ParameterError("uniform_index over an empty range");
  return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
}

DiscreteDataset read_dataset_csv(const std::string& path, std::string_view target_column,
                                 const std::map<std::string, std::size_t>& cardinalities) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open dataset file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IngestionError("dataset file '" + path + "' is empty");
  const auto header = detail::split(line, ',');

  std::vector<std::vector<std::int32_t>> cols(header.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != header.size()) {
      throw IngestionError(path + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto v = detail::parse_number<std::int32_t>(fields[j]);
      if (!v || *v < 0) {
        throw IngestionError(path + ":" + std::to_string(line_no) + ": column '" + header[j] +
                             "' has non-category value '" + fields[j] + "'");
      }
      cols[j].push_back(*v);
    }
  }
  if (cols.empty() || cols[0].empty()) throw IngestionError("dataset file '" + path + "' has no rows");

  std::vector<Column> columns;
  std::optional<std::size_t> target;
  for (std::size_t j = 0; j < header.size(); ++j) {
    std::size_t card = static_cast<std::size_t>(*std::max_element(cols[j].begin(), cols[j].end())) + 1;
    if (const auto it = cardinalities.find(header[j]); it != cardinalities.end()) {
      if (it->second < card) {
        throw IngestionError("column '" + header[j] + "' has values beyond declared cardinality " +
                             std::to_string(it->second));
      }
      card = it->second;
    }
    if (header[j] == target_column) {
      target = j;
      card = std::max<std::size_t>(card, 2);
    }
    columns.push_back({header[j], card});
  }
  if (!target) throw IngestionError("target column '" + std::string(target_column) + "' not in header");

  CategoryMatrix rows(static_cast<Eigen::Index>(cols[0].size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    rows.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const vec_type<std::int32_t>>(cols[j].data(), static_cast<Eigen::Index>(cols[j].size()));
  }
  return DiscreteDataset(Schema(std::move(columns), *target), std::move(rows));
}

void write_dataset_csv(const std::string& path, const DiscreteDataset& dataset) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write dataset file '" + path + "'");
  const auto& schema = dataset.schema();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    out << (j ? "," : "") << schema.column(j).name;
  }
  out << '\n';
  const auto& rows = dataset.rows();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) out << (j ? "," : "") << rows(i, j);
    out << '\n';
  }
}

}  // namespace tasksynth
