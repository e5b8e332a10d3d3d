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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tasksynth/types.hpp"

namespace tasksynth {

struct Column {
  std::string name;
  std::size_t cardinality = 0;

  bool operator==(const Column&) const = default;
};

/// Ordered columns with one designated prediction target. Categories of
/// column j are the dense integers 0..cardinality(j)-1.
class Schema {
 public:
  Schema(std::vector<Column> columns, std::size_t target_index);

  std::size_t size() const { return columns_.size(); }
  const Column& column(std::size_t j) const { return columns_.at(j); }
  const std::vector<Column>& columns() const { return columns_; }
  std::size_t cardinality(std::size_t j) const { return columns_.at(j).cardinality; }
  std::size_t target_index() const { return target_index_; }

  /// Every column except the target, ascending.
  std::vector<std::size_t> feature_indices() const;
  std::optional<std::size_t> index_of(std::string_view name) const;

  bool operator==(const Schema&) const = default;

 private:
  std::vector<Column> columns_;
  std::size_t target_index_;
};

class DiscreteDataset {
 public:
  /// Throws SchemaError if any cell is outside its column's domain or the
  /// column count disagrees with the schema; ParameterError if empty.
  DiscreteDataset(Schema schema, CategoryMatrix rows);

  const Schema& schema() const { return schema_; }
  const CategoryMatrix& rows() const { return rows_; }
  std::size_t size() const { return static_cast<std::size_t>(rows_.rows()); }
  std::int32_t operator()(std::size_t i, std::size_t j) const {
    return rows_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  DiscreteDataset select_rows(std::span<const std::size_t> row_indices) const;

 private:
  Schema schema_;
  CategoryMatrix rows_;
};

/// Sorted, duplicate-free, nonempty set of column indices.
class Clique {
 public:
  /// Sorts the input; throws ParameterError on duplicates or an empty list.
  explicit Clique(std::vector<std::size_t> columns);
  Clique(std::initializer_list<std::size_t> columns)
      : Clique(std::vector<std::size_t>(columns)) {}

  const std::vector<std::size_t>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  bool contains(std::size_t column) const;
  bool is_subset_of(const Clique& other) const;

  auto operator<=>(const Clique&) const = default;

 private:
  std::vector<std::size_t> columns_;
};

std::string to_string(const Clique& clique, const Schema& schema);

/// Probability vector over the product domain of a clique.
///
/// Cells are linearized row-major over the clique columns in ascending
/// column-index order: the last column varies fastest, so for a clique
/// {a, b} the cell (x_a, x_b) lives at x_a * |b| + x_b.
class MarginalTable {
 public:
  /// Throws ParameterError unless probs is nonnegative, sums to 1 within
  /// 1e-9, and has length prod(shape).
  MarginalTable(Clique clique, std::vector<std::size_t> shape, Vector probs);

  const Clique& clique() const { return clique_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  const Vector& probs() const { return probs_; }
  std::size_t size() const { return static_cast<std::size_t>(probs_.size()); }

  /// values[i] is the category of clique column i.
  std::size_t cell_index(std::span<const std::size_t> values) const;
  std::vector<std::size_t> cell_values(std::size_t cell) const;

 private:
  Clique clique_;
  std::vector<std::size_t> shape_;
  Vector probs_;
};

std::size_t domain_size(const Schema& schema, const Clique& clique);

MarginalTable compute_marginal(const DiscreteDataset& dataset, const Clique& clique);

/// Sums a table down to a sub-clique. Throws ParameterError if sub is not a
/// subset of the table's clique.
MarginalTable marginalize(const MarginalTable& table, const Clique& sub);

template <class DerivedA, class DerivedB>
typename DerivedA::Scalar tv_distance(const Eigen::MatrixBase<DerivedA>& p,
                                      const Eigen::MatrixBase<DerivedB>& q) {
  return typename DerivedA::Scalar(0.5) * (p - q).cwiseAbs().sum();
}

/// Deterministic random stream.
///
/// The generator is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. Uniform and normal variates are derived here rather than
/// through <random> distributions, whose algorithms are implementation
/// defined. Child streams are derived with split(): the child seed is
/// splitmix64(parent_seed ^ fnv1a64(label)), so streams for distinct labels
/// do not depend on how many draws any sibling consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng derive(std::uint64_t parent_seed, std::string_view label);
  Rng split(std::string_view label) const { return derive(seed_, label); }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Index drawn with probability proportional to weights (need not sum to 1).
  std::size_t categorical(std::span<const double> weights);
  std::size_t uniform_index(std::size_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> cached_normal_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

/// Reads a CSV with a header row and integer category indices.
///
/// Column cardinalities come from `cardinalities` where given, otherwise
/// max observed value + 1 (the domain is treated as public).
DiscreteDataset read_dataset_csv(const std::string& path, std::string_view target_column,
                                 const std::map<std::string, std::size_t>& cardinalities = {});
void write_dataset_csv(const std::string& path, const DiscreteDataset& dataset);

}  // namespace tasksynth
