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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tasksynth/core.hpp"
#include "tasksynth/structure.hpp"

namespace tasksynth {

enum class ShiftKind { Spurious, Marginal };

struct ScmConfig {
  std::size_t n_train = 5000;
  std::size_t n_test = 5000;
  double p_flip_train = 0.10;
  double p_flip_test = 0.50;
  ShiftKind shift_kind = ShiftKind::Spurious;
  std::uint64_t seed = 0;
  /// Test-time P(A) = P(B) under a marginal shift.
  std::vector<double> shifted_parent_probs{0.1, 0.2, 0.7};
  /// Variance of the Gaussian term inside the sigmoid.
  double eta_variance = 0.5;
  double parent_coefficient = 0.9;

  static ScmConfig spurious(std::uint64_t seed);
  static ScmConfig marginal(std::uint64_t seed);
  void validate() const;
};

inline constexpr std::size_t kScmChildren = 10;
inline constexpr std::size_t kScmNoise = 10;

struct BenchPair {
  DiscreteDataset train;
  DiscreteDataset test;
  /// Ground-truth structure (synthetic benchmarks only).
  std::optional<Dag> dag;
  /// Per-feature oracle task weights (allocation benchmark only).
  std::optional<std::map<std::size_t, double>> oracle_weights;
};

/// Columns A, B, S1..S10, N1..N10, Y; DAG A->Y, B->Y, Y->S_j.
BenchPair gen_scm(const ScmConfig& config);

/// Test-time distribution of each parent under a marginal shift.
Vector apply_marginal_shift(const ScmConfig& config);

struct AllocBenchConfig {
  std::size_t n_train = 400;
  std::size_t n_test = 2000;
  std::size_t strong = 4;
  std::size_t weak = 16;
  double strong_p1 = 0.9;
  double strong_p0 = 0.1;
  double weak_p1 = 0.55;
  double weak_p0 = 0.45;
};

/// Binary Y ~ Bernoulli(0.5) with conditionally independent binary features;
/// oracle weights are (P(X=1|Y=1) - P(X=1|Y=0))^2.
BenchPair gen_alloc_bench(std::uint64_t seed, const AllocBenchConfig& config = {});

struct QuantileBins {
  std::vector<std::size_t> bins;
  /// Ascending cut points; a value's bin is the number of cuts <= value.
  std::vector<double> cuts;

  std::size_t bin_count() const { return cuts.size() + 1; }
  std::size_t bin_of(double value) const;
};

/// Cuts at the i/k empirical quantiles (order statistic floor(i n / k)),
/// merged when equal, so no bin is empty on the input values.
QuantileBins quantile_bin(std::span<const double> values, std::size_t k);

enum class AdultFormat { Auto, Uci, Numeric };

struct AdultOptions {
  AdultFormat format = AdultFormat::Auto;
  std::size_t bins = 8;
  double test_fraction = 0.2;
};

/// Accepts a directory holding the UCI adult.data / adult.test pair, a
/// single UCI file, or a CSV with a header row. Drops fnlwgt, education
/// (the string twin of education-num) and native-country; bins the five
/// continuous columns on the training split; splits stratified by target.
BenchPair load_adult(const std::string& path, std::uint64_t seed, const AdultOptions& options = {});

/// Indices of a seeded, class-stratified split: ceil(fraction * n) test
/// rows, shared across classes by largest remainder.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
SplitIndices stratified_split(std::span<const std::int32_t> labels, double test_fraction, Rng& rng);

struct BenchOptions {
  std::optional<std::string> adult_path;
  std::optional<ScmConfig> scm;
  AllocBenchConfig alloc;
  AdultOptions adult;
};

/// Benchmarks by name: scm-spurious, scm-marginal, alloc-wins, adult.
BenchPair make_benchmark(std::string_view name, std::uint64_t seed, const BenchOptions& options = {});

}  // namespace tasksynth
