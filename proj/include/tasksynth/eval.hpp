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
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tasksynth/bench.hpp"
#include "tasksynth/core.hpp"
#include "tasksynth/pipeline.hpp"

namespace tasksynth {

/// Every non-target column one-hot encoded, no category dropped. Row i
/// activates slot `active(f, i)` for each feature f.
struct OneHotDesign {
  std::size_t dim = 0;
  Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic> active;
};

OneHotDesign encode_one_hot(const DiscreteDataset& dataset);

struct LogRegOptions {
  double l2_lambda = 1e-3;
  std::size_t max_iters = 500;
  double tolerance = 1e-6;
};

struct LogRegModel {
  /// One weight per one-hot slot.
  Vector weights;
  double intercept = 0.0;
  double l2_lambda = 0.0;
  double final_loss = 0.0;
  std::size_t iterations = 0;
  bool prior_only = false;
};

/// Mean log loss plus (lambda / 2) * ||w||^2, intercept unpenalized.
/// `params` holds the weights followed by the intercept; writes the
/// gradient when `gradient` is non-null.
double logreg_objective(const Vector& params, const OneHotDesign& design, const Vector& labels, double l2_lambda,
                        Vector* gradient = nullptr);

/// Full-batch gradient descent with Armijo backtracking. A single-class
/// training set yields a prior-only model with intercept clipped to +-10.
LogRegModel train_logreg(const DiscreteDataset& train, const LogRegOptions& options = {});

/// Log-odds of the positive class for each row.
Vector decision_function(const LogRegModel& model, const DiscreteDataset& data);

/// P(score+ > score-) + P(tie) / 2 over positive/negative pairs.
double roc_auc(std::span<const double> scores, std::span<const std::int32_t> labels);
/// Fraction of rows with (score >= threshold) == label.
double accuracy(std::span<const double> scores, std::span<const std::int32_t> labels, double threshold);

/// Mean over columns of the L1 distance between 1-way distributions.
double oneway_l1(const DiscreteDataset& real_data, const DiscreteDataset& synth);

/// Expected 0-1 loss under a joint over features and the target, for a
/// classifier given as one predicted label per feature-block cell.
double zero_one_risk(const MarginalTable& joint, std::size_t target, std::span<const std::int32_t> prediction);

const std::vector<std::string>& method_names();

struct MethodOptions {
  /// Predictive regime subset size.
  std::size_t k = 8;
  /// Subset size for the non-private correlation oracle.
  std::size_t corr_k = 2;
  std::size_t n_syn = 5000;
  LogRegOptions logreg;
};

/// Pipeline settings for a named method on a benchmark at one epsilon.
PipelineConfig method_config(std::string_view method, const BenchPair& bench, double epsilon,
                             const MethodOptions& options);

struct RunReport {
  std::string method;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double auc = 0.0;
  double accuracy = 0.0;
  double oneway_l1 = 0.0;
  PrivacySpec configured;
  PrivacySpec spent;
};

RunReport tstr_run(std::string_view method, const BenchPair& bench, double epsilon, std::uint64_t seed,
                   const MethodOptions& options = {});

struct MetricSummary {
  double mean = 0.0;
  double ci95 = 0.0;
};

struct AggregateReport {
  std::string method;
  double epsilon = 0.0;
  std::size_t runs = 0;
  MetricSummary auc;
  MetricSummary accuracy;
  MetricSummary oneway_l1;
};

/// mean and 1.96 * sd / sqrt(runs); needs >= 2 reports of one
/// (method, epsilon).
AggregateReport aggregate(std::span<const RunReport> reports);
/// Groups by (method, epsilon) in first-appearance order.
std::vector<AggregateReport> aggregate_all(std::span<const RunReport> reports);

/// Runs every seed x method x epsilon; `make_bench` builds the data for a
/// seed once and all methods share it.
std::vector<RunReport> run_sweep(const std::function<BenchPair(std::uint64_t)>& make_bench,
                                 const std::vector<std::string>& methods, const std::vector<double>& epsilons,
                                 const std::vector<std::uint64_t>& seeds, const MethodOptions& options = {});

void write_runs_csv(const std::string& path, std::span<const RunReport> reports);
void write_aggregate_csv(const std::string& path, std::span<const AggregateReport> reports);

enum class Metric { Auc, Accuracy, OnewayL1 };
/// `method,epsilon,mean,ci95` for one metric.
void write_figure_csv(const std::string& path, std::span<const AggregateReport> reports, Metric metric);

}  // namespace tasksynth
