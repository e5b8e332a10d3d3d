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
#include "tasksynth/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "text_util.hpp"

namespace tasksynth {

OneHotDesign encode_one_hot(const DiscreteDataset& dataset) {
  const auto& schema = dataset.schema();
  const auto features = schema.feature_indices();
  OneHotDesign design;
  std::vector<std::size_t> offset;
  for (const auto j : features) {
    offset.push_back(design.dim);
    design.dim += schema.cardinality(j);
  }
  design.active.resize(static_cast<Eigen::Index>(features.size()), static_cast<Eigen::Index>(dataset.size()));
  for (Eigen::Index i = 0; i < design.active.cols(); ++i) {
    for (std::size_t f = 0; f < features.size(); ++f) {
      design.active(static_cast<Eigen::Index>(f), i) =
          static_cast<std::int32_t>(offset[f]) + dataset(static_cast<std::size_t>(i), features[f]);
    }
  }
  return design;
}

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Vector target_labels(const DiscreteDataset& data) {
  return data.rows().col(static_cast<Eigen::Index>(data.schema().target_index())).cast<double>();
}

std::span<const std::int32_t> target_span(const DiscreteDataset& data) {
  const auto t = static_cast<Eigen::Index>(data.schema().target_index());
  return {data.rows().col(t).data(), data.size()};
}

}  // namespace

double logreg_objective(const Vector& params, const OneHotDesign& design, const Vector& labels, double l2_lambda,
                        Vector* gradient) {
  const auto dim = static_cast<Eigen::Index>(design.dim);
  if (params.size() != dim + 1) throw ParameterError("logreg_objective: parameter length mismatch");
  if (labels.size() != design.active.cols()) throw ParameterError("logreg_objective: label count mismatch");
  const double intercept = params[dim];
  const auto n = design.active.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  if (gradient) *gradient = Vector::Zero(dim + 1);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double z = intercept;
    for (Eigen::Index f = 0; f < design.active.rows(); ++f) z += params[design.active(f, i)];
    loss += softplus(z) - labels[i] * z;
    if (gradient) {
      const double r = (sigmoid(z) - labels[i]) * inv_n;
      for (Eigen::Index f = 0; f < design.active.rows(); ++f) (*gradient)[design.active(f, i)] += r;
      (*gradient)[dim] += r;
    }
  }
  const auto w = params.head(dim);
  loss = loss * inv_n + 0.5 * l2_lambda * w.squaredNorm();
  if (gradient) gradient->head(dim) += l2_lambda * w;
  return loss;
}

LogRegModel train_logreg(const DiscreteDataset& train, const LogRegOptions& options) {
  const auto& schema = train.schema();
  if (schema.cardinality(schema.target_index()) != 2) throw ParameterError("logistic regression needs a binary target");
  if (!(options.l2_lambda >= 0.0)) throw ParameterError("l2_lambda must be nonnegative");
  const auto design = encode_one_hot(train);
  const Vector labels = target_labels(train);
  const auto dim = static_cast<Eigen::Index>(design.dim);

  LogRegModel model;
  model.l2_lambda = options.l2_lambda;
  const double rate = labels.mean();
  if (rate == 0.0 || rate == 1.0) {
    model.weights = Vector::Zero(dim);
    model.intercept = rate == 1.0 ? 10.0 : -10.0;
    model.prior_only = true;
    Vector params(dim + 1);
    params << model.weights, model.intercept;
    model.final_loss = logreg_objective(params, design, labels, options.l2_lambda);
    return model;
  }

  Vector params = Vector::Zero(dim + 1);
  Vector grad;
  double loss = logreg_objective(params, design, labels, options.l2_lambda, &grad);
  double step = 1.0;
  Vector candidate, candidate_grad;
  std::size_t iter = 0;
  for (; iter < options.max_iters; ++iter) {
    const double grad_sq = grad.squaredNorm();
    if (std::sqrt(grad_sq) < options.tolerance) break;
    double t = step;
    double candidate_loss = 0.0;
    bool accepted = false;
    while (t > 1e-16) {
      candidate = params - t * grad;
      candidate_loss = logreg_objective(candidate, design, labels, options.l2_lambda, &candidate_grad);
      if (candidate_loss <= loss - 1e-4 * t * grad_sq) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    params.swap(candidate);
    grad.swap(candidate_grad);
    loss = candidate_loss;
    step = 2.0 * t;
  }
  model.weights = params.head(dim);
  model.intercept = params[dim];
  model.final_loss = loss;
  model.iterations = iter;
  return model;
}

Vector decision_function(const LogRegModel& model, const DiscreteDataset& data) {
  const auto design = encode_one_hot(data);
  if (static_cast<Eigen::Index>(design.dim) != model.weights.size()) {
    throw SchemaError("decision_function: dataset encoding does not match the model");
  }
  Vector scores(design.active.cols());
  for (Eigen::Index i = 0; i < design.active.cols(); ++i) {
    double z = model.intercept;
    for (Eigen::Index f = 0; f < design.active.rows(); ++f) z += model.weights[design.active(f, i)];
    scores[i] = z;
  }
  return scores;
}

double roc_auc(std::span<const double> scores, std::span<const std::int32_t> labels) {
  if (scores.size() != labels.size()) throw ParameterError("roc_auc: scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    // tied block shares the mean of ranks i+1..j
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += rank;
        ++positives;
      } else if (labels[order[k]] != 0) {
        throw ParameterError("roc_auc: labels must be 0 or 1");
      }
    }
    i = j;
  }
  const auto negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw ParameterError("roc_auc needs both classes");
  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

double accuracy(std::span<const double> scores, std::span<const std::int32_t> labels, double threshold) {
  if (scores.size() != labels.size() || scores.empty()) throw ParameterError("accuracy: bad input lengths");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) hits += ((scores[i] >= threshold) == (labels[i] == 1)) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

double oneway_l1(const DiscreteDataset& real_data, const DiscreteDataset& synth) {
  if (!(real_data.schema() == synth.schema())) throw SchemaError("oneway_l1: schemas differ");
  const auto d = real_data.schema().size();
  double total = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    total += (compute_marginal(real_data, Clique{j}).probs() - compute_marginal(synth, Clique{j}).probs()).lpNorm<1>();
  }
  return total / static_cast<double>(d);
}

double zero_one_risk(const MarginalTable& joint, std::size_t target, std::span<const std::int32_t> prediction) {
  const auto& cols = joint.clique().columns();
  const auto pos = std::find(cols.begin(), cols.end(), target);
  if (pos == cols.end()) throw ParameterError("zero_one_risk: joint does not include the target");
  const auto t = static_cast<std::size_t>(pos - cols.begin());
  std::size_t feature_cells = 1;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (k != t) feature_cells *= joint.shape()[k];
  }
  if (prediction.size() != feature_cells) throw ParameterError("zero_one_risk: one prediction per feature cell");
  double risk = 0.0;
  for (std::size_t cell = 0; cell < joint.size(); ++cell) {
    const auto values = joint.cell_values(cell);
    std::size_t fc = 0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (k != t) fc = fc * joint.shape()[k] + values[k];
    }
    if (static_cast<std::size_t>(prediction[fc]) != values[t]) risk += joint.probs()[static_cast<Eigen::Index>(cell)];
  }
  return risk;
}

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{
      "causal-opt",   "causal-unif", "graphical-opt", "graphical-unif",     "predictive-opt",     "predictive-unif",
      "all-features", "independent", "corr-topk",     "oracle-weights-opt", "oracle-weights-unif"};
  return names;
}

PipelineConfig method_config(std::string_view method, const BenchPair& bench, double epsilon,
                             const MethodOptions& options) {
  PipelineConfig config;
  config.epsilon = epsilon;
  config.n_syn = options.n_syn;
  const auto& train = bench.train;
  auto suffix_mode = [&](std::string_view stem) {
    config.allocation = method.substr(stem.size()) == "-unif" ? AllocationMode::Uniform : AllocationMode::Optimal;
  };
  if (method == "causal-opt" || method == "causal-unif") {
    config.regime = RegimeChoice::causal();
    suffix_mode("causal");
  } else if (method == "graphical-opt" || method == "graphical-unif") {
    config.regime = RegimeChoice::graphical();
    suffix_mode("graphical");
  } else if (method == "predictive-opt" || method == "predictive-unif") {
    config.regime = RegimeChoice::predictive(options.k);
    config.mi_task_weights = true;
    suffix_mode("predictive");
  } else if (method == "all-features") {
    config.fixed_subset = train.schema().feature_indices();
    config.allocation = AllocationMode::Uniform;
  } else if (method == "independent") {
    config.backend = Backend::Independent;
  } else if (method == "corr-topk") {
    auto features = train.schema().feature_indices();
    if (options.corr_k < 1 || options.corr_k > features.size()) throw ParameterError("corr_k out of range");
    std::vector<double> score;
    for (const auto j : features) score.push_back(chi2_score(train, j, std::numeric_limits<double>::infinity()));
    std::vector<std::size_t> order(features.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    std::vector<std::size_t> top;
    for (std::size_t r = 0; r < options.corr_k; ++r) top.push_back(features[order[r]]);
    config.fixed_subset = top;
    config.allocation = AllocationMode::Uniform;
  } else if (method == "oracle-weights-opt" || method == "oracle-weights-unif") {
    if (!bench.oracle_weights) throw ParameterError("benchmark has no oracle task weights");
    config.fixed_subset = train.schema().feature_indices();
    config.task_weights = bench.oracle_weights;
    suffix_mode("oracle-weights");
  } else {
    throw ParameterError("unknown method '" + std::string(method) + "'");
  }
  return config;
}

RunReport tstr_run(std::string_view method, const BenchPair& bench, double epsilon, std::uint64_t seed,
                   const MethodOptions& options) {
  const auto config = method_config(method, bench, epsilon, options);
  // one stream per (method, seed) shared across epsilons: the sweep compares
  // noise scales on common draws
  auto rng = Rng::derive(seed, std::string(method));
  const auto result = synthesize(bench.train, bench.dag ? &*bench.dag : nullptr, config, rng);
  const auto model = train_logreg(result.synthetic, options.logreg);
  const Vector scores = decision_function(model, bench.test);
  const std::span<const double> score_span(scores.data(), static_cast<std::size_t>(scores.size()));
  const auto n = static_cast<double>(bench.train.size());

  RunReport report;
  report.method = std::string(method);
  report.epsilon = epsilon;
  report.seed = seed;
  report.auc = roc_auc(score_span, target_span(bench.test));
  report.accuracy = accuracy(score_span, target_span(bench.test), 0.0);
  report.oneway_l1 = oneway_l1(bench.train, result.synthetic);
  report.configured = {epsilon, config.delta.value_or(1.0 / (n * n))};
  report.spent = result.ledger.total();
  return report;
}

namespace {

MetricSummary summarize(std::span<const RunReport> reports, double RunReport::*field) {
  // Shifted by the first value so identical runs give exactly zero spread.
  const auto k = static_cast<double>(reports.size());
  const double shift = reports.front().*field;
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& r : reports) {
    const double d = r.*field - shift;
    sum += d;
    sum_sq += d * d;
  }
  const double variance = std::max(0.0, (sum_sq - sum * sum / k) / (k - 1.0));
  return {shift + sum / k, 1.96 * std::sqrt(variance) / std::sqrt(k)};
}

}  // namespace

AggregateReport aggregate(std::span<const RunReport> reports) {
  if (reports.size() < 2) throw ParameterError("aggregate needs at least two reports");
  for (const auto& r : reports) {
    if (r.method != reports.front().method || r.epsilon != reports.front().epsilon) {
      throw ParameterError("aggregate: reports mix methods or epsilons");
    }
  }
  return {reports.front().method, reports.front().epsilon, reports.size(), summarize(reports, &RunReport::auc),
          summarize(reports, &RunReport::accuracy), summarize(reports, &RunReport::oneway_l1)};
}

std::vector<AggregateReport> aggregate_all(std::span<const RunReport> reports) {
  std::vector<std::pair<std::string, double>> keys;
  for (const auto& r : reports) {
    if (std::find(keys.begin(), keys.end(), std::make_pair(r.method, r.epsilon)) == keys.end()) {
      keys.emplace_back(r.method, r.epsilon);
    }
  }
  std::vector<AggregateReport> out;
  for (const auto& [method, eps] : keys) {
    std::vector<RunReport> group;
    std::copy_if(reports.begin(), reports.end(), std::back_inserter(group),
                 [&](const RunReport& r) { return r.method == method && r.epsilon == eps; });
    out.push_back(aggregate(group));
  }
  return out;
}

std::vector<RunReport> run_sweep(const std::function<BenchPair(std::uint64_t)>& make_bench,
                                 const std::vector<std::string>& methods, const std::vector<double>& epsilons,
                                 const std::vector<std::uint64_t>& seeds, const MethodOptions& options) {
  if (methods.empty() || epsilons.empty() || seeds.empty()) {
    throw ParameterError("a sweep needs methods, epsilons and seeds");
  }
  std::vector<RunReport> out;
  for (const auto seed : seeds) {
    const auto bench = make_bench(seed);
    for (const auto& method : methods) {
      for (const auto eps : epsilons) out.push_back(tstr_run(method, bench, eps, seed, options));
    }
  }
  return out;
}

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write '" + path + "'");
  return out;
}

}  // namespace

void write_runs_csv(const std::string& path, std::span<const RunReport> reports) {
  auto out = open_output(path);
  out << "method,epsilon,seed,auc,accuracy,oneway_l1\n";
  for (const auto& r : reports) {
    out << r.method << ',' << detail::format_double(r.epsilon) << ',' << r.seed << ',' << detail::format_double(r.auc)
        << ',' << detail::format_double(r.accuracy) << ',' << detail::format_double(r.oneway_l1) << '\n';
  }
}

void write_aggregate_csv(const std::string& path, std::span<const AggregateReport> reports) {
  auto out = open_output(path);
  out << "method,epsilon,metric,mean,ci95\n";
  for (const auto& r : reports) {
    const std::pair<const char*, const MetricSummary*> metrics[] = {
        {"auc", &r.auc}, {"accuracy", &r.accuracy}, {"oneway_l1", &r.oneway_l1}};
    for (const auto& [name, m] : metrics) {
      out << r.method << ',' << detail::format_double(r.epsilon) << ',' << name << ',' << detail::format_double(m->mean)
          << ',' << detail::format_double(m->ci95) << '\n';
    }
  }
}

void write_figure_csv(const std::string& path, std::span<const AggregateReport> reports, Metric metric) {
  auto out = open_output(path);
  out << "method,epsilon,mean,ci95\n";
  for (const auto& r : reports) {
    const auto& m = metric == Metric::Auc ? r.auc : metric == Metric::Accuracy ? r.accuracy : r.oneway_l1;
    out << r.method << ',' << detail::format_double(r.epsilon) << ',' << detail::format_double(m.mean) << ','
        << detail::format_double(m.ci95) << '\n';
  }
}

}  // namespace tasksynth
