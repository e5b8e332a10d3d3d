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
#include "tasksynth/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "text_util.hpp"

namespace tasksynth {

ScmConfig ScmConfig::spurious(std::uint64_t seed) {
  ScmConfig c;
  c.seed = seed;
  return c;
}

ScmConfig ScmConfig::marginal(std::uint64_t seed) {
  ScmConfig c;
  c.p_flip_train = 0.15;
  c.p_flip_test = 0.15;
  c.shift_kind = ShiftKind::Marginal;
  c.seed = seed;
  return c;
}

void ScmConfig::validate() const {
  auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (n_train < 1 || n_test < 1) throw ParameterError("SCM sample sizes must be positive");
  if (!is_prob(p_flip_train) || !is_prob(p_flip_test)) throw ParameterError("flip probabilities must lie in [0, 1]");
  if (shifted_parent_probs.size() != 3 || !std::all_of(shifted_parent_probs.begin(), shifted_parent_probs.end(), is_prob) ||
      std::abs(std::accumulate(shifted_parent_probs.begin(), shifted_parent_probs.end(), 0.0) - 1.0) > 1e-9) {
    throw ParameterError("shifted parent distribution must be 3 probabilities summing to 1");
  }
  if (!(eta_variance >= 0.0)) throw ParameterError("eta variance must be nonnegative");
}

namespace {

Schema scm_schema() {
  std::vector<Column> cols{{"A", 3}, {"B", 3}};
  for (std::size_t j = 1; j <= kScmChildren; ++j) cols.push_back({"S" + std::to_string(j), 2});
  for (std::size_t j = 1; j <= kScmNoise; ++j) cols.push_back({"N" + std::to_string(j), 4});
  cols.push_back({"Y", 2});
  const auto target = cols.size() - 1;
  return Schema(std::move(cols), target);
}

DiscreteDataset scm_sample(const Schema& schema, const ScmConfig& config, std::size_t n, const Vector& parent_probs,
                           double p_flip, Rng& rng) {
  CategoryMatrix rows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(schema.size()));
  const auto target = static_cast<Eigen::Index>(schema.target_index());
  const double eta_sd = std::sqrt(config.eta_variance);
  const std::span<const double> parent(parent_probs.data(), static_cast<std::size_t>(parent_probs.size()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const auto a = static_cast<std::int32_t>(rng.categorical(parent));
    const auto b = static_cast<std::int32_t>(rng.categorical(parent));
    const double z = config.parent_coefficient * (a - 1) + config.parent_coefficient * (b - 1) + eta_sd * rng.normal();
    const std::int32_t y = rng.uniform() < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
    rows(i, 0) = a;
    rows(i, 1) = b;
    for (std::size_t j = 0; j < kScmChildren; ++j) {
      rows(i, static_cast<Eigen::Index>(2 + j)) = y ^ (rng.uniform() < p_flip ? 1 : 0);
    }
    for (std::size_t j = 0; j < kScmNoise; ++j) {
      rows(i, static_cast<Eigen::Index>(2 + kScmChildren + j)) = static_cast<std::int32_t>(rng.uniform_index(4));
    }
    rows(i, target) = y;
  }
  return DiscreteDataset(schema, std::move(rows));
}

}  // namespace

Vector apply_marginal_shift(const ScmConfig& config) {
  if (config.shift_kind != ShiftKind::Marginal) throw ParameterError("apply_marginal_shift needs a marginal-shift config");
  config.validate();
  return Eigen::Map<const Vector>(config.shifted_parent_probs.data(), 3);
}

BenchPair gen_scm(const ScmConfig& config) {
  config.validate();
  const auto schema = scm_schema();
  const auto target = schema.target_index();
  std::vector<Edge> edges{{0, target}, {1, target}};
  for (std::size_t j = 0; j < kScmChildren; ++j) edges.emplace_back(target, 2 + j);

  const Vector uniform = Vector::Constant(3, 1.0 / 3.0);
  const Vector test_parents = config.shift_kind == ShiftKind::Marginal ? apply_marginal_shift(config) : uniform;
  auto train_rng = Rng::derive(config.seed, "scm/train");
  auto test_rng = Rng::derive(config.seed, "scm/test");
  auto train = scm_sample(schema, config, config.n_train, uniform, config.p_flip_train, train_rng);
  auto test = scm_sample(schema, config, config.n_test, test_parents, config.p_flip_test, test_rng);
  return {std::move(train), std::move(test), Dag(schema.size(), std::move(edges)), std::nullopt};
}

BenchPair gen_alloc_bench(std::uint64_t seed, const AllocBenchConfig& config) {
  const std::size_t d = config.strong + config.weak;
  if (d == 0 || config.n_train < 1 || config.n_test < 1) throw ParameterError("allocation benchmark needs features and rows");
  std::vector<Column> cols;
  for (std::size_t j = 1; j <= d; ++j) cols.push_back({"X" + std::to_string(j), 2});
  cols.push_back({"Y", 2});
  const Schema schema(std::move(cols), d);

  std::vector<double> p1(d), p0(d);
  std::map<std::size_t, double> weights;
  std::vector<Edge> edges;
  for (std::size_t j = 0; j < d; ++j) {
    const bool strong = j < config.strong;
    p1[j] = strong ? config.strong_p1 : config.weak_p1;
    p0[j] = strong ? config.strong_p0 : config.weak_p0;
    weights[j] = (p1[j] - p0[j]) * (p1[j] - p0[j]);
    edges.emplace_back(d, j);
  }
  auto sample = [&](std::size_t n, Rng rng) {
    CategoryMatrix rows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d + 1));
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const std::int32_t y = rng.uniform() < 0.5 ? 1 : 0;
      for (std::size_t j = 0; j < d; ++j) {
        rows(i, static_cast<Eigen::Index>(j)) = rng.uniform() < (y == 1 ? p1[j] : p0[j]) ? 1 : 0;
      }
      rows(i, static_cast<Eigen::Index>(d)) = y;
    }
    return DiscreteDataset(schema, std::move(rows));
  };
  return {sample(config.n_train, Rng::derive(seed, "alloc/train")), sample(config.n_test, Rng::derive(seed, "alloc/test")),
          Dag(d + 1, std::move(edges)), std::move(weights)};
}

std::size_t QuantileBins::bin_of(double value) const {
  return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
}

QuantileBins quantile_bin(std::span<const double> values, std::size_t k) {
  if (k < 1) throw ParameterError("quantile_bin: k must be >= 1");
  if (values.empty()) throw ParameterError("quantile_bin: no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  QuantileBins out;
  for (std::size_t i = 1; i < k; ++i) {
    const double cut = sorted[i * n / k];
    if (cut <= sorted.front()) continue;
    if (!out.cuts.empty() && cut <= out.cuts.back()) continue;
    out.cuts.push_back(cut);
  }
  out.bins.reserve(values.size());
  for (const double v : values) out.bins.push_back(out.bin_of(v));
  return out;
}

SplitIndices stratified_split(std::span<const std::int32_t> labels, double test_fraction, Rng& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ParameterError("test fraction must lie in (0, 1)");
  std::map<std::int32_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  const auto n_test = static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(labels.size()) - 1e-9));

  std::vector<std::size_t> quota;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (const auto& [label, members] : by_class) {
    const double exact = test_fraction * static_cast<double>(members.size());
    const auto base = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainders.emplace_back(exact - static_cast<double>(base), quota.size());
    quota.push_back(base);
    assigned += base;
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < n_test && r < remainders.size(); ++r, ++assigned) ++quota[remainders[r].second];

  SplitIndices out;
  std::size_t c = 0;
  for (auto& [label, members] : by_class) {
    for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng.uniform_index(i)]);
    out.test.insert(out.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]), members.end());
    ++c;
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

namespace {

const std::vector<std::string> kUciColumns{
    "age",          "workclass",    "fnlwgt", "education",    "education-num",  "marital-status", "occupation",
    "relationship", "race",         "sex",    "capital-gain", "capital-loss",   "hours-per-week", "native-country",
    "income"};
const std::vector<std::string> kAdultFeatures{"age",          "workclass", "education-num", "marital-status",
                                              "occupation",   "relationship", "race",       "sex",
                                              "capital-gain", "capital-loss", "hours-per-week"};
const std::set<std::string> kContinuous{"age", "education-num", "capital-gain", "capital-loss", "hours-per-week"};

struct RawTable {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> origin;
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_target_name(const std::string& name) {
  return name == "income" || name == "income>50k" || name == "class" || name == "salary" || name == "target";
}

void read_rows(const std::string& path, bool has_header, RawTable& table) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open Adult file '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '|') continue;
    auto fields = detail::split(body, ',');
    if (header_pending) {
      table.names.clear();
      for (const auto& f : fields) table.names.push_back(lower(f));
      header_pending = false;
      continue;
    }
    if (fields.size() != table.names.size()) {
      throw IngestionError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(table.names.size()) +
                           " fields, found " + std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.origin.push_back(path + ":" + std::to_string(line_no));
  }
}

bool looks_like_header(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '|') continue;
    return lower(detail::split(body, ',').front()) == "age";
  }
  return false;
}

std::int32_t parse_label(const std::string& raw, const std::string& origin) {
  std::string_view v = raw;
  if (!v.empty() && v.back() == '.') v.remove_suffix(1);
  if (v == ">50K") return 1;
  if (v == "<=50K") return 0;
  if (const auto x = detail::parse_number<int>(v); x && (*x == 0 || *x == 1)) return *x;
  throw IngestionError(origin + ": unrecognized income label '" + raw + "'");
}

}  // namespace

BenchPair load_adult(const std::string& path, std::uint64_t seed, const AdultOptions& options) {
  namespace fs = std::filesystem;
  RawTable raw;
  if (fs::is_directory(path)) {
    if (options.format == AdultFormat::Numeric) throw IngestionError("numeric Adult format expects a CSV file");
    const auto data = (fs::path(path) / "adult.data").string();
    const auto test = (fs::path(path) / "adult.test").string();
    if (!fs::exists(data)) throw IngestionError("no adult.data under '" + path + "'");
    raw.names = kUciColumns;
    read_rows(data, false, raw);
    if (fs::exists(test)) read_rows(test, false, raw);
  } else {
    if (!fs::exists(path)) throw IngestionError("Adult file '" + path + "' does not exist");
    const bool header = options.format == AdultFormat::Numeric ||
                        (options.format == AdultFormat::Auto && looks_like_header(path));
    if (!header) raw.names = kUciColumns;
    read_rows(path, header, raw);
  }
  if (raw.rows.empty()) throw IngestionError("Adult input '" + path + "' has no rows");

  auto find_column = [&](auto pred, const std::string& what) {
    for (std::size_t i = 0; i < raw.names.size(); ++i) {
      if (pred(raw.names[i])) return i;
    }
    throw IngestionError("Adult input is missing column '" + what + "'");
  };
  const auto target_col = find_column(is_target_name, "income");
  std::vector<std::size_t> feature_cols;
  for (const auto& name : kAdultFeatures) {
    feature_cols.push_back(find_column([&](const std::string& n) { return n == name; }, name));
  }

  const auto n = raw.rows.size();
  std::vector<std::int32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = parse_label(raw.rows[i][target_col], raw.origin[i]);
  auto split_rng = Rng::derive(seed, "adult/split");
  const auto split = stratified_split(labels, options.test_fraction, split_rng);

  const auto d = kAdultFeatures.size();
  CategoryMatrix cells(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d + 1));
  std::vector<Column> columns;
  for (std::size_t f = 0; f < d; ++f) {
    const auto& name = kAdultFeatures[f];
    const auto src = feature_cols[f];
    if (kContinuous.count(name)) {
      std::vector<double> values(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = detail::parse_number<double>(raw.rows[i][src]);
        if (!v) throw IngestionError(raw.origin[i] + ": non-numeric " + name + " '" + raw.rows[i][src] + "'");
        values[i] = *v;
      }
      std::vector<double> train_values;
      train_values.reserve(split.train.size());
      for (const auto i : split.train) train_values.push_back(values[i]);
      const auto bins = quantile_bin(train_values, options.bins);
      for (std::size_t i = 0; i < n; ++i) {
        cells(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = static_cast<std::int32_t>(bins.bin_of(values[i]));
      }
      columns.push_back({name, bins.bin_count()});
    } else {
      std::set<std::string> distinct;
      bool all_integer = true;
      for (std::size_t i = 0; i < n; ++i) {
        distinct.insert(raw.rows[i][src]);
        all_integer = all_integer && detail::parse_number<long long>(raw.rows[i][src]).has_value();
      }
      std::vector<std::string> order(distinct.begin(), distinct.end());
      if (all_integer) {
        std::sort(order.begin(), order.end(), [](const std::string& a, const std::string& b) {
          return *detail::parse_number<long long>(a) < *detail::parse_number<long long>(b);
        });
      }
      std::map<std::string, std::int32_t> code;
      for (std::size_t c = 0; c < order.size(); ++c) code[order[c]] = static_cast<std::int32_t>(c);
      for (std::size_t i = 0; i < n; ++i) {
        cells(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = code.at(raw.rows[i][src]);
      }
      columns.push_back({name, order.size()});
    }
  }
  for (std::size_t i = 0; i < n; ++i) cells(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = labels[i];
  columns.push_back({"income", 2});

  const DiscreteDataset all(Schema(std::move(columns), d), std::move(cells));
  return {all.select_rows(split.train), all.select_rows(split.test), std::nullopt, std::nullopt};
}

BenchPair make_benchmark(std::string_view name, std::uint64_t seed, const BenchOptions& options) {
  if (name == "scm-spurious" || name == "scm-marginal") {
    ScmConfig config = options.scm ? *options.scm : (name == "scm-spurious" ? ScmConfig::spurious(seed) : ScmConfig::marginal(seed));
    config.seed = seed;
    return gen_scm(config);
  }
  if (name == "alloc-wins") return gen_alloc_bench(seed, options.alloc);
  if (name == "adult") {
    if (!options.adult_path) throw IngestionError("the adult benchmark needs a dataset path");
    return load_adult(*options.adult_path, seed, options.adult);
  }
  throw ParameterError("unknown benchmark '" + std::string(name) + "'");
}

}  // namespace tasksynth
