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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "tasksynth/eval.hpp"
#include "test_support.hpp"

namespace tasksynth {
namespace {

double mean_of(const DiscreteDataset& d, std::size_t col) {
  return d.rows().col(static_cast<Eigen::Index>(col)).cast<double>().mean();
}

double agreement(const DiscreteDataset& d, std::size_t a, std::size_t b) {
  return (d.rows().col(static_cast<Eigen::Index>(a)).array() == d.rows().col(static_cast<Eigen::Index>(b)).array())
      .cast<double>()
      .mean();
}

TEST(ScmTest, ShapeAndDefaults) {
  const auto bench = gen_scm(ScmConfig::spurious(0));
  EXPECT_EQ(bench.train.size(), 5000u);
  EXPECT_EQ(bench.test.size(), 5000u);
  const auto& s = bench.train.schema();
  EXPECT_EQ(s.feature_indices().size(), 22u);
  EXPECT_EQ(s.column(0).name, "A");
  EXPECT_EQ(s.column(2).name, "S1");
  EXPECT_EQ(s.column(12).name, "N1");
  EXPECT_EQ(s.column(s.target_index()).name, "Y");
  EXPECT_EQ(s.target_index(), 22u);
  ASSERT_TRUE(bench.dag);
  EXPECT_EQ(bench.dag->edges().size(), 12u);
}

TEST(ScmTest, TargetBalanced) {
  auto cfg = ScmConfig::spurious(3);
  cfg.n_train = 100000;
  const auto bench = gen_scm(cfg);
  const double p = mean_of(bench.train, 22);
  EXPECT_NEAR(p, 0.5, 3 * std::sqrt(0.25 / 100000));
}

TEST(ScmTest, SpuriousChildAgreement) {
  auto cfg = ScmConfig::spurious(1);
  cfg.n_train = cfg.n_test = 50000;
  const auto bench = gen_scm(cfg);
  for (std::size_t j = 2; j < 12; ++j) {
    EXPECT_NEAR(agreement(bench.train, j, 22), 0.90, 0.01);
    EXPECT_NEAR(agreement(bench.test, j, 22), 0.50, 0.01);
  }
}

TEST(ScmTest, DeterministicWithIndependentPhases) {
  const auto a = gen_scm(ScmConfig::spurious(5));
  const auto b = gen_scm(ScmConfig::spurious(5));
  EXPECT_EQ(a.train.rows(), b.train.rows());
  EXPECT_EQ(a.test.rows(), b.test.rows());
  const auto c = gen_scm(ScmConfig::spurious(6));
  EXPECT_NE(a.train.rows(), c.train.rows());
  // Changing the test phase size leaves the training draws untouched.
  auto cfg = ScmConfig::spurious(5);
  cfg.n_test = 10;
  EXPECT_EQ(gen_scm(cfg).train.rows(), a.train.rows());
}

// P(Y = 1 | A, B) per parent cell.
Eigen::Matrix3d conditional_y(const DiscreteDataset& d) {
  Eigen::Matrix3d ones = Eigen::Matrix3d::Zero(), counts = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < d.size(); ++i) {
    counts(d(i, 0), d(i, 1)) += 1;
    ones(d(i, 0), d(i, 1)) += d(i, 22);
  }
  return ones.cwiseQuotient(counts);
}

TEST(ScmTest, MechanismPreservedUnderSpuriousShift) {
  // n = 10^6 per phase keeps a 0.01 tolerance above 4 standard errors in
  // every parent cell.
  auto cfg = ScmConfig::spurious(2);
  cfg.n_train = cfg.n_test = 1000000;
  const auto bench = gen_scm(cfg);
  EXPECT_LT((conditional_y(bench.train) - conditional_y(bench.test)).cwiseAbs().maxCoeff(), 0.01);
}

TEST(ScmTest, MarginalShift) {
  auto cfg = ScmConfig::marginal(4);
  cfg.n_train = cfg.n_test = 100000;
  const auto shifted = apply_marginal_shift(cfg);
  EXPECT_DOUBLE_EQ(shifted[0], 0.1);
  EXPECT_DOUBLE_EQ(shifted[2], 0.7);
  const auto bench = gen_scm(cfg);
  const auto train_a = compute_marginal(bench.train, Clique{0}).probs();
  const auto test_a = compute_marginal(bench.test, Clique{0}).probs();
  for (int v = 0; v < 3; ++v) EXPECT_NEAR(train_a[v], 1.0 / 3.0, 0.005);
  EXPECT_NEAR(test_a[0], 0.1, 0.005);
  EXPECT_NEAR(test_a[1], 0.2, 0.005);
  EXPECT_NEAR(test_a[2], 0.7, 0.005);
  for (std::size_t j = 2; j < 12; ++j) {
    EXPECT_NEAR(agreement(bench.train, j, 22), 0.85, 0.01);
    EXPECT_NEAR(agreement(bench.test, j, 22), 0.85, 0.01);
  }
  EXPECT_THROW(apply_marginal_shift(ScmConfig::spurious(0)), ParameterError);
}

// Parent cells have unequal test mass under a marginal shift, so each
// cell gets a two-sample z-test instead of a fixed tolerance.
TEST(ScmTest, MechanismPreservedUnderMarginalShift) {
  auto cfg = ScmConfig::marginal(7);
  cfg.n_train = cfg.n_test = 1000000;
  const auto bench = gen_scm(cfg);
  const auto ctr = conditional_y(bench.train), cte = conditional_y(bench.test);
  const double shifted[3] = {0.1, 0.2, 0.7};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const double p = ctr(a, b);
      const double n_tr = 1e6 / 9.0, n_te = 1e6 * shifted[a] * shifted[b];
      const double se = std::sqrt(p * (1 - p) * (1 / n_tr + 1 / n_te));
      EXPECT_LT(std::abs(ctr(a, b) - cte(a, b)), 4.5 * se) << a << "," << b;
    }
  }
}

TEST(ScmTest, ConfigValidation) {
  auto cfg = ScmConfig::spurious(0);
  cfg.p_flip_train = 1.5;
  EXPECT_THROW(gen_scm(cfg), ParameterError);
  cfg = ScmConfig::marginal(0);
  cfg.shifted_parent_probs = {0.5, 0.6, 0.1};
  EXPECT_THROW(gen_scm(cfg), ParameterError);
}

TEST(AllocBenchTest, ShapeAndWeights) {
  const auto bench = gen_alloc_bench(0);
  EXPECT_EQ(bench.train.size(), 400u);
  EXPECT_EQ(bench.test.size(), 2000u);
  EXPECT_EQ(bench.train.schema().feature_indices().size(), 20u);
  ASSERT_TRUE(bench.oracle_weights);
  std::vector<double> w;
  for (const auto& [j, v] : *bench.oracle_weights) w.push_back(v);
  ASSERT_EQ(w.size(), 20u);
  const double hi = *std::max_element(w.begin(), w.end());
  const double lo = *std::min_element(w.begin(), w.end());
  EXPECT_NEAR(hi, 0.64, 1e-12);
  EXPECT_NEAR(lo, 0.01, 1e-12);
  EXPECT_NEAR(hi / lo, 64.0, 1e-9);
  EXPECT_EQ(std::count_if(w.begin(), w.end(), [](double v) { return v > 0.1; }), 4);
}

TEST(AllocBenchTest, BayesOptimalAucAboveThreshold) {
  // Analytic posterior log-odds of each test row under the generator.
  AllocBenchConfig cfg;
  cfg.n_test = 20000;
  const auto bench = gen_alloc_bench(1, cfg);
  std::vector<double> scores;
  std::vector<std::int32_t> labels;
  for (std::size_t i = 0; i < bench.test.size(); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < 20; ++j) {
      const bool strong = bench.oracle_weights->at(j) > 0.1;
      const double p1 = strong ? cfg.strong_p1 : cfg.weak_p1;
      const double p0 = strong ? cfg.strong_p0 : cfg.weak_p0;
      s += bench.test(i, j) ? std::log(p1 / p0) : std::log((1 - p1) / (1 - p0));
    }
    scores.push_back(s);
    labels.push_back(bench.test(i, 20));
  }
  EXPECT_GT(roc_auc(scores, labels), 0.95);
}

TEST(AllocBenchTest, ConditionallyIndependentGivenY) {
  AllocBenchConfig cfg;
  cfg.n_train = 100000;
  const auto bench = gen_alloc_bench(2, cfg);
  for (std::size_t a = 0; a < 20; a += 3) {
    for (std::size_t b = a + 1; b < 20; b += 5) {
      const auto t = compute_marginal(bench.train, Clique{a, b, 20});
      EXPECT_LT(conditional_mutual_information(t, a, b, 20), 0.01);
    }
  }
}

TEST(QuantileBinTest, Quartiles) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  const auto q = quantile_bin(v, 4);
  EXPECT_EQ(q.bin_count(), 4u);
  std::vector<int> counts(4, 0);
  for (auto b : q.bins) ++counts[b];
  EXPECT_EQ(counts, (std::vector<int>{25, 25, 25, 25}));
}

TEST(QuantileBinTest, ConstantValuesOneBin) {
  const std::vector<double> v(50, 3.0);
  const auto q = quantile_bin(v, 8);
  EXPECT_EQ(q.bin_count(), 1u);
  for (auto b : q.bins) EXPECT_EQ(b, 0u);
}

TEST(QuantileBinTest, FewDistinctValuesNoEmptyBins) {
  std::vector<double> v;
  for (int i = 0; i < 300; ++i) v.push_back(i % 3);
  const auto q = quantile_bin(v, 8);
  EXPECT_EQ(q.bin_count(), 3u);
  std::vector<int> counts(q.bin_count(), 0);
  for (auto b : q.bins) ++counts[b];
  for (int c : counts) EXPECT_GT(c, 0);
}

TEST(QuantileBinTest, DistinctValuesBalanced) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 50 + rng.uniform_index(500);
    const std::size_t k = 2 + rng.uniform_index(9);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    const auto q = quantile_bin(v, k);
    ASSERT_EQ(q.bin_count(), k);
    std::vector<double> counts(k, 0);
    for (auto b : q.bins) ++counts[b];
    for (double c : counts) EXPECT_LE(std::abs(c - double(n) / k), 1.0);
    // Out-of-range values land in the outer bins.
    EXPECT_EQ(q.bin_of(-1e9), 0u);
    EXPECT_EQ(q.bin_of(1e9), k - 1);
  }
}

TEST(StratifiedSplitTest, CountsAndClassShares) {
  std::vector<std::int32_t> labels;
  for (int i = 0; i < 1000; ++i) labels.push_back(i < 237 ? 1 : 0);
  Rng rng(1);
  const auto split = stratified_split(labels, 0.2, rng);
  EXPECT_EQ(split.test.size(), 200u);
  EXPECT_EQ(split.train.size(), 800u);
  int pos = 0;
  for (auto i : split.test) pos += labels[i];
  EXPECT_LE(std::abs(pos - 47.4), 1.0);
  std::vector<std::size_t> all(split.train);
  all.insert(all.end(), split.test.begin(), split.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
}

const char* kMiniAdult[] = {
    "39, State-gov, 77516, Bachelors, 13, Never-married, Adm-clerical, Not-in-family, White, Male, 2174, 0, 40, "
    "United-States, <=50K",
    "50, Self-emp-not-inc, 83311, Bachelors, 13, Married-civ-spouse, Exec-managerial, Husband, White, Male, 0, 0, 13, "
    "United-States, <=50K",
    "38, Private, 215646, HS-grad, 9, Divorced, Handlers-cleaners, Not-in-family, White, Male, 0, 0, 40, "
    "United-States, <=50K",
    "53, Private, 234721, 11th, 7, Married-civ-spouse, Handlers-cleaners, Husband, Black, Male, 0, 0, 40, "
    "United-States, <=50K",
    "28, Private, 338409, Bachelors, 13, Married-civ-spouse, Prof-specialty, Wife, Black, Female, 0, 0, 40, Cuba, "
    "<=50K",
    "37, Private, 284582, Masters, 14, Married-civ-spouse, Exec-managerial, Wife, White, Female, 0, 0, 40, "
    "United-States, <=50K",
    "49, Private, 160187, 9th, 5, Married-spouse-absent, Other-service, Not-in-family, Black, Female, 0, 0, 16, "
    "Jamaica, <=50K",
    "52, Self-emp-not-inc, 209642, HS-grad, 9, Married-civ-spouse, Exec-managerial, Husband, White, Male, 0, 0, 45, "
    "United-States, >50K",
    "31, Private, 45781, Masters, 14, Never-married, Prof-specialty, Not-in-family, White, Female, 14084, 0, 50, "
    "United-States, >50K",
    "42, Private, 159449, Bachelors, 13, Married-civ-spouse, Exec-managerial, Husband, White, Male, 5178, 0, 40, "
    "United-States, >50K",
};

void write_mini_adult(const std::string& dir) {
  std::ofstream data(dir + "/adult.data");
  for (const char* line : kMiniAdult) data << line << "\n";
  std::ofstream test(dir + "/adult.test");
  test << "|1x3 Cross validator\n";
  for (const char* line : kMiniAdult) {
    std::string s(line);
    test << s << ".\n";
  }
}

TEST(AdultLoaderTest, MiniUciDirectory) {
  testing::TempDir dir("adult_mini");
  write_mini_adult(dir.path().string());
  const auto bench = load_adult(dir.path().string(), 0);
  EXPECT_EQ(bench.train.size() + bench.test.size(), 20u);
  EXPECT_EQ(bench.test.size(), 4u);
  const auto& s = bench.train.schema();
  EXPECT_EQ(s.feature_indices().size(), 11u);
  EXPECT_EQ(s.column(s.target_index()).name, "income");
  EXPECT_FALSE(s.index_of("fnlwgt"));
  EXPECT_FALSE(s.index_of("native-country"));
  EXPECT_FALSE(s.index_of("education"));
  EXPECT_TRUE(s.index_of("education-num"));
  for (const auto& c : s.columns()) EXPECT_LE(c.cardinality, 8u) << c.name;
  // Stratified: 6 of 20 rows are positive, so 1 or 2 positives in test.
  int pos = 0;
  for (std::size_t i = 0; i < bench.test.size(); ++i) pos += bench.test(i, s.target_index());
  EXPECT_GE(pos, 1);
  EXPECT_LE(pos, 2);
}

TEST(AdultLoaderTest, MalformedRowsNameTheLine) {
  testing::TempDir dir("adult_bad");
  {
    std::ofstream out(dir.file("adult.data"));
    out << kMiniAdult[0] << "\n" << "39, State-gov, 77516\n";
  }
  try {
    load_adult(dir.path().string(), 0);
    FAIL() << "expected IngestionError";
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  {
    std::ofstream out(dir.file("adult.data"));
    std::string bad(kMiniAdult[0]);
    bad.replace(bad.find("<=50K"), 5, "maybe");
    out << bad << "\n";
  }
  EXPECT_THROW(load_adult(dir.path().string(), 0), IngestionError);
  EXPECT_THROW(load_adult(dir.file("nope"), 0), IngestionError);
}

TEST(AdultLoaderTest, HeaderedCsv) {
  testing::TempDir dir("adult_csv");
  {
    std::ofstream out(dir.file("adult.csv"));
    out << "age,workclass,fnlwgt,education,education-num,marital-status,occupation,relationship,race,sex,"
           "capital-gain,capital-loss,hours-per-week,native-country,income\n";
    for (int rep = 0; rep < 2; ++rep)
      for (const char* line : kMiniAdult) out << line << "\n";
  }
  const auto bench = load_adult(dir.file("adult.csv"), 1);
  EXPECT_EQ(bench.train.size() + bench.test.size(), 20u);
  EXPECT_EQ(bench.train.schema().feature_indices().size(), 11u);
}

TEST(AdultLoaderTest, CanonicalFileShape) {
  const std::string path = TASKSYNTH_ADULT_PATH;
  if (path.empty() || !std::filesystem::exists(path)) GTEST_SKIP() << "Adult dataset not available";
  const auto bench = load_adult(path, 0);
  EXPECT_EQ(bench.train.size(), 39073u);
  EXPECT_EQ(bench.test.size(), 9769u);
  EXPECT_EQ(bench.train.schema().feature_indices().size(), 11u);
  // Bin edges come from the training split alone: re-binning the training
  // ages gives the same number of bins as the schema.
  const auto age = *bench.train.schema().index_of("age");
  EXPECT_LE(bench.train.schema().cardinality(age), 8u);
  const auto other = load_adult(path, 0);
  EXPECT_EQ(other.train.rows(), bench.train.rows());
}

TEST(MakeBenchmarkTest, NamesAndErrors) {
  EXPECT_EQ(make_benchmark("scm-marginal", 2).train.size(), 5000u);
  EXPECT_EQ(make_benchmark("alloc-wins", 2).train.size(), 400u);
  EXPECT_THROW(make_benchmark("nope", 0), ParameterError);
  EXPECT_THROW(make_benchmark("adult", 0), IngestionError);
}

}  // namespace
}  // namespace tasksynth
