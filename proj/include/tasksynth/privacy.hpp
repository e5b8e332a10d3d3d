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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tasksynth/core.hpp"

namespace tasksynth {

/// An (epsilon, delta) pair. As a configured budget it must satisfy
/// epsilon > 0 and 0 <= delta < 1 (see validate_budget); composition totals
/// may be (0, 0).
struct PrivacySpec {
  double epsilon = 0.0;
  double delta = 0.0;
};

void validate_budget(const PrivacySpec& budget);

struct LedgerEntry {
  std::string label;
  double epsilon = 0.0;
  double delta = 0.0;
};

/// Basic sequential composition: totals are plain sums.
PrivacySpec compose(std::span<const LedgerEntry> ledger);

/// Append-only record of every privacy-consuming step of a run.
class PrivacyLedger {
 public:
  void record(std::string label, double epsilon, double delta);
  void append(const PrivacyLedger& other);

  const std::vector<LedgerEntry>& entries() const { return entries_; }
  PrivacySpec total() const { return compose(entries_); }

 private:
  std::vector<LedgerEntry> entries_;
};

/// CSV with header `label,epsilon,delta`.
void write_ledger_csv(const std::string& path, const PrivacyLedger& ledger);
PrivacyLedger read_ledger_csv(const std::string& path);

/// sigma = l2_sensitivity * sqrt(2 ln(1.25 / delta)) / eps.
/// delta == 0 raises UnsupportedError: pure-epsilon steps go through the
/// exponential mechanism instead.
double gaussian_sigma(double l2_sensitivity, double eps, double delta);

/// L2 sensitivity of a probability-vector marginal under replace-one
/// neighbours: one record moves 1/n of mass between two cells.
double marginal_sensitivity(std::size_t n);

/// p + N(0, sigma^2 I), without projection.
Vector add_gaussian_noise(const Vector& p, double sigma, Rng& rng);

/// Gaussian noise followed by project_simplex. sigma == 0 returns the input
/// unchanged.
MarginalTable gaussian_measure(const MarginalTable& marginal, double sigma, Rng& rng);

/// Euclidean projection onto the probability simplex (sort-based, exact).
template <class Derived>
vec_type<typename Derived::Scalar> project_simplex(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index k = v.size();
  if (k == 0) throw ParameterError("project_simplex: empty vector");
  vec_type<Scalar> sorted = v;
  std::sort(sorted.data(), sorted.data() + k, std::greater<Scalar>());
  Scalar cumsum(0);
  Scalar theta(0);
  for (Eigen::Index i = 0; i < k; ++i) {
    cumsum += sorted[i];
    const Scalar t = (cumsum - Scalar(1)) / static_cast<Scalar>(i + 1);
    if (sorted[i] - t > Scalar(0)) theta = t;
  }
  return (v.array() - theta).max(Scalar(0)).matrix();
}

/// Selection probabilities exp(eps * u_i / (2 sensitivity)), normalized with
/// the max subtracted first. eps = +inf puts all mass on the first maximizer.
Vector exponential_probabilities(std::span<const double> utilities, double eps, double sensitivity);

std::size_t exponential_select(std::span<const double> utilities, double eps, double sensitivity,
                               Rng& rng);

}  // namespace tasksynth
