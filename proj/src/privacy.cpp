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
#include "tasksynth/privacy.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "text_util.hpp"

namespace tasksynth {

void validate_budget(const PrivacySpec& budget) {
  if (!(budget.epsilon > 0.0) || !std::isfinite(budget.epsilon)) {
    throw ParameterError("epsilon must be positive and finite");
  }
  if (!(budget.delta >= 0.0 && budget.delta < 1.0)) {
    throw ParameterError("delta must lie in [0, 1)");
  }
}

PrivacySpec compose(std::span<const LedgerEntry> ledger) {
  PrivacySpec total;
  for (const auto& e : ledger) {
    if (e.epsilon < 0.0 || e.delta < 0.0) {
      throw ParameterError("ledger entry '" + e.label + "' is negative");
    }
    total.epsilon += e.epsilon;
    total.delta += e.delta;
  }
  return total;
}

void PrivacyLedger::record(std::string label, double epsilon, double delta) {
  if (!(epsilon >= 0.0) || !(delta >= 0.0)) {
    throw ParameterError("ledger entry '" + label + "' must be nonnegative");
  }
  entries_.push_back({std::move(label), epsilon, delta});
}

void PrivacyLedger::append(const PrivacyLedger& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

void write_ledger_csv(const std::string& path, const PrivacyLedger& ledger) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write ledger file '" + path + "'");
  out << "label,epsilon,delta\n";
  for (const auto& e : ledger.entries()) {
    out << e.label << ',' << detail::format_double(e.epsilon) << ','
        << detail::format_double(e.delta) << '\n';
  }
}

PrivacyLedger read_ledger_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open ledger file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "label,epsilon,delta") {
    throw IngestionError(path + ": missing 'label,epsilon,delta' header");
  }
  PrivacyLedger ledger;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    // labels may not contain commas; the last two fields are numeric
    const auto fields = detail::split(line, ',');
    const auto eps = fields.size() == 3 ? detail::parse_number<double>(fields[1]) : std::nullopt;
    const auto delta = fields.size() == 3 ? detail::parse_number<double>(fields[2]) : std::nullopt;
    if (!eps || !delta || *eps < 0.0 || *delta < 0.0) {
      throw IngestionError(path + ":" + std::to_string(line_no) + ": malformed ledger row '" +
                           line + "'");
    }
    ledger.record(fields[0], *eps, *delta);
  }
  return ledger;
}

double gaussian_sigma(double l2_sensitivity, double eps, double delta) {
  if (delta == 0.0) {
    throw UnsupportedError("the Gaussian mechanism requires delta > 0");
  }
  if (!(eps > 0.0)) throw ParameterError("gaussian_sigma: eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("gaussian_sigma: delta must be in (0, 1)");
  if (!(l2_sensitivity > 0.0)) throw ParameterError("gaussian_sigma: sensitivity must be positive");
  return l2_sensitivity * std::sqrt(2.0 * std::log(1.25 / delta)) / eps;
}

double marginal_sensitivity(std::size_t n) {
  if (n < 1) throw ParameterError("marginal_sensitivity: n must be >= 1");
  return std::sqrt(2.0) / static_cast<double>(n);
}

Vector add_gaussian_noise(const Vector& p, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw ParameterError("noise scale must be nonnegative");
  Vector out = p;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += sigma * rng.normal();
  return out;
}

MarginalTable gaussian_measure(const MarginalTable& marginal, double sigma, Rng& rng) {
  if (sigma == 0.0) return marginal;
  Vector noisy = project_simplex(add_gaussian_noise(marginal.probs(), sigma, rng));
  return MarginalTable(marginal.clique(), marginal.shape(), std::move(noisy));
}

Vector exponential_probabilities(std::span<const double> utilities, double eps, double sensitivity) {
  if (utilities.empty()) throw ParameterError("exponential mechanism over no candidates");
  if (!(eps >= 0.0)) throw ParameterError("exponential mechanism: eps must be nonnegative");
  if (!(sensitivity > 0.0)) throw ParameterError("exponential mechanism: sensitivity must be positive");
  const auto m = static_cast<Eigen::Index>(utilities.size());
  const auto best = std::max_element(utilities.begin(), utilities.end());
  Vector probs(m);
  if (std::isinf(eps)) {
    probs.setZero();
    probs[best - utilities.begin()] = 1.0;
    return probs;
  }
  const double scale = eps / (2.0 * sensitivity);
  for (Eigen::Index i = 0; i < m; ++i) {
    probs[i] = std::exp(scale * (utilities[static_cast<std::size_t>(i)] - *best));
  }
  return probs / probs.sum();
}

std::size_t exponential_select(std::span<const double> utilities, double eps, double sensitivity,
                               Rng& rng) {
  const Vector probs = exponential_probabilities(utilities, eps, sensitivity);
  return rng.categorical(std::span<const double>(probs.data(), static_cast<std::size_t>(probs.size())));
}

}  // namespace tasksynth
