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

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tasksynth/allocation.hpp"
#include "tasksynth/bench.hpp"
#include "tasksynth/eval.hpp"
#include "tasksynth/structure.hpp"

namespace tasksynth {

/// `key = value` lines grouped under `[section]` headers; keys before the
/// first header belong to section "". `#` and `;` start comments.
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in, const std::string& origin = "<config>");
  static ConfigFile load(const std::string& path);

  std::optional<std::string> get(std::string_view section, std::string_view key) const;
  const std::map<std::string, std::map<std::string, std::string>>& sections() const { return sections_; }

  /// Throws ParameterError naming the first key not in `allowed`.
  void require_keys_within(std::string_view section, const std::vector<std::string>& allowed) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// Comma-separated reals.
std::vector<double> parse_double_list(std::string_view text);
/// Comma-separated integers or inclusive ranges `a-b`.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);
std::vector<std::string> parse_name_list(std::string_view text);

Regime parse_regime(std::string_view text);
AllocationMode parse_allocation(std::string_view text);

/// A benchmark sweep: sections [run] and, for SCM benchmarks, [scm].
struct RunConfig {
  std::string benchmark;
  std::vector<std::string> methods;
  std::vector<double> epsilons{0.2, 0.5, 1.0, 2.0, 4.0};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::string output_dir = ".";
  MethodOptions method;
  /// Generator overrides and the Adult dataset path.
  BenchOptions bench;

  void validate() const;
};

/// Methods run when a config names none.
std::vector<std::string> default_methods(std::string_view benchmark);

/// Applies benchmark defaults (methods, correlation-oracle size) and then
/// every key present in the file.
RunConfig run_config_from(const ConfigFile& file);
RunConfig default_run_config(std::string_view benchmark);

/// Arbitrary-data synthesis, section [synth].
struct SynthConfig {
  std::string input;
  std::string target;
  double epsilon = 1.0;
  std::optional<double> delta;
  Regime regime = Regime::Causal;
  std::optional<std::string> dag;
  std::optional<std::size_t> k;
  AllocationMode allocation = AllocationMode::Optimal;
  std::size_t n_syn = 5000;
  std::uint64_t seed = 0;
  std::string output = "synthetic.csv";
  std::string ledger = "ledger.csv";
  std::optional<std::string> workload;
};

SynthConfig synth_config_from(const ConfigFile& file);

}  // namespace tasksynth
