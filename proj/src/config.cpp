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
#include "tasksynth/config.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "text_util.hpp"

namespace tasksynth {

ConfigFile ConfigFile::parse(std::istream& in, const std::string& origin) {
  ConfigFile file;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto where = origin + ":" + std::to_string(line_no);
    if (body.front() == '[') {
      if (body.back() != ']') throw ParameterError(where + ": unterminated section header");
      section = std::string(detail::trim(body.substr(1, body.size() - 2)));
      file.sections_[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParameterError(where + ": expected 'key = value'");
    const auto key = std::string(detail::trim(body.substr(0, eq)));
    if (key.empty()) throw ParameterError(where + ": empty key");
    if (!file.sections_[section].emplace(key, std::string(detail::trim(body.substr(eq + 1)))).second) {
      throw ParameterError(where + ": duplicate key '" + key + "'");
    }
  }
  return file;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file '" + path + "'");
  return parse(in, path);
}

std::optional<std::string> ConfigFile::get(std::string_view section, std::string_view key) const {
  const auto s = sections_.find(std::string(section));
  if (s == sections_.end()) return std::nullopt;
  const auto k = s->second.find(std::string(key));
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

void ConfigFile::require_keys_within(std::string_view section, const std::vector<std::string>& allowed) const {
  const auto s = sections_.find(std::string(section));
  if (s == sections_.end()) return;
  for (const auto& [key, value] : s->second) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParameterError("unknown key '" + key + "' in section [" + std::string(section) + "]");
    }
  }
}

namespace {

template <class T>
T parse_or_throw(std::string_view text, std::string_view what) {
  const auto v = detail::parse_number<T>(text);
  if (!v) throw ParameterError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  return *v;
}

}  // namespace

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& field : detail::split(text, ',')) out.push_back(parse_or_throw<double>(field, "number"));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (const auto& field : detail::split(text, ',')) {
    const auto dash = field.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(parse_or_throw<std::uint64_t>(field, "seed"));
      continue;
    }
    const auto lo = parse_or_throw<std::uint64_t>(std::string_view(field).substr(0, dash), "seed");
    const auto hi = parse_or_throw<std::uint64_t>(std::string_view(field).substr(dash + 1), "seed");
    if (hi < lo) throw ParameterError("empty seed range '" + field + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

std::vector<std::string> parse_name_list(std::string_view text) {
  auto out = detail::split(text, ',');
  if (std::any_of(out.begin(), out.end(), [](const std::string& s) { return s.empty(); })) {
    throw ParameterError("empty entry in list '" + std::string(text) + "'");
  }
  return out;
}

Regime parse_regime(std::string_view text) {
  if (text == "causal") return Regime::Causal;
  if (text == "graphical") return Regime::Graphical;
  if (text == "predictive") return Regime::Predictive;
  throw ParameterError("unknown regime '" + std::string(text) + "'");
}

AllocationMode parse_allocation(std::string_view text) {
  if (text == "optimal") return AllocationMode::Optimal;
  if (text == "uniform") return AllocationMode::Uniform;
  throw ParameterError("unknown allocation mode '" + std::string(text) + "'");
}

void RunConfig::validate() const {
  if (methods.empty() || epsilons.empty() || seeds.empty()) {
    throw ParameterError("run config needs nonempty methods, epsilons and seeds");
  }
  const auto& known = method_names();
  for (const auto& m : methods) {
    if (std::find(known.begin(), known.end(), m) == known.end()) throw ParameterError("unknown method '" + m + "'");
  }
  for (const auto e : epsilons) {
    if (!(e > 0.0)) throw ParameterError("epsilons must be positive");
  }
  if (benchmark == "adult" && !bench.adult_path) throw ParameterError("the adult benchmark needs dataset_path");
  if (method.n_syn < 1) throw ParameterError("n_syn must be >= 1");
}

std::vector<std::string> default_methods(std::string_view benchmark) {
  if (benchmark == "scm-spurious" || benchmark == "scm-marginal") {
    return {"causal-opt", "causal-unif", "graphical-opt", "graphical-unif", "all-features", "corr-topk", "independent"};
  }
  if (benchmark == "alloc-wins") return {"oracle-weights-opt", "oracle-weights-unif"};
  if (benchmark == "adult") return {"predictive-opt", "predictive-unif", "all-features", "independent"};
  throw ParameterError("unknown benchmark '" + std::string(benchmark) + "'");
}

RunConfig default_run_config(std::string_view benchmark) {
  RunConfig config;
  config.benchmark = std::string(benchmark);
  config.methods = default_methods(benchmark);
  config.method.corr_k = benchmark == "adult" ? 8 : 2;
  return config;
}

RunConfig run_config_from(const ConfigFile& file) {
  file.require_keys_within("run", {"benchmark", "methods", "epsilons", "seeds", "n_syn", "output_dir", "dataset_path",
                                    "k", "corr_k"});
  file.require_keys_within("scm", {"n_train", "n_test", "p_flip_train", "p_flip_test", "shift_kind",
                                    "shifted_parent_probs", "eta_variance"});
  const auto benchmark = file.get("run", "benchmark");
  if (!benchmark) throw ParameterError("config is missing [run] benchmark");
  auto config = default_run_config(*benchmark);
  if (auto v = file.get("run", "methods")) config.methods = parse_name_list(*v);
  if (auto v = file.get("run", "epsilons")) config.epsilons = parse_double_list(*v);
  if (auto v = file.get("run", "seeds")) config.seeds = parse_seed_list(*v);
  if (auto v = file.get("run", "n_syn")) config.method.n_syn = parse_or_throw<std::size_t>(*v, "n_syn");
  if (auto v = file.get("run", "output_dir")) config.output_dir = *v;
  if (auto v = file.get("run", "dataset_path")) config.bench.adult_path = *v;
  if (auto v = file.get("run", "k")) config.method.k = parse_or_throw<std::size_t>(*v, "k");
  if (auto v = file.get("run", "corr_k")) config.method.corr_k = parse_or_throw<std::size_t>(*v, "corr_k");

  if (file.sections().count("scm")) {
    ScmConfig scm = *benchmark == "scm-marginal" ? ScmConfig::marginal(0) : ScmConfig::spurious(0);
    if (auto v = file.get("scm", "n_train")) scm.n_train = parse_or_throw<std::size_t>(*v, "n_train");
    if (auto v = file.get("scm", "n_test")) scm.n_test = parse_or_throw<std::size_t>(*v, "n_test");
    if (auto v = file.get("scm", "p_flip_train")) scm.p_flip_train = parse_or_throw<double>(*v, "p_flip_train");
    if (auto v = file.get("scm", "p_flip_test")) scm.p_flip_test = parse_or_throw<double>(*v, "p_flip_test");
    if (auto v = file.get("scm", "shift_kind")) {
      if (*v == "spurious") {
        scm.shift_kind = ShiftKind::Spurious;
      } else if (*v == "marginal") {
        scm.shift_kind = ShiftKind::Marginal;
      } else {
        throw ParameterError("unknown shift_kind '" + *v + "'");
      }
    }
    if (auto v = file.get("scm", "shifted_parent_probs")) scm.shifted_parent_probs = parse_double_list(*v);
    if (auto v = file.get("scm", "eta_variance")) scm.eta_variance = parse_or_throw<double>(*v, "eta_variance");
    scm.validate();
    config.bench.scm = scm;
  }
  return config;
}

SynthConfig synth_config_from(const ConfigFile& file) {
  file.require_keys_within("synth", {"input", "target", "epsilon", "delta", "regime", "dag", "k", "allocation", "n_syn",
                                      "seed", "output", "ledger", "workload"});
  SynthConfig config;
  if (auto v = file.get("synth", "input")) config.input = *v;
  if (auto v = file.get("synth", "target")) config.target = *v;
  if (auto v = file.get("synth", "epsilon")) config.epsilon = parse_or_throw<double>(*v, "epsilon");
  if (auto v = file.get("synth", "delta")) config.delta = parse_or_throw<double>(*v, "delta");
  if (auto v = file.get("synth", "regime")) config.regime = parse_regime(*v);
  if (auto v = file.get("synth", "dag")) config.dag = *v;
  if (auto v = file.get("synth", "k")) config.k = parse_or_throw<std::size_t>(*v, "k");
  if (auto v = file.get("synth", "allocation")) config.allocation = parse_allocation(*v);
  if (auto v = file.get("synth", "n_syn")) config.n_syn = parse_or_throw<std::size_t>(*v, "n_syn");
  if (auto v = file.get("synth", "seed")) config.seed = parse_or_throw<std::uint64_t>(*v, "seed");
  if (auto v = file.get("synth", "output")) config.output = *v;
  if (auto v = file.get("synth", "ledger")) config.ledger = *v;
  if (auto v = file.get("synth", "workload")) config.workload = *v;
  return config;
}

}  // namespace tasksynth
