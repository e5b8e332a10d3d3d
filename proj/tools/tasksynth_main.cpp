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

// tasksynth: benchmark sweeps, synthesis of arbitrary CSVs, ledger audits.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tasksynth/config.hpp"
#include "tasksynth/eval.hpp"
#include "tasksynth/pipeline.hpp"

namespace {

using namespace tasksynth;

struct BenchFlags {
  std::string config;
  std::string benchmark;
  std::optional<std::string> output_dir;
  std::optional<std::string> seeds;
  std::optional<std::string> epsilons;
  std::optional<std::string> methods;
  std::optional<std::size_t> n_syn;
  std::optional<std::size_t> k;
  std::optional<std::string> adult_path;
};

struct SynthFlags {
  std::string config;
  std::optional<std::string> input;
  std::optional<std::string> target;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<std::string> regime;
  std::optional<std::string> dag;
  std::optional<std::size_t> k;
  std::optional<std::string> allocation;
  std::optional<std::size_t> n_syn;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<std::string> ledger;
  std::optional<std::string> workload;
};

void write_figures(const RunConfig& config, const std::vector<AggregateReport>& aggregates) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  if (config.benchmark == "scm-spurious") {
    write_figure_csv((dir / "fig_scm_shift.csv").string(), aggregates, Metric::Auc);
  } else if (config.benchmark == "scm-marginal") {
    write_figure_csv((dir / "fig_scm_marginal.csv").string(), aggregates, Metric::Auc);
  } else if (config.benchmark == "alloc-wins") {
    write_figure_csv((dir / "fig_alloc_wins.csv").string(), aggregates, Metric::Auc);
  } else if (config.benchmark == "adult") {
    write_figure_csv((dir / "fig_adult.csv").string(), aggregates, Metric::Auc);
    write_figure_csv((dir / "fig_adult_fidelity.csv").string(), aggregates, Metric::OnewayL1);
  }
}

int cmd_bench(const BenchFlags& flags) {
  RunConfig config;
  if (!flags.config.empty()) {
    config = run_config_from(ConfigFile::load(flags.config));
  } else if (!flags.benchmark.empty()) {
    config = default_run_config(flags.benchmark);
  } else {
    throw ParameterError("bench needs --config or --benchmark");
  }
  if (flags.output_dir) config.output_dir = *flags.output_dir;
  if (flags.seeds) config.seeds = parse_seed_list(*flags.seeds);
  if (flags.epsilons) config.epsilons = parse_double_list(*flags.epsilons);
  if (flags.methods) config.methods = parse_name_list(*flags.methods);
  if (flags.n_syn) config.method.n_syn = *flags.n_syn;
  if (flags.k) config.method.k = *flags.k;
  if (flags.adult_path) config.bench.adult_path = *flags.adult_path;
  config.validate();

  std::filesystem::create_directories(config.output_dir);
  const auto runs = run_sweep([&](std::uint64_t seed) { return make_benchmark(config.benchmark, seed, config.bench); },
                              config.methods, config.epsilons, config.seeds, config.method);
  const std::filesystem::path dir(config.output_dir);
  write_runs_csv((dir / "runs.csv").string(), runs);
  if (config.seeds.size() >= 2) {
    const auto aggregates = aggregate_all(runs);
    write_aggregate_csv((dir / "aggregate.csv").string(), aggregates);
    write_figures(config, aggregates);
    for (const auto& a : aggregates) {
      std::printf("%-20s eps=%-4g auc=%.3f +- %.3f  l1=%.4f\n", a.method.c_str(), a.epsilon, a.auc.mean, a.auc.ci95,
                  a.oneway_l1.mean);
    }
  } else {
    std::cerr << "note: a single seed gives no confidence intervals; aggregate.csv not written\n";
  }
  return 0;
}

int cmd_synth(const SynthFlags& flags) {
  SynthConfig config = flags.config.empty() ? SynthConfig{} : synth_config_from(ConfigFile::load(flags.config));
  if (flags.input) config.input = *flags.input;
  if (flags.target) config.target = *flags.target;
  if (flags.epsilon) config.epsilon = *flags.epsilon;
  if (flags.delta) config.delta = *flags.delta;
  if (flags.regime) config.regime = parse_regime(*flags.regime);
  if (flags.dag) config.dag = *flags.dag;
  if (flags.k) config.k = *flags.k;
  if (flags.allocation) config.allocation = parse_allocation(*flags.allocation);
  if (flags.n_syn) config.n_syn = *flags.n_syn;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.output) config.output = *flags.output;
  if (flags.ledger) config.ledger = *flags.ledger;
  if (flags.workload) config.workload = *flags.workload;
  if (config.input.empty() || config.target.empty()) throw ParameterError("synth needs --input and --target");

  const auto data = read_dataset_csv(config.input, config.target);
  std::optional<Dag> dag;
  if (config.dag) dag = read_dag_file(*config.dag, data.schema());

  PipelineConfig pipeline;
  pipeline.epsilon = config.epsilon;
  pipeline.delta = config.delta;
  pipeline.regime = {config.regime, config.regime == Regime::Predictive ? config.k : std::nullopt};
  if (config.regime == Regime::Predictive && !config.k) throw ParameterError("the predictive regime needs --k");
  if (config.regime != Regime::Predictive && !dag) throw ParameterError("causal and graphical regimes need --dag");
  pipeline.mi_task_weights = config.regime == Regime::Predictive;
  pipeline.allocation = config.allocation;
  pipeline.n_syn = config.n_syn;

  Rng rng(config.seed);
  const auto result = synthesize(data, dag ? &*dag : nullptr, pipeline, rng);
  write_dataset_csv(config.output, result.synthetic);
  write_ledger_csv(config.ledger, result.ledger);
  if (config.workload) write_workload_csv(*config.workload, result.workload, data.schema());
  const auto total = result.ledger.total();
  std::printf("wrote %zu rows to %s; ledger total (%.17g, %.17g) in %s\n", result.synthetic.size(),
              config.output.c_str(), total.epsilon, total.delta, config.ledger.c_str());
  return 0;
}

int cmd_audit(const std::string& path) {
  const auto ledger = read_ledger_csv(path);
  std::printf("%-40s %22s %22s\n", "step", "epsilon", "delta");
  for (const auto& e : ledger.entries()) std::printf("%-40s %22.17g %22.17g\n", e.label.c_str(), e.epsilon, e.delta);
  const auto total = ledger.total();
  std::printf("%-40s %22.17g %22.17g\n", "total", total.epsilon, total.delta);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task-targeted differentially private synthetic data"};
  app.require_subcommand(1);

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "run a benchmark sweep and write report CSVs");
  bench_cmd->add_option("--config", bench.config, "run config file");
  bench_cmd->add_option("--benchmark", bench.benchmark, "scm-spurious | scm-marginal | alloc-wins | adult");
  bench_cmd->add_option("--output-dir", bench.output_dir);
  bench_cmd->add_option("--seeds", bench.seeds, "e.g. 0-9 or 1,2,5");
  bench_cmd->add_option("--epsilons", bench.epsilons, "comma-separated");
  bench_cmd->add_option("--methods", bench.methods, "comma-separated method names");
  bench_cmd->add_option("--n-syn", bench.n_syn);
  bench_cmd->add_option("--k", bench.k, "predictive subset size");
  bench_cmd->add_option("--adult-path", bench.adult_path);

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "synthesize a CSV and write its privacy ledger");
  synth_cmd->add_option("--config", synth.config, "synth config file");
  synth_cmd->add_option("--input", synth.input, "CSV of category indices with a header row");
  synth_cmd->add_option("--target", synth.target, "target column name");
  synth_cmd->add_option("--epsilon", synth.epsilon);
  synth_cmd->add_option("--delta", synth.delta, "defaults to 1/n^2");
  synth_cmd->add_option("--regime", synth.regime, "causal | graphical | predictive");
  synth_cmd->add_option("--dag", synth.dag, "edge list file");
  synth_cmd->add_option("--k", synth.k);
  synth_cmd->add_option("--allocation", synth.allocation, "optimal | uniform");
  synth_cmd->add_option("--n-syn", synth.n_syn);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--output", synth.output);
  synth_cmd->add_option("--ledger", synth.ledger);
  synth_cmd->add_option("--workload", synth.workload, "also dump the allocated workload");

  std::string ledger_path;
  auto* audit_cmd = app.add_subcommand("audit", "print the composition of a ledger file");
  audit_cmd->add_option("ledger", ledger_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (*bench_cmd) return cmd_bench(bench);
    if (*synth_cmd) return cmd_synth(synth);
    if (*audit_cmd) return cmd_audit(ledger_path);
  } catch (const ParameterError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
