// Copyright 2026 The qsearch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qsearch command-line front end.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qsearch/errors.hpp"
#include "qsearch/pipeline.hpp"

namespace pl = qsearch::pipeline;

namespace {

struct Flags {
  std::string config_file;
  std::string dataset;
  std::string data_dir;
  std::size_t subset = 0;
  std::size_t pop = 0;
  int gens = 0;
  int epochs = 0;
  int q_target = 0;
  std::string cost_mode;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  int workers = 0;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_file, "key=value config file");
  cmd->add_option("--dataset", f.dataset, "iris, mnist or fashion")
      ->check(CLI::IsMember({"iris", "mnist", "fashion"}));
  cmd->add_option("--data-dir", f.data_dir, "dataset root directory");
  cmd->add_option("--subset", f.subset, "stratified training subset size");
  cmd->add_option("--pop", f.pop, "population size");
  cmd->add_option("--gens", f.gens, "offspring generations");
  cmd->add_option("--epochs", f.epochs, "training epochs");
  cmd->add_option("--q-target", f.q_target, "device qubit capacity");
  cmd->add_option("--cost-mode", f.cost_mode, "wallclock or gatecount")
      ->check(CLI::IsMember({"wallclock", "gatecount"}));
  cmd->add_option("--seed", f.seed, "master seed")->each([&f](const std::string&) { f.seed_set = true; });
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--workers", f.workers, "parallel evaluation workers");
}

// Precedence: built-in defaults for the dataset, then the config file, then flags.
pl::SearchConfig resolve(const Flags& f) {
  std::string dataset_name = f.dataset;
  std::string file_text;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw qsearch::ConfigError("cannot read config file " + f.config_file);
    std::stringstream ss;
    ss << in.rdbuf();
    file_text = ss.str();
    if (dataset_name.empty()) {
      const auto probe = pl::parse_config_text(file_text, pl::SearchConfig{});
      dataset_name = pl::to_string(probe.dataset);
    }
  }
  const auto kind = dataset_name.empty() ? pl::DatasetKind::Iris : pl::parse_dataset(dataset_name);
  auto c = pl::parse_config_text(file_text, pl::SearchConfig::defaults_for(kind));
  c.dataset = kind;
  if (!f.data_dir.empty()) c.data_dir = f.data_dir;
  if (f.subset > 0) c.subset_size = f.subset;
  if (f.pop > 0) c.pop_size = f.pop;
  if (f.gens > 0) c.generations = f.gens;
  if (f.epochs > 0) c.epochs_per_eval = f.epochs;
  if (f.q_target > 0) c.space.q_target = f.q_target;
  if (!f.cost_mode.empty()) c.cost_mode = pl::parse_cost_mode(f.cost_mode);
  if (f.seed_set) c.seed = f.seed;
  if (!f.out.empty()) c.output_dir = f.out;
  if (f.workers > 0) c.workers = f.workers;
  c.validate();
  return c;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw qsearch::IoError("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective architecture search for hybrid quantum-classical classifiers"};
  app.require_subcommand(1);
  Flags flags;

  auto* search = app.add_subcommand("search", "run the evolutionary search");
  add_common(search, flags);

  auto* retrain = app.add_subcommand("retrain", "retrain one genome and report validation/test accuracy");
  add_common(retrain, flags);
  std::string genome_path;
  retrain->add_option("--genome", genome_path, "genome or evaluation record JSON")->required();

  auto* corr = app.add_subcommand("correlate", "low-fidelity proxy correlation study");
  add_common(corr, flags);
  int k_arch = 50;
  corr->add_option("--architectures", k_arch, "number of random genomes");

  auto* cut = app.add_subcommand("cut-plan", "emit the wire-cut plan for a genome");
  cut->add_option("--genome", genome_path, "genome JSON")->required();
  cut->add_option("--q-target", flags.q_target, "device qubit capacity")->required();
  cut->add_option("--out", flags.out, "write JSON here instead of stdout");

  auto* exp = app.add_subcommand("export-pareto", "rebuild pareto.csv from a results directory");
  std::string results_dir;
  exp->add_option("results", results_dir, "search output directory")->required();
  exp->add_option("--out", flags.out, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (search->parsed()) {
      const auto config = resolve(flags);
      const auto outcome = pl::cmd_search(config);
      std::cout << "evaluations: " << outcome.result.initial_evaluations << " initial + "
                << outcome.result.offspring_evaluations << " offspring\n"
                << "pareto front: " << outcome.result.pareto.size() << " members\n"
                << "results: " << outcome.output_dir.string() << "\n";
    } else if (retrain->parsed()) {
      auto config = resolve(flags);
      const auto g = pl::load_genome_file(genome_path);
      const int epochs = flags.epochs > 0 ? flags.epochs : 20;
      const auto result = pl::cmd_retrain(g, epochs, config);
      std::cout << result.to_json().dump(2) << "\n";
    } else if (corr->parsed()) {
      const auto config = resolve(flags);
      const int epochs = flags.epochs > 0 ? flags.epochs : 20;
      const auto report = pl::cmd_correlate(config, k_arch, epochs);
      emit(report.to_json().dump(2) + "\n", flags.out.empty() ? "" : flags.out);
    } else if (cut->parsed()) {
      const auto g = pl::load_genome_file(genome_path);
      emit(pl::cmd_cut_plan(g, flags.q_target).dump(2) + "\n", flags.out);
    } else if (exp->parsed()) {
      emit(pl::cmd_export_pareto(results_dir), flags.out);
    }
  } catch (const qsearch::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qsearch::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const qsearch::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
