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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qsearch/cutting.hpp"
#include "qsearch/data.hpp"
#include "qsearch/genome.hpp"
#include "qsearch/hqnn.hpp"
#include "qsearch/nsga2.hpp"

namespace qsearch::pipeline {

using json = nlohmann::json;

enum class CostMode { WallClock, GateCount };
enum class DatasetKind { Iris, Mnist, Fashion };

std::string to_string(CostMode m);
std::string to_string(DatasetKind d);
CostMode parse_cost_mode(const std::string& s);
DatasetKind parse_dataset(const std::string& s);

struct SearchConfig {
  DatasetKind dataset = DatasetKind::Iris;
  std::filesystem::path data_dir = "data";
  std::optional<std::size_t> subset_size;
  SearchSpace space = SearchSpace::iris();
  std::size_t pop_size = 12;
  int generations = 10;
  int epochs_per_eval = 5;
  double val_fraction = 0.2;
  std::size_t batch_size = 32;
  CostMode cost_mode = CostMode::WallClock;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "results";
  int workers = 1;
  int amplitude_hidden_width = 16;
  VariationParams variation;

  /// Reference defaults per dataset (search space, budget, epochs, split).
  static SearchConfig defaults_for(DatasetKind dataset);

  void validate() const;
  json to_json() const;
};

/// Applies flat `key = value` lines ('#' starts a comment) on top of `base`.
SearchConfig parse_config_text(const std::string& text, SearchConfig base);
SearchConfig load_config_file(const std::filesystem::path& path, SearchConfig base);
/// Applies one key/value override; throws ConfigError for unknown keys.
void apply_config_value(SearchConfig& config, const std::string& key, const std::string& value);

// Preprocessed splits, with model inputs precomputed for every qubit count
// and embedding family in the search space. Immutable after construction,
// so evaluators may share it across threads.
class PreparedData {
 public:
  static PreparedData load(const SearchConfig& config);
  /// Builds directly from in-memory splits (test split optional).
  static PreparedData from_splits(const SearchConfig& config, data::Dataset train, data::Dataset val,
                                  std::optional<data::Dataset> test = std::nullopt);

  struct Inputs {
    const data::Dataset* train = nullptr;
    const data::Dataset* val = nullptr;
    const data::Dataset* test = nullptr;  // may be null
  };

  Inputs inputs_for(const Genome& g) const;
  int n_classes() const { return n_classes_; }
  std::size_t train_size() const { return train_size_; }
  std::size_t val_size() const { return val_size_; }
  bool has_test() const { return has_test_; }

 private:
  struct Variant {
    data::Dataset train, val;
    std::optional<data::Dataset> test;
  };
  // key: (amplitude?, n)
  std::map<std::pair<bool, int>, Variant> variants_;
  int n_classes_ = 0;
  std::size_t train_size_ = 0, val_size_ = 0;
  bool has_test_ = false;
};

enum class EvalStatus { Ok, Diverged, Failed };
std::string to_string(EvalStatus s);

struct EvalRecord {
  std::int64_t eval_id = 0;
  int generation = 0;
  Genome genome;
  double val_acc = 0.0;
  double f1 = 1.0;
  double f2 = nsga2::kWorstCost;
  double f3 = 1.0;
  double t_val = 0.0;
  std::size_t n_val = 0;
  double gate_cost = 0.0;
  EvalStatus status = EvalStatus::Ok;
  std::string error;

  nsga2::ObjectiveVector objectives() const { return {f1, f2, f3}; }
};

json genome_to_json(const Genome& g);
Genome genome_from_json(const json& j);
/// Accepts a bare genome object or an evaluation record carrying one.
Genome load_genome_file(const std::filesystem::path& path);

json record_to_json(const EvalRecord& r);
EvalRecord record_from_json(const json& j);

/// Trains `g` for epochs_per_eval and scores (F1, F2, F3). The training
/// stream is seeded from (config.seed, eval_id).
EvalRecord evaluate_candidate(const Genome& g, const SearchConfig& config, const PreparedData& data,
                              std::int64_t eval_id, int generation = 0);

struct SearchOutcome {
  nsga2::SearchResult result;
  std::vector<EvalRecord> records;  // eval_id order
  std::filesystem::path output_dir;
};

/// Full search; writes evals/*.json, pareto.csv, summary.json, config.json.
SearchOutcome cmd_search(const SearchConfig& config);
SearchOutcome cmd_search(const SearchConfig& config, const PreparedData& data);

struct RetrainResult {
  hqnn::TrainReport report;
  double final_val_acc = 0.0;
  std::optional<double> test_acc;
  json to_json() const;
};

RetrainResult cmd_retrain(const Genome& g, int epochs, const SearchConfig& config, const PreparedData& data);
RetrainResult cmd_retrain(const Genome& g, int epochs, const SearchConfig& config);

struct CorrelationReport {
  int architectures = 0;
  int epochs = 0;
  std::vector<Genome> genomes;
  std::vector<std::vector<double>> val_acc;  // [architecture][epoch]
  std::vector<std::optional<double>> pearson;   // per checkpoint epoch, vs final
  std::vector<std::optional<double>> spearman;
  json to_json() const;
};

CorrelationReport correlate(const std::vector<std::vector<double>>& val_acc_by_arch);
CorrelationReport cmd_correlate(const SearchConfig& config, int k_architectures, int total_epochs,
                                const PreparedData& data);
CorrelationReport cmd_correlate(const SearchConfig& config, int k_architectures, int total_epochs);

json cut_plan_to_json(const cutting::CutPlan& plan);
json cmd_cut_plan(const Genome& g, int q_target);

/// Column order of pareto.csv and export-pareto.
inline constexpr const char* kParetoHeader = "eval_id,gen,embed,qubits,depth,cnot_modes,ranges,val_acc_pct,f2,f3";

/// Front-0 rows sorted by F1 ascending (ties by eval_id).
std::string pareto_csv(std::vector<EvalRecord> front);
/// Reads summary.json + evals/ from a search directory and renders pareto_csv.
std::string cmd_export_pareto(const std::filesystem::path& results_dir);

}  // namespace qsearch::pipeline
