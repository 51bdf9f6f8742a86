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

#include "qsearch/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "qsearch/errors.hpp"
#include "qsearch/stats.hpp"

namespace qsearch::pipeline {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    T out{};
    if constexpr (std::is_floating_point_v<T>) {
      out = static_cast<T>(std::stod(value, &used));
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
      out = static_cast<T>(std::stoull(value, &used));
    } else {
      out = static_cast<T>(std::stoll(value, &used));
    }
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw ConfigError("invalid value '" + value + "' for key '" + key + "'");
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

fs::path eval_path(const fs::path& dir, std::int64_t id) {
  char name[32];
  std::snprintf(name, sizeof name, "eval_%05lld.json", static_cast<long long>(id));
  return dir / "evals" / name;
}

fs::path first_existing(const fs::path& dir, const std::string& stem) {
  for (const auto& candidate : {dir / stem, dir / (stem + ".gz")}) {
    if (fs::exists(candidate)) return candidate;
  }
  return {};
}

const std::map<std::string, DatasetKind>& dataset_names() {
  static const std::map<std::string, DatasetKind> names{
      {"iris", DatasetKind::Iris}, {"mnist", DatasetKind::Mnist}, {"fashion", DatasetKind::Fashion}};
  return names;
}

}  // namespace

std::string to_string(CostMode m) { return m == CostMode::WallClock ? "wallclock" : "gatecount"; }

std::string to_string(DatasetKind d) {
  for (const auto& [name, kind] : dataset_names()) {
    if (kind == d) return name;
  }
  return "?";
}

CostMode parse_cost_mode(const std::string& s) {
  if (s == "wallclock") return CostMode::WallClock;
  if (s == "gatecount") return CostMode::GateCount;
  throw ConfigError("unknown cost mode '" + s + "'");
}

DatasetKind parse_dataset(const std::string& s) {
  auto it = dataset_names().find(s);
  if (it == dataset_names().end()) throw ConfigError("unknown dataset '" + s + "'");
  return it->second;
}

std::string to_string(EvalStatus s) {
  switch (s) {
    case EvalStatus::Ok: return "ok";
    case EvalStatus::Diverged: return "diverged";
    case EvalStatus::Failed: return "failed";
  }
  return "?";
}

SearchConfig SearchConfig::defaults_for(DatasetKind dataset) {
  SearchConfig c;
  c.dataset = dataset;
  if (dataset == DatasetKind::Iris) {
    c.space = SearchSpace::iris();
    c.generations = 10;
    c.epochs_per_eval = 5;
    c.val_fraction = 0.2;
    c.amplitude_hidden_width = 16;
    c.batch_size = 8;
  } else {
    c.space = SearchSpace::images();
    c.generations = 6;
    c.epochs_per_eval = 2;
    c.val_fraction = 0.1;
    c.amplitude_hidden_width = 0;
  }
  return c;
}

void SearchConfig::validate() const {
  space.validate();
  if (pop_size == 0 || pop_size % 2 != 0) throw ConfigError("pop must be positive and even");
  if (generations < 1) throw ConfigError("gens must be at least 1");
  if (epochs_per_eval < 1) throw ConfigError("epochs must be at least 1");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw ConfigError("val_fraction must lie in (0, 1)");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (amplitude_hidden_width < 0) throw ConfigError("hidden width must be non-negative");
  if (subset_size && *subset_size == 0) throw ConfigError("subset must be positive");
}

json SearchConfig::to_json() const {
  json j;
  j["dataset"] = pipeline::to_string(dataset);
  j["data_dir"] = data_dir.string();
  j["subset"] = subset_size ? json(*subset_size) : json(nullptr);
  std::vector<std::string> embeds, modes;
  for (auto e : space.embeddings) embeds.push_back(qsearch::to_string(e));
  for (auto m : space.cnot_modes) modes.push_back(qsearch::to_string(m));
  j["space"] = {{"embeddings", embeds}, {"n_min", space.n_min},       {"n_max", space.n_max},
                {"depth_min", space.depth_min}, {"depth_max", space.depth_max}, {"lr_min", space.lr_min},
                {"lr_max", space.lr_max},       {"cnot_modes", modes},     {"q_target", space.q_target}};
  j["pop"] = pop_size;
  j["gens"] = generations;
  j["epochs"] = epochs_per_eval;
  j["val_fraction"] = val_fraction;
  j["batch_size"] = batch_size;
  j["cost_mode"] = pipeline::to_string(cost_mode);
  j["seed"] = seed;
  j["out"] = output_dir.string();
  j["workers"] = workers;
  j["hidden"] = amplitude_hidden_width;
  j["variation"] = {{"eta_c", variation.eta_c},
                    {"eta_m", variation.eta_m},
                    {"crossover_prob", variation.crossover_prob},
                    {"mutation_prob", variation.mutation_prob ? json(*variation.mutation_prob) : json(nullptr)}};
  return j;
}

void apply_config_value(SearchConfig& c, const std::string& key, const std::string& value) {
  if (key == "dataset") {
    c.dataset = parse_dataset(value);
  } else if (key == "data_dir" || key == "data-dir") {
    c.data_dir = value;
  } else if (key == "subset") {
    c.subset_size = parse_number<std::size_t>(key, value);
  } else if (key == "pop") {
    c.pop_size = parse_number<std::size_t>(key, value);
  } else if (key == "gens") {
    c.generations = parse_number<int>(key, value);
  } else if (key == "epochs") {
    c.epochs_per_eval = parse_number<int>(key, value);
  } else if (key == "q_target" || key == "q-target") {
    c.space.q_target = parse_number<int>(key, value);
  } else if (key == "cost_mode" || key == "cost-mode") {
    c.cost_mode = parse_cost_mode(value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "out") {
    c.output_dir = value;
  } else if (key == "workers") {
    c.workers = parse_number<int>(key, value);
  } else if (key == "batch_size" || key == "batch-size") {
    c.batch_size = parse_number<std::size_t>(key, value);
  } else if (key == "val_fraction" || key == "val-fraction") {
    c.val_fraction = parse_number<double>(key, value);
  } else if (key == "hidden") {
    c.amplitude_hidden_width = parse_number<int>(key, value);
  } else if (key == "n_min") {
    c.space.n_min = parse_number<int>(key, value);
  } else if (key == "n_max") {
    c.space.n_max = parse_number<int>(key, value);
  } else if (key == "depth_min") {
    c.space.depth_min = parse_number<int>(key, value);
  } else if (key == "depth_max") {
    c.space.depth_max = parse_number<int>(key, value);
  } else if (key == "lr_min") {
    c.space.lr_min = parse_number<double>(key, value);
  } else if (key == "lr_max") {
    c.space.lr_max = parse_number<double>(key, value);
  } else if (key == "embeddings") {
    c.space.embeddings.clear();
    for (const auto& e : split_list(value)) c.space.embeddings.push_back(parse_embedding(e));
  } else if (key == "cnot_modes") {
    c.space.cnot_modes.clear();
    for (const auto& m : split_list(value)) c.space.cnot_modes.push_back(parse_cnot_mode(m));
  } else if (key == "eta_c") {
    c.variation.eta_c = parse_number<double>(key, value);
  } else if (key == "eta_m") {
    c.variation.eta_m = parse_number<double>(key, value);
  } else if (key == "crossover_prob") {
    c.variation.crossover_prob = parse_number<double>(key, value);
  } else if (key == "mutation_prob") {
    c.variation.mutation_prob = parse_number<double>(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

SearchConfig parse_config_text(const std::string& text, SearchConfig base) {
  std::stringstream ss(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(ss, line);) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + " lacks '='");
    apply_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

SearchConfig load_config_file(const fs::path& path, SearchConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

// ---------------------------------------------------------------------------

PreparedData PreparedData::load(const SearchConfig& config) {
  config.validate();
  data::Dataset full;
  std::optional<data::Dataset> test;
  if (config.dataset == DatasetKind::Iris) {
    full = data::load_iris_csv(config.data_dir / "iris.csv");
  } else {
    const fs::path dir = config.data_dir / (config.dataset == DatasetKind::Mnist ? "mnist" : "fashion");
    const auto images = first_existing(dir, "train-images-idx3-ubyte");
    const auto labels = first_existing(dir, "train-labels-idx1-ubyte");
    if (images.empty() || labels.empty()) throw IoError("IDX training files not found under " + dir.string());
    full = data::load_idx(images, labels);
    full.name = pipeline::to_string(config.dataset);
    const auto test_images = first_existing(dir, "t10k-images-idx3-ubyte");
    const auto test_labels = first_existing(dir, "t10k-labels-idx1-ubyte");
    if (!test_images.empty() && !test_labels.empty()) test = data::load_idx(test_images, test_labels);
  }
  if (config.subset_size && *config.subset_size < full.size()) {
    full = data::stratified_subset(full, *config.subset_size, Rng::derive_seed(config.seed, 0x5B5E7));
  }
  auto [train, val] = data::split(full, config.val_fraction, config.seed);
  return from_splits(config, std::move(train), std::move(val), std::move(test));
}

PreparedData PreparedData::from_splits(const SearchConfig& config, data::Dataset train, data::Dataset val,
                                       std::optional<data::Dataset> test) {
  PreparedData out;
  out.n_classes_ = std::max({train.n_classes, val.n_classes, test ? test->n_classes : 0});
  train.n_classes = val.n_classes = out.n_classes_;
  if (test) test->n_classes = out.n_classes_;
  out.train_size_ = train.size();
  out.val_size_ = val.size();
  out.has_test_ = test.has_value();

  // Statistics come from the training split only.
  const auto scaler = data::MinMaxScaler::fit(train);
  train = scaler.transform(train);
  val = scaler.transform(val);
  if (test) test = scaler.transform(*test);

  const auto& space = config.space;
  const bool use_pca = train.n_features > static_cast<std::size_t>(space.n_max);
  std::optional<data::PcaModel> pca;
  if (use_pca) pca = data::pca_fit(train, static_cast<std::size_t>(space.n_max));

  for (int n = space.n_min; n <= space.n_max; ++n) {
    Variant base;
    if (use_pca) {
      const auto p = pca->truncated(static_cast<std::size_t>(n));
      base.train = data::pca_transform(p, train);
      base.val = data::pca_transform(p, val);
      if (test) base.test = data::pca_transform(p, *test);
    } else {
      base.train = train;
      base.val = val;
      base.test = test;
    }
    const auto stats = data::Standardizer::fit(base.train);
    Variant angle{stats.transform(base.train), stats.transform(base.val), std::nullopt};
    if (base.test) angle.test = stats.transform(*base.test);
    // A learned amplitude pre-head sees the same standardized features as the
    // angle path; the identity path feeds raw features to the normalizer.
    if (config.amplitude_hidden_width > 0) {
      out.variants_.emplace(std::make_pair(true, n), angle);
    } else {
      out.variants_.emplace(std::make_pair(true, n), std::move(base));
    }
    out.variants_.emplace(std::make_pair(false, n), std::move(angle));
  }
  return out;
}

PreparedData::Inputs PreparedData::inputs_for(const Genome& g) const {
  auto it = variants_.find({g.embedding == Embedding::Amplitude, g.n});
  if (it == variants_.end()) throw ConfigError("no prepared inputs for a " + std::to_string(g.n) + "-qubit genome");
  const auto& v = it->second;
  return {&v.train, &v.val, v.test ? &*v.test : nullptr};
}

// ---------------------------------------------------------------------------

json genome_to_json(const Genome& g) {
  json layers = json::array();
  for (const auto& l : g.layers) layers.push_back({{"range", l.range}, {"mode", to_string(l.mode)}});
  return {{"embedding", qsearch::to_string(g.embedding)}, {"n", g.n}, {"depth", g.depth}, {"layers", layers}, {"lr", g.lr}};
}

Genome genome_from_json(const json& j) {
  try {
    Genome g;
    g.embedding = parse_embedding(j.at("embedding").get<std::string>());
    g.n = j.at("n").get<int>();
    g.depth = j.at("depth").get<int>();
    g.layers.clear();
    for (const auto& l : j.at("layers")) {
      g.layers.push_back({l.at("range").get<int>(), parse_cnot_mode(l.at("mode").get<std::string>())});
    }
    g.lr = j.value("lr", 1e-3);
    g.validate();
    return g;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed genome: ") + e.what());
  } catch (const StructuralError& e) {
    throw ConfigError(std::string("invalid genome: ") + e.what());
  }
}

Genome load_genome_file(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no such genome file: " + path.string());
  const json j = read_json(path);
  return genome_from_json(j.contains("genome") ? j.at("genome") : j);
}

json record_to_json(const EvalRecord& r) {
  json j{{"eval_id", r.eval_id}, {"generation", r.generation}, {"genome", genome_to_json(r.genome)},
         {"val_acc", r.val_acc}, {"f1", r.f1},       {"f2", r.f2},   {"f3", r.f3},
         {"t_val", r.t_val},     {"n_val", r.n_val}, {"gate_cost", r.gate_cost},
         {"status", to_string(r.status)}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

EvalRecord record_from_json(const json& j) {
  try {
    EvalRecord r;
    r.eval_id = j.at("eval_id").get<std::int64_t>();
    r.generation = j.at("generation").get<int>();
    r.genome = genome_from_json(j.at("genome"));
    r.val_acc = j.at("val_acc").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.f2 = j.at("f2").get<double>();
    r.f3 = j.at("f3").get<double>();
    r.t_val = j.at("t_val").get<double>();
    r.n_val = j.at("n_val").get<std::size_t>();
    r.gate_cost = j.at("gate_cost").get<double>();
    const auto status = j.at("status").get<std::string>();
    r.status = status == "ok" ? EvalStatus::Ok : (status == "diverged" ? EvalStatus::Diverged : EvalStatus::Failed);
    r.error = j.value("error", "");
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed evaluation record: ") + e.what());
  }
}

EvalRecord evaluate_candidate(const Genome& g, const SearchConfig& config, const PreparedData& data,
                              std::int64_t eval_id, int generation) {
  EvalRecord rec;
  rec.eval_id = eval_id;
  rec.generation = generation;
  rec.genome = g;
  try {
    rec.f3 = cutting::estimate_f3(g, config.space.q_target);
    const auto inputs = data.inputs_for(g);
    Rng rng(Rng::derive_seed(config.seed, static_cast<std::uint64_t>(eval_id)));
    hqnn::HqnnModel model(g, inputs.train->n_features, data.n_classes(),
                          hqnn::ModelOptions{config.amplitude_hidden_width}, rng);
    hqnn::TrainOptions opts;
    opts.epochs = config.epochs_per_eval;
    opts.lr = g.lr;
    opts.batch_size = config.batch_size;
    hqnn::train(model, *inputs.train, opts, rng);
    const auto result = hqnn::evaluate(model, *inputs.val);
    rec.val_acc = result.val_acc;
    rec.t_val = result.t_val;
    rec.n_val = result.n_val;
    rec.gate_cost = result.gate_cost;
    rec.f1 = 1.0 - result.val_acc;
    const double n_val = static_cast<double>(result.n_val);
    rec.f2 = config.cost_mode == CostMode::WallClock ? result.t_val / n_val : result.gate_cost / n_val;
  } catch (const NumericError& e) {
    rec.status = EvalStatus::Diverged;
    rec.error = e.what();
    rec.val_acc = 0.0;
    rec.f1 = 1.0;
    rec.f2 = nsga2::kWorstCost;
    rec.n_val = data.val_size();
  } catch (const std::exception& e) {
    rec.status = EvalStatus::Failed;
    rec.error = e.what();
    const auto worst = nsga2::worst_objectives();
    rec.val_acc = 0.0;
    rec.f1 = worst.f1;
    rec.f2 = worst.f2;
    rec.f3 = worst.f3;
    rec.n_val = data.val_size();
  }
  return rec;
}

// ---------------------------------------------------------------------------

namespace {

void prepare_output_dir(const SearchConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir / "evals", ec);
  if (ec) throw IoError("cannot create output directory " + config.output_dir.string() + ": " + ec.message());
  write_text(config.output_dir / "config.json", config.to_json().dump(2) + "\n");
}

json summarize(const SearchConfig& config, const SearchOutcome& outcome, double seconds) {
  std::vector<double> accs, f2s;
  double best = 0.0;
  std::int64_t best_id = -1;
  for (const auto& r : outcome.records) {
    if (r.status != EvalStatus::Ok) continue;
    accs.push_back(100.0 * r.val_acc);
    f2s.push_back(r.f2);
    if (best_id < 0 || r.val_acc > best) {
      best = r.val_acc;
      best_id = r.eval_id;
    }
  }
  const auto acc = stats::mean_std(accs);
  const auto f2 = stats::mean_std(f2s);
  std::vector<std::int64_t> pareto_ids;
  for (const auto& ind : outcome.result.pareto) pareto_ids.push_back(ind.eval_id);
  return {{"total_evaluations", outcome.result.offspring_evaluations},
          {"initial_evaluations", outcome.result.initial_evaluations},
          {"evaluations_including_initial", outcome.records.size()},
          {"generations", config.generations},
          {"epochs_per_eval", config.epochs_per_eval},
          {"q_target", config.space.q_target},
          {"cost_mode", to_string(config.cost_mode)},
          {"best_search_val_acc_pct", 100.0 * best},
          {"best_eval_id", best_id},
          {"mean_acc_pct", acc.mean},
          {"std_acc_pct", acc.stddev},
          {"mean_f2", f2.mean},
          {"total_search_time_h", seconds / 3600.0},
          {"pareto_eval_ids", pareto_ids}};
}

}  // namespace

SearchOutcome cmd_search(const SearchConfig& config) {
  config.validate();
  prepare_output_dir(config);
  const auto data = PreparedData::load(config);
  return cmd_search(config, data);
}

SearchOutcome cmd_search(const SearchConfig& config, const PreparedData& data) {
  config.validate();
  prepare_output_dir(config);
  const auto start = std::chrono::steady_clock::now();

  std::mutex mu;
  std::map<std::int64_t, EvalRecord> by_id;
  nsga2::SingleEvaluator single = [&](const nsga2::Candidate& c) {
    auto rec = evaluate_candidate(c.genome, config, data, c.eval_id, c.generation);
    nsga2::EvalOutcome outcome{rec.objectives(), rec.status != EvalStatus::Failed};
    std::lock_guard lock(mu);
    by_id[c.eval_id] = std::move(rec);
    return outcome;
  };

  SearchOutcome outcome;
  outcome.output_dir = config.output_dir;
  nsga2::SearchParams params;
  params.pop_size = config.pop_size;
  params.generations = config.generations;
  params.seed = config.seed;
  params.variation = config.variation;
  outcome.result = nsga2::run_search(config.space, nsga2::parallel_evaluator(single, config.workers), params);
  for (auto& [id, rec] : by_id) outcome.records.push_back(std::move(rec));

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& rec : outcome.records) {
    write_text(eval_path(config.output_dir, rec.eval_id), record_to_json(rec).dump(2) + "\n");
  }
  std::vector<EvalRecord> front;
  for (const auto& ind : outcome.result.pareto) front.push_back(outcome.records[static_cast<std::size_t>(ind.eval_id)]);
  write_text(config.output_dir / "pareto.csv", pareto_csv(front));
  write_text(config.output_dir / "summary.json", summarize(config, outcome, seconds).dump(2) + "\n");
  return outcome;
}

// ---------------------------------------------------------------------------

json RetrainResult::to_json() const {
  return {{"epochs", report.epochs},
          {"train_loss", report.train_loss},
          {"train_acc", report.train_acc},
          {"val_loss", report.val_loss},
          {"val_acc", report.val_acc},
          {"final_val_acc", final_val_acc},
          {"test_acc", test_acc ? json(*test_acc) : json(nullptr)}};
}

RetrainResult cmd_retrain(const Genome& g, int epochs, const SearchConfig& config, const PreparedData& data) {
  if (epochs < 1) throw ConfigError("retraining needs at least one epoch");
  g.validate();
  const auto inputs = data.inputs_for(g);
  Rng rng(Rng::derive_seed(config.seed, 0xE7A1));
  hqnn::HqnnModel model(g, inputs.train->n_features, data.n_classes(),
                        hqnn::ModelOptions{config.amplitude_hidden_width}, rng);
  hqnn::TrainOptions opts;
  opts.epochs = epochs;
  opts.lr = g.lr;
  opts.batch_size = config.batch_size;
  RetrainResult out;
  out.report = hqnn::train(model, *inputs.train, opts, rng, inputs.val);
  out.final_val_acc = out.report.val_acc.back();
  if (inputs.test != nullptr) out.test_acc = hqnn::evaluate(model, *inputs.test).val_acc;
  return out;
}

RetrainResult cmd_retrain(const Genome& g, int epochs, const SearchConfig& config) {
  if (epochs < 1) throw ConfigError("retraining needs at least one epoch");
  return cmd_retrain(g, epochs, config, PreparedData::load(config));
}

// ---------------------------------------------------------------------------

json CorrelationReport::to_json() const {
  json checkpoints = json::array();
  std::optional<int> first_strong;
  for (std::size_t e = 0; e < pearson.size(); ++e) {
    checkpoints.push_back({{"epoch", e + 1},
                           {"pearson", pearson[e] ? json(*pearson[e]) : json(nullptr)},
                           {"spearman", spearman[e] ? json(*spearman[e]) : json(nullptr)}});
    if (!first_strong && pearson[e] && spearman[e] && *pearson[e] > 0.9 && *spearman[e] > 0.9) {
      first_strong = static_cast<int>(e + 1);
    }
  }
  json archs = json::array();
  for (const auto& g : genomes) archs.push_back(genome_to_json(g));
  return {{"architectures", architectures},
          {"epochs", epochs},
          {"checkpoints", checkpoints},
          {"final_column_defined", !pearson.empty() && pearson.back().has_value()},
          {"threshold", 0.9},
          {"first_epoch_above_threshold", first_strong ? json(*first_strong) : json(nullptr)},
          {"val_acc", val_acc},
          {"genomes", archs}};
}

CorrelationReport correlate(const std::vector<std::vector<double>>& val_acc_by_arch) {
  CorrelationReport rep;
  rep.architectures = static_cast<int>(val_acc_by_arch.size());
  rep.val_acc = val_acc_by_arch;
  if (val_acc_by_arch.empty()) return rep;
  rep.epochs = static_cast<int>(val_acc_by_arch.front().size());
  std::vector<double> final_col;
  for (const auto& row : val_acc_by_arch) {
    if (row.size() != static_cast<std::size_t>(rep.epochs)) throw StructuralError("ragged accuracy matrix");
    final_col.push_back(row.back());
  }
  for (int e = 0; e < rep.epochs; ++e) {
    std::vector<double> col;
    for (const auto& row : val_acc_by_arch) col.push_back(row[static_cast<std::size_t>(e)]);
    rep.pearson.push_back(stats::pearson(col, final_col));
    rep.spearman.push_back(stats::spearman(col, final_col));
  }
  return rep;
}

CorrelationReport cmd_correlate(const SearchConfig& config, int k_architectures, int total_epochs,
                                const PreparedData& data) {
  if (k_architectures < 3) throw ConfigError("correlation study needs at least 3 architectures");
  if (total_epochs < 1) throw ConfigError("correlation study needs at least 1 epoch");
  Rng sampler(Rng::derive_seed(config.seed, 0xC022));
  std::vector<Genome> genomes;
  for (int i = 0; i < k_architectures; ++i) genomes.push_back(sample(config.space, sampler));

  std::vector<std::vector<double>> accs(genomes.size());
  auto train_one = [&](std::size_t i) {
    const auto inputs = data.inputs_for(genomes[i]);
    Rng rng(Rng::derive_seed(config.seed, 0xC0220000ULL + i));
    hqnn::HqnnModel model(genomes[i], inputs.train->n_features, data.n_classes(),
                          hqnn::ModelOptions{config.amplitude_hidden_width}, rng);
    hqnn::TrainOptions opts;
    opts.epochs = total_epochs;
    opts.lr = genomes[i].lr;
    opts.batch_size = config.batch_size;
    try {
      accs[i] = hqnn::train(model, *inputs.train, opts, rng, inputs.val).val_acc;
    } catch (const NumericError&) {
      accs[i].assign(static_cast<std::size_t>(total_epochs), 0.0);
    }
  };
  auto batch = nsga2::parallel_evaluator(
      [&](const nsga2::Candidate& c) {
        train_one(static_cast<std::size_t>(c.eval_id));
        return nsga2::EvalOutcome{};
      },
      config.workers);
  std::vector<nsga2::Candidate> jobs;
  for (std::size_t i = 0; i < genomes.size(); ++i) jobs.push_back({static_cast<std::int64_t>(i), 0, genomes[i]});
  batch(jobs);

  auto rep = correlate(accs);
  rep.genomes = genomes;
  return rep;
}

CorrelationReport cmd_correlate(const SearchConfig& config, int k_architectures, int total_epochs) {
  if (k_architectures < 3) throw ConfigError("correlation study needs at least 3 architectures");
  return cmd_correlate(config, k_architectures, total_epochs, PreparedData::load(config));
}

// ---------------------------------------------------------------------------

json cut_plan_to_json(const cutting::CutPlan& plan) {
  json subs = json::array();
  for (std::size_t i = 0; i < plan.subcircuits.size(); ++i) {
    const auto& sc = plan.subcircuits[i];
    json gates = json::array();
    for (const auto& g : sc.gates) {
      json gj{{"kind", cutting::to_string(g.kind)}, {"layer", g.layer}, {"target", g.target}};
      if (g.control >= 0) gj["control"] = g.control;
      if (g.param_index >= 0) gj["param"] = g.param_index;
      gates.push_back(std::move(gj));
    }
    subs.push_back({{"index", i + 1},
                    {"qubits", sc.qubits},
                    {"role", cutting::to_string(sc.role)},
                    {"layer", sc.layer},
                    {"gates", gates},
                    {"cut_in", sc.cut_in},
                    {"cut_out", sc.cut_out}});
  }
  json multiplier = nullptr;
  if (plan.num_cuts <= 30) multiplier = cutting::execution_overhead(plan.num_cuts);
  return {{"q_target", plan.q_target},         {"groups", plan.groups}, {"subcircuits", subs},
          {"num_cuts", plan.num_cuts},         {"f3", plan.f3},         {"execution_multiplier", multiplier},
          {"execution_multiplier_log4", plan.num_cuts}};
}

json cmd_cut_plan(const Genome& g, int q_target) {
  json j = cut_plan_to_json(cutting::emit_cut_plan(g, q_target));
  j["genome"] = genome_to_json(g);
  j["estimate_f3"] = cutting::estimate_f3(g, q_target);
  return j;
}

// ---------------------------------------------------------------------------

std::string pareto_csv(std::vector<EvalRecord> front) {
  std::sort(front.begin(), front.end(), [](const EvalRecord& a, const EvalRecord& b) {
    if (a.f1 != b.f1) return a.f1 < b.f1;
    return a.eval_id < b.eval_id;
  });
  std::string out = std::string(kParetoHeader) + "\n";
  for (const auto& r : front) {
    out += std::to_string(r.eval_id) + "," + std::to_string(r.generation) + "," + qsearch::to_string(r.genome.embedding) + "," +
           std::to_string(r.genome.n) + "," + std::to_string(r.genome.depth) + "," + r.genome.modes_string() + "," +
           r.genome.ranges_string() + "," + format("%.2f", 100.0 * r.val_acc) + "," + format("%.6g", r.f2) + "," +
           format("%.0f", r.f3) + "\n";
  }
  return out;
}

std::string cmd_export_pareto(const fs::path& results_dir) {
  if (!fs::is_directory(results_dir)) throw IoError("no such results directory: " + results_dir.string());
  const auto summary = read_json(results_dir / "summary.json");
  std::vector<EvalRecord> front;
  for (const auto& id : summary.at("pareto_eval_ids")) {
    front.push_back(record_from_json(read_json(eval_path(results_dir, id.get<std::int64_t>()))));
  }
  return pareto_csv(std::move(front));
}

}  // namespace qsearch::pipeline
