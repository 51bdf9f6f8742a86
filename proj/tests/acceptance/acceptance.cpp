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

// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qsearch/cutting.hpp"
#include "qsearch/hqnn.hpp"
#include "qsearch/nsga2.hpp"
#include "qsearch/pipeline.hpp"
#include "qsearch/qsim.hpp"
#include "qsearch/stats.hpp"

using namespace qsearch;
namespace fs = std::filesystem;
namespace pl = qsearch::pipeline;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Genome make(Embedding e, int n, std::vector<LayerGene> layers, double lr) {
  Genome g;
  g.embedding = e;
  g.n = n;
  g.depth = static_cast<int>(layers.size());
  g.layers = std::move(layers);
  g.lr = lr;
  return g;
}

Verdict gradients() {
  Rng rng(101);
  double worst_ps = 0, worst_fd = 0;
  for (int model = 0; model < 200; ++model) {
    auto g = oracle::random_genome(rng, 2, 6, 3);
    g.embedding = static_cast<Embedding>(model % 4);
    const auto c = hqnn::build_circuit(g);
    const auto params = oracle::random_vector(rng, static_cast<std::size_t>(c.n_params), -kPi, kPi);
    const auto input = oracle::random_vector(rng, c.input_width(), -2.0, 2.0);
    const auto up = oracle::random_vector(rng, static_cast<std::size_t>(c.n_qubits), -1.0, 1.0);
    const auto adj = qsim::grad_adjoint(c, params, input, up);
    std::vector<int> wrt(static_cast<std::size_t>(c.n_params));
    for (int k = 0; k < c.n_params; ++k) wrt[k] = k;
    const auto ps = qsim::grad_parameter_shift(c, params, input, wrt, up);
    auto f = [&](const std::vector<double>& p) {
      const auto z = qsim::expectations(c, p, input);
      double s = 0;
      for (std::size_t i = 0; i < z.size(); ++i) s += up[i] * z[i];
      return s;
    };
    for (int k = 0; k < c.n_params; ++k) {
      worst_ps = std::max(worst_ps, std::abs(adj.params[k] - ps[k]));
      const double fd = oracle::central_difference(f, params, static_cast<std::size_t>(k));
      worst_fd = std::max(worst_fd, std::abs(adj.params[k] - fd) / std::max({1.0, std::abs(fd), std::abs(adj.params[k])}));
    }
  }
  return {worst_ps <= 1e-9 && worst_fd <= 1e-5,
          "max |adjoint - shift| = " + fmt("%.2e", worst_ps) + ", max rel |adjoint - fd| = " + fmt("%.2e", worst_fd)};
}

Verdict simulator() {
  Rng rng(202);
  auto s = qsim::new_zero_state(6);
  double worst_norm = 0;
  for (int i = 0; i < 10000; ++i) {
    if (rng.bernoulli(0.3)) {
      const int c = rng.range(0, 5);
      int t = rng.range(0, 4);
      if (t >= c) ++t;
      qsim::apply_cnot(s, c, t);
    } else {
      qsim::apply_rotation(s, static_cast<qsim::Axis>(rng.below(3)), rng.range(0, 5), rng.uniform(-kPi, kPi));
    }
    worst_norm = std::max(worst_norm, std::abs(s.norm_squared() - 1.0));
  }
  double worst_cos = 0;
  for (int i = 0; i < 1000; ++i) {
    const double theta = -2 * kPi + 4 * kPi * i / 999.0;
    for (auto ax : {qsim::Axis::X, qsim::Axis::Y}) {
      auto one = qsim::new_zero_state(1);
      qsim::apply_rotation(one, ax, 0, theta);
      worst_cos = std::max(worst_cos, std::abs(qsim::expect_z_all(one)[0] - std::cos(theta)));
    }
  }
  return {worst_norm <= 1e-10 && worst_cos <= 1e-12,
          "norm drift " + fmt("%.2e", worst_norm) + ", cos law error " + fmt("%.2e", worst_cos)};
}

Verdict nsga2_oracle() {
  Rng rng(303);
  int sort_mismatch = 0, boundary_bad = 0, selection_bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto size = static_cast<std::size_t>(rng.range(1, 64));
    const int levels = trial % 3 == 0 ? 3 : 1000;
    std::vector<nsga2::ObjectiveVector> pts(size);
    for (auto& p : pts) {
      p = {static_cast<double>(rng.below(levels)), static_cast<double>(rng.below(levels)),
           static_cast<double>(rng.below(levels))};
    }
    const auto fronts = nsga2::fast_non_dominated_sort(pts);
    const auto want = oracle::brute_force_fronts(pts);
    bool same = fronts.size() == want.size();
    for (std::size_t k = 0; same && k < fronts.size(); ++k) {
      same = std::set<std::size_t>(fronts[k].begin(), fronts[k].end()) == want[k];
    }
    sort_mismatch += !same;

    for (const auto& front : fronts) {
      std::vector<nsga2::ObjectiveVector> fv;
      for (auto i : front) fv.push_back(pts[i]);
      const auto d = nsga2::crowding_distance(fv);
      for (std::size_t m = 0; m < 3; ++m) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& p : fv) lo = std::min(lo, p[m]), hi = std::max(hi, p[m]);
        // Some member attaining each extreme must be marked as a boundary.
        bool lo_inf = false, hi_inf = false;
        for (std::size_t i = 0; i < fv.size(); ++i) {
          if (fv[i][m] == lo && std::isinf(d[i])) lo_inf = true;
          if (fv[i][m] == hi && std::isinf(d[i])) hi_inf = true;
        }
        boundary_bad += !(lo_inf && hi_inf);
      }
    }

    std::vector<nsga2::Individual> pool(size);
    for (std::size_t i = 0; i < size; ++i) pool[i].objectives = pts[i], pool[i].eval_id = static_cast<std::int64_t>(i);
    const auto target = static_cast<std::size_t>(rng.range(1, static_cast<int>(size)));
    const auto kept = nsga2::environmental_select(pool, target);
    std::set<std::int64_t> kept_ids;
    bool admitted_lower = false;
    for (const auto& k : kept) {
      kept_ids.insert(k.eval_id);
      admitted_lower |= want[0].count(static_cast<std::size_t>(k.eval_id)) == 0;
    }
    bool dropped_front0 = false;
    for (auto i : want[0]) dropped_front0 |= kept_ids.count(static_cast<std::int64_t>(i)) == 0;
    selection_bad += kept.size() != target || (dropped_front0 && admitted_lower);
  }
  return {sort_mismatch == 0 && boundary_bad == 0 && selection_bad == 0,
          std::to_string(sort_mismatch) + " sort mismatches, " + std::to_string(boundary_bad) +
              " boundary violations, " + std::to_string(selection_bad) + " selection violations over 1000 populations"};
}

Verdict pairs() {
  using P = std::vector<hqnn::Pair>;
  const std::vector<std::pair<P, P>> cases{
      {hqnn::entangling_pairs(6, 1, CnotMode::All), {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}}},
      {hqnn::entangling_pairs(6, 2, CnotMode::All), {{0, 2}, {1, 3}, {2, 4}, {3, 5}, {4, 0}, {5, 1}}},
      {hqnn::entangling_pairs(6, 3, CnotMode::All), {{0, 3}, {1, 4}, {2, 5}, {3, 0}, {4, 1}, {5, 2}}},
      {hqnn::entangling_pairs(6, 4, CnotMode::All), {{0, 4}, {1, 5}, {2, 0}, {3, 1}, {4, 2}, {5, 3}}},
      {hqnn::entangling_pairs(4, 1, CnotMode::All), {{0, 1}, {1, 2}, {2, 3}, {3, 0}}},
      {hqnn::entangling_pairs(4, 1, CnotMode::Odd), {{1, 2}, {3, 0}}},
      {hqnn::entangling_pairs(4, 1, CnotMode::Even), {{0, 1}, {2, 3}}},
      {hqnn::entangling_pairs(4, 1, CnotMode::None), {}},
  };
  int ok = 0;
  for (const auto& [got, want] : cases) ok += got == want;
  return {ok == static_cast<int>(cases.size()), std::to_string(ok) + "/" + std::to_string(cases.size()) + " goldens match"};
}

Verdict cutting_checks() {
  Rng rng(505);
  int fits_bad = 0, monotone_bad = 0;
  for (int i = 0; i < 10000; ++i) {
    auto g = oracle::random_genome(rng, 2, 12, 4);
    const int q = rng.range(2, 12);
    if (g.n <= q && cutting::estimate_f3(g, q) != 1) ++fits_bad;
    const int before = cutting::estimate_f3(g, q);
    g.layers.push_back({rng.range(1, g.n - 1), static_cast<CnotMode>(rng.below(4))});
    ++g.depth;
    if (cutting::estimate_f3(g, q) < before) ++monotone_bad;
  }
  const auto g12 = make(Embedding::AngleY, 8, {{4, CnotMode::None}, {4, CnotMode::Odd}}, 1e-3);
  const auto plan = cutting::emit_cut_plan(g12, 4);
  const bool cross_ok = plan.subcircuits.size() == 5 &&
                        plan.subcircuits.back().role == cutting::SubcircuitRole::CrossEntangleAndMeasure &&
                        plan.subcircuits.back().qubits == std::vector<int>{1, 3, 5, 7};
  const bool f3_ok = cutting::estimate_f3(g12, 4) == 5 && plan.f3 == 5;
  const bool overhead_ok = cutting::execution_overhead(2) == 16;
  return {fits_bad == 0 && monotone_bad == 0 && cross_ok && f3_ok && overhead_ok,
          "F3(8q none-odd, q=4) = " + std::to_string(cutting::estimate_f3(g12, 4)) + ", plan has " +
              std::to_string(plan.subcircuits.size()) + " subcircuits, cross on {1,3,5,7}: " +
              (cross_ok ? "yes" : "no") + ", fit violations " + std::to_string(fits_bad) + ", monotonicity violations " +
              std::to_string(monotone_bad) + ", 4^2 = " + std::to_string(cutting::execution_overhead(2))};
}

std::string seconds_since(std::chrono::steady_clock::time_point start) {
  return fmt("%.1fs", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

Verdict iris_retrain() {
  const auto start = std::chrono::steady_clock::now();
  const auto g = make(Embedding::Amplitude, 4, {{1, CnotMode::None}, {1, CnotMode::Odd}}, 5e-3);
  int hits = 0;
  std::string accs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto c = pl::SearchConfig::defaults_for(pl::DatasetKind::Iris);
    c.data_dir = QSEARCH_DATA_DIR;
    c.seed = seed;
    const auto data = pl::PreparedData::load(c);
    const auto r = pl::cmd_retrain(g, 20, c, data);
    hits += r.final_val_acc >= 29.0 / 30.0 - 1e-12 && data.val_size() == 30;
    accs += (accs.empty() ? "" : " ") + fmt("%.2f", 100 * r.final_val_acc);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {hits >= 3 && secs < 300,
          std::to_string(hits) + "/5 seeds >= 96.67% (val acc % " + accs + "), " + seconds_since(start)};
}

Verdict mnist_surrogate() {
  const auto start = std::chrono::steady_clock::now();
  const auto g = make(Embedding::AngleY, 8, {{4, CnotMode::None}, {4, CnotMode::Odd}}, 5e-3);
  int hits = 0;
  std::string accs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto c = pl::SearchConfig::defaults_for(pl::DatasetKind::Mnist);
    c.data_dir = QSEARCH_DATA_DIR;
    c.subset_size = 5000;
    c.space.n_min = 8;
    c.space.n_max = 8;
    c.batch_size = 8;
    c.seed = seed;
    const auto data = pl::PreparedData::load(c);
    const auto r = pl::cmd_retrain(g, 4, c, data);
    hits += r.final_val_acc >= 0.85;
    accs += (accs.empty() ? "" : " ") + fmt("%.2f", 100 * r.final_val_acc);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {hits >= 3 && secs < 1800,
          std::to_string(hits) + "/5 seeds >= 85% (val acc % " + accs + "), " + seconds_since(start)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const auto start = std::chrono::steady_clock::now();
  const auto root = fs::temp_directory_path() / "qsearch_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::string> csvs;
  bool nondominated = true;
  for (int run = 0; run < 2; ++run) {
    auto c = pl::SearchConfig::defaults_for(pl::DatasetKind::Iris);
    c.data_dir = QSEARCH_DATA_DIR;
    c.pop_size = 8;
    c.generations = 3;
    c.cost_mode = pl::CostMode::GateCount;
    c.seed = 2024;
    c.output_dir = root / ("run" + std::to_string(run));
    const auto outcome = pl::cmd_search(c);
    csvs.push_back(slurp(c.output_dir / "pareto.csv"));
    std::map<std::int64_t, nsga2::ObjectiveVector> obj;
    for (const auto& ind : outcome.result.archive) obj[ind.eval_id] = ind.objectives;
    for (const auto& snap : outcome.result.history) {
      for (auto a : snap.front0)
        for (auto b : snap.front0) nondominated &= !oracle::dominates(obj[a], obj[b]);
    }
  }
  const bool identical = csvs[0] == csvs[1] && !csvs[0].empty();
  return {identical && nondominated, std::string("pareto.csv byte-identical: ") + (identical ? "yes" : "no") +
                                         ", fronts mutually non-dominated: " + (nondominated ? "yes" : "no") + ", " +
                                         seconds_since(start)};
}

Verdict correlation() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(909);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = oracle::random_vector(rng, 10, 0.0, 1.0);
    std::vector<double> affine, monotone, reversed;
    for (double v : x) {
      affine.push_back(2.0 * v + 0.3);
      monotone.push_back(std::pow(v, 3) + v);
      reversed.push_back(-std::exp(v));
    }
    worst = std::max(worst, std::abs(*stats::pearson(x, affine) - 1.0));
    worst = std::max(worst, std::abs(*stats::spearman(x, affine) - 1.0));
    worst = std::max(worst, std::abs(*stats::spearman(x, monotone) - 1.0));
    worst = std::max(worst, std::abs(*stats::spearman(x, reversed) + 1.0));
  }
  auto c = pl::SearchConfig::defaults_for(pl::DatasetKind::Iris);
  c.data_dir = QSEARCH_DATA_DIR;
  c.seed = 9;
  const auto rep = pl::cmd_correlate(c, 8, 6);
  const auto j = rep.to_json();
  bool well_formed = j.at("architectures") == 8 && j.at("epochs") == 6 && j.at("checkpoints").size() == 6 &&
                     j.at("val_acc").size() == 8 && j.at("genomes").size() == 8;
  for (const auto& row : j.at("val_acc")) {
    well_formed &= row.size() == 6;
    for (const auto& v : row) well_formed &= v.get<double>() >= 0.0 && v.get<double>() <= 1.0;
  }
  std::string corr = "undefined";
  const auto& first = j.at("checkpoints")[0];
  if (!first.at("pearson").is_null()) corr = fmt("%.3f", first.at("pearson").get<double>());
  const auto& strong = j.at("first_epoch_above_threshold");
  return {worst <= 1e-12 && well_formed,
          "synthetic error " + fmt("%.1e", worst) + ", report well-formed: " + (well_formed ? "yes" : "no") +
              ", epoch-1 pearson vs final " + corr + ", first epoch with r and rho > 0.9: " +
              (strong.is_null() ? std::string("none") : std::to_string(strong.get<int>())) + ", " + seconds_since(start)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"gradient correctness", gradients},
      {"simulator invariants", simulator},
      {"non-dominated sort oracle equivalence", nsga2_oracle},
      {"entangling pair goldens", pairs},
      {"cutting estimator and plan", cutting_checks},
      {"Iris retrain of amplitude 4q none-odd", iris_retrain},
      {"MNIST 5k surrogate, angle-y 8q none-odd", mnist_surrogate},
      {"end-to-end search determinism", determinism},
      {"correlation machinery", correlation},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("[%s] criterion %d: %s -- %s\n", v.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
