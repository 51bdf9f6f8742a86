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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "oracles.hpp"
#include "qsearch/errors.hpp"
#include "qsearch/nsga2.hpp"

using namespace qsearch;
using namespace qsearch::nsga2;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<ObjectiveVector> random_points(Rng& rng, std::size_t size, int levels) {
  std::vector<ObjectiveVector> pts(size);
  for (auto& p : pts) {
    p.f1 = static_cast<double>(rng.below(static_cast<std::uint64_t>(levels)));
    p.f2 = static_cast<double>(rng.below(static_cast<std::uint64_t>(levels)));
    p.f3 = static_cast<double>(rng.below(static_cast<std::uint64_t>(levels)));
  }
  return pts;
}

std::vector<Individual> as_individuals(const std::vector<ObjectiveVector>& pts) {
  std::vector<Individual> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out[i].objectives = pts[i];
    out[i].eval_id = static_cast<std::int64_t>(i);
  }
  return out;
}

// Plain per-objective sort-and-gap crowding, written independently.
std::vector<double> crowding_oracle(const std::vector<ObjectiveVector>& f) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n <= 2) return std::vector<double>(n, kInf);
  for (std::size_t m = 0; m < 3; ++m) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return f[a][m] < f[b][m]; });
    const double lo = f[idx.front()][m], hi = f[idx.back()][m];
    d[idx.front()] = d[idx.back()] = kInf;
    if (hi == lo) continue;
    for (std::size_t k = 1; k + 1 < n; ++k) d[idx[k]] += (f[idx[k + 1]][m] - f[idx[k - 1]][m]) / (hi - lo);
  }
  return d;
}

EvalOutcome synthetic_objectives(const Candidate& c) {
  const auto& g = c.genome;
  double conn = 0;
  for (const auto& l : g.layers) conn += l.mode == CnotMode::None ? 0 : l.range;
  return {{1.0 / (1.0 + g.n * g.depth + 0.1 * conn), g.n * g.depth * 1.0 + conn, 1.0 + g.depth * (g.n > 4)}, true};
}

}  // namespace

TEST_CASE("dominance") {
  CHECK(dominates({0, 0, 0}, {0, 0, 1}));
  CHECK_FALSE(dominates({0, 0, 0}, {0, 0, 0}));
  CHECK_FALSE(dominates({0, 1, 0}, {1, 0, 0}));
}

TEST_CASE("fast non-dominated sort equals the brute-force peel") {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const auto size = static_cast<std::size_t>(rng.range(1, 64));
    const auto pts = random_points(rng, size, trial % 2 ? 4 : 50);
    const auto fronts = fast_non_dominated_sort(pts);
    const auto want = oracle::brute_force_fronts(pts);
    REQUIRE(fronts.size() == want.size());
    for (std::size_t k = 0; k < fronts.size(); ++k) {
      CHECK(std::set<std::size_t>(fronts[k].begin(), fronts[k].end()) == want[k]);
    }
  }
}

TEST_CASE("crowding distance") {
  SUBCASE("matches the oracle on distinct points") {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<ObjectiveVector> pts(static_cast<std::size_t>(rng.range(1, 20)));
      for (auto& p : pts) p = {rng.uniform(), rng.uniform(), rng.uniform()};
      const auto got = crowding_distance(pts);
      const auto want = crowding_oracle(pts);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (std::isinf(want[i])) {
          CHECK(std::isinf(got[i]));
        } else {
          CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
        }
      }
    }
  }
  SUBCASE("hand example") {
    const std::vector<ObjectiveVector> pts{{0, 4, 1}, {1, 2, 1}, {2, 1, 1}, {4, 0, 1}};
    const auto d = crowding_distance(pts);
    CHECK(std::isinf(d[0]));
    CHECK(std::isinf(d[3]));
    CHECK(d[1] == doctest::Approx(2.0 / 4 + 3.0 / 4));
    CHECK(d[2] == doctest::Approx(3.0 / 4 + 2.0 / 4));
  }
  SUBCASE("tiny fronts are all boundary") {
    const std::vector<ObjectiveVector> two{{0, 1, 1}, {1, 0, 1}};
    for (double x : crowding_distance(two)) CHECK(std::isinf(x));
  }
}

TEST_CASE("environmental selection keeps whole better fronts") {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto size = static_cast<std::size_t>(rng.range(4, 64));
    const auto pts = random_points(rng, size, 6);
    const auto target = static_cast<std::size_t>(rng.range(1, static_cast<int>(size)));
    const auto fronts = oracle::brute_force_fronts(pts);
    std::map<std::int64_t, std::size_t> rank_of;
    for (std::size_t k = 0; k < fronts.size(); ++k)
      for (auto i : fronts[k]) rank_of[static_cast<std::int64_t>(i)] = k;

    const auto kept = environmental_select(as_individuals(pts), target);
    REQUIRE(kept.size() == target);
    std::size_t worst_kept = 0;
    std::set<std::int64_t> kept_ids;
    for (const auto& ind : kept) {
      worst_kept = std::max(worst_kept, rank_of[ind.eval_id]);
      kept_ids.insert(ind.eval_id);
    }
    for (const auto& [id, r] : rank_of) {
      if (r < worst_kept) CHECK(kept_ids.count(id) == 1);
    }
  }
}

TEST_CASE("selection splits a front by crowding, then eval id") {
  // One front of five points on a line; boundary points are infinite.
  std::vector<ObjectiveVector> pts{{0, 4, 0}, {1, 3, 0}, {2, 2, 0}, {3, 1, 0}, {4, 0, 0}};
  auto kept = environmental_select(as_individuals(pts), 3);
  std::set<std::int64_t> ids;
  for (const auto& k : kept) ids.insert(k.eval_id);
  CHECK(ids == std::set<std::int64_t>{0, 1, 4});
}

TEST_CASE("binary tournament prefers rank, then crowding") {
  std::vector<Individual> members(2);
  members[0].rank = 0;
  members[0].crowding = 0.1;
  members[0].eval_id = 5;
  members[1].rank = 1;
  members[1].crowding = kInf;
  members[1].eval_id = 1;
  Rng rng(4);
  int wins = 0;
  for (int i = 0; i < 200; ++i) wins += binary_tournament(members, rng).eval_id == 5;
  // Self-pairings are possible; the better individual must win every mixed draw.
  CHECK(wins >= 100);
  members[1].rank = 0;
  int crowd_wins = 0;
  for (int i = 0; i < 200; ++i) crowd_wins += binary_tournament(members, rng).eval_id == 1;
  CHECK(crowd_wins >= 100);
}

TEST_CASE("offspring count and validity") {
  const auto space = SearchSpace::images();
  Rng rng(5);
  Population pop;
  for (int i = 0; i < 12; ++i) {
    Individual ind;
    ind.genome = sample(space, rng);
    ind.chromosome = encode(ind.genome, space);
    ind.objectives = {rng.uniform(), rng.uniform(), rng.uniform()};
    ind.eval_id = i;
    pop.members.push_back(ind);
  }
  assign_rank_and_crowding(pop.members);
  const auto kids = make_offspring(pop, space, VariationParams{}, rng);
  REQUIRE(kids.size() == 12);
  for (const auto& k : kids) {
    CHECK_NOTHROW(k.genome.validate(space));
    CHECK(k.chromosome.size() == space.vector_length());
    CHECK(decode(k.chromosome, space) == k.genome);
  }
}

TEST_CASE("search accounting and determinism") {
  const auto space = SearchSpace::images();
  SearchParams params;
  params.pop_size = 12;
  params.generations = 6;
  params.seed = 42;
  auto eval = parallel_evaluator(synthetic_objectives, 1);
  const auto a = run_search(space, eval, params);
  CHECK(a.initial_evaluations == 12);
  CHECK(a.offspring_evaluations == 72);
  REQUIRE(a.archive.size() == 84);
  for (std::size_t i = 0; i < a.archive.size(); ++i) CHECK(a.archive[i].eval_id == static_cast<std::int64_t>(i));
  CHECK(a.population.size() == 12);
  CHECK(a.history.size() == 7);

  std::vector<ObjectiveVector> front;
  for (const auto& p : a.pareto) front.push_back(p.objectives);
  for (std::size_t i = 0; i < front.size(); ++i)
    for (std::size_t j = 0; j < front.size(); ++j) CHECK_FALSE(oracle::dominates(front[i], front[j]));

  const auto b = run_search(space, parallel_evaluator(synthetic_objectives, 3), params);
  REQUIRE(b.archive.size() == a.archive.size());
  for (std::size_t i = 0; i < a.archive.size(); ++i) CHECK(b.archive[i].genome == a.archive[i].genome);
}

TEST_CASE("failed evaluations receive the worst objectives") {
  SearchParams params;
  params.pop_size = 4;
  params.generations = 2;
  auto flaky = [](const Candidate& c) -> EvalOutcome {
    if (c.eval_id % 3 == 0) throw std::runtime_error("boom");
    return synthetic_objectives(c);
  };
  const auto r = run_search(SearchSpace::images(), parallel_evaluator(flaky, 2), params);
  for (const auto& ind : r.archive) {
    if (ind.eval_id % 3 == 0) {
      CHECK(ind.failed);
      CHECK(ind.objectives == worst_objectives());
    } else {
      CHECK_FALSE(ind.failed);
    }
  }
}

TEST_CASE("parallel evaluator keeps input order") {
  std::atomic<int> calls{0};
  auto eval = parallel_evaluator(
      [&](const Candidate& c) {
        ++calls;
        return EvalOutcome{{static_cast<double>(c.eval_id), 0, 1}, true};
      },
      4);
  std::vector<Candidate> batch(37);
  for (std::size_t i = 0; i < batch.size(); ++i) batch[i].eval_id = static_cast<std::int64_t>(i);
  const auto out = eval(batch);
  CHECK(calls == 37);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].objectives.f1 == static_cast<double>(i));
}

TEST_CASE("search parameter validation") {
  SearchParams p;
  p.pop_size = 5;
  CHECK_THROWS_AS(run_search(SearchSpace::images(), parallel_evaluator(synthetic_objectives, 1), p), ConfigError);
  p.pop_size = 4;
  p.generations = 0;
  CHECK_THROWS_AS(run_search(SearchSpace::images(), parallel_evaluator(synthetic_objectives, 1), p), ConfigError);
}
