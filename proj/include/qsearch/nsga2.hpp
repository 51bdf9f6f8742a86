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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qsearch/genome.hpp"
#include "qsearch/rng.hpp"

namespace qsearch::nsga2 {

// (validation error, runtime cost, subcircuit count), all minimized.
struct ObjectiveVector {
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 1.0;

  double operator[](std::size_t i) const { return i == 0 ? f1 : (i == 1 ? f2 : f3); }
  static constexpr std::size_t size() { return 3; }
  bool operator==(const ObjectiveVector&) const = default;
};

inline constexpr double kWorstCost = 1e9;

/// Objectives given to a candidate whose evaluation failed outright.
inline ObjectiveVector worst_objectives() { return {1.0, kWorstCost, kWorstCost}; }

/// a <= b everywhere and a < b somewhere.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

struct Individual {
  Genome genome;
  RealVector chromosome;
  ObjectiveVector objectives;
  int rank = -1;
  double crowding = 0.0;
  std::int64_t eval_id = -1;
  int generation = 0;
  bool failed = false;
};

struct Population {
  std::vector<Individual> members;
  int generation = 0;
};

using Fronts = std::vector<std::vector<std::size_t>>;

/// Front k holds the indices that are non-dominated once fronts < k are removed.
Fronts fast_non_dominated_sort(std::span<const ObjectiveVector> objectives);
Fronts fast_non_dominated_sort(const Population& pop);

/// Boundary members per objective get +infinity; interior members sum the
/// neighbour gap normalized by the objective's range (zero range adds 0).
std::vector<double> crowding_distance(std::span<const ObjectiveVector> front);

/// Sets rank and crowding on every member.
void assign_rank_and_crowding(std::vector<Individual>& members);

/// Whole fronts in rank order, then the splitting front by descending
/// crowding (ties: lower eval_id). Ranks/crowding of the survivors are the
/// values computed on the combined pool.
std::vector<Individual> environmental_select(std::vector<Individual> combined, std::size_t target_size);

/// Binary tournament on (rank, crowding, eval_id).
const Individual& binary_tournament(const std::vector<Individual>& members, Rng& rng);

struct Offspring {
  Genome genome;
  RealVector chromosome;
};

/// Tournament-selected parents, SBX, polynomial mutation, decode. Returns
/// exactly members.size() children.
std::vector<Offspring> make_offspring(const Population& pop, const SearchSpace& space, const VariationParams& params,
                                      Rng& rng);

struct Candidate {
  std::int64_t eval_id = 0;
  int generation = 0;
  Genome genome;
};

struct EvalOutcome {
  ObjectiveVector objectives;
  bool ok = true;
};

/// Evaluates a batch; results must line up with the input order.
using BatchEvaluator = std::function<std::vector<EvalOutcome>(std::span<const Candidate>)>;
using SingleEvaluator = std::function<EvalOutcome(const Candidate&)>;

/// Runs `single` over a batch on `workers` threads. Exceptions turn into
/// failed outcomes with worst objectives.
BatchEvaluator parallel_evaluator(SingleEvaluator single, int workers);

struct GenerationSnapshot {
  int generation = 0;
  std::vector<std::int64_t> population;  // eval ids after selection
  std::vector<std::int64_t> front0;
};

struct SearchResult {
  std::vector<Individual> archive;     // every evaluation, in eval_id order
  std::vector<Individual> population;  // final population
  std::vector<Individual> pareto;      // front 0 of the final population
  std::vector<GenerationSnapshot> history;
  std::size_t initial_evaluations = 0;
  std::size_t offspring_evaluations = 0;
};

struct SearchParams {
  std::size_t pop_size = 12;
  int generations = 6;
  std::uint64_t seed = 0;
  VariationParams variation;
};

/// Generation 0 is a random population; each of `generations` rounds then
/// evaluates pop_size offspring and keeps the best pop_size of parents+offspring.
SearchResult run_search(const SearchSpace& space, const BatchEvaluator& evaluator, const SearchParams& params);

}  // namespace qsearch::nsga2
