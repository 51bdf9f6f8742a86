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

#include "qsearch/nsga2.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "qsearch/errors.hpp"

namespace qsearch::nsga2 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<ObjectiveVector> objectives_of(const std::vector<Individual>& members) {
  std::vector<ObjectiveVector> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.objectives);
  return out;
}

std::vector<ObjectiveVector> gather(const std::vector<Individual>& members, const std::vector<std::size_t>& idx) {
  std::vector<ObjectiveVector> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(members[i].objectives);
  return out;
}

bool tournament_better(const Individual& a, const Individual& b) {
  if (a.rank != b.rank) return a.rank < b.rank;
  if (a.crowding != b.crowding) return a.crowding > b.crowding;
  return a.eval_id < b.eval_id;
}

// Sampled genome plus random filler for the masked layer slots.
RealVector initial_chromosome(const Genome& g, const SearchSpace& space, Rng& rng) {
  RealVector v = encode(g, space);
  for (int l = g.depth; l < space.depth_max; ++l) {
    const std::size_t base = 3 + 2 * static_cast<std::size_t>(l);
    v[base] = rng.uniform();
    v[base + 1] = rng.uniform();
  }
  return v;
}

}  // namespace

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  bool strictly = false;
  for (std::size_t i = 0; i < ObjectiveVector::size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strictly = true;
  }
  return strictly;
}

Fronts fast_non_dominated_sort(std::span<const ObjectiveVector> objectives) {
  const std::size_t n = objectives.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> domination_count(n, 0);
  Fronts fronts;
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(objectives[p], objectives[q])) {
        dominated[p].push_back(q);
      } else if (dominates(objectives[q], objectives[p])) {
        ++domination_count[p];
      }
    }
    if (domination_count[p] == 0) current.push_back(p);
  }
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (auto p : current) {
      for (auto q : dominated[p]) {
        if (--domination_count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

Fronts fast_non_dominated_sort(const Population& pop) {
  const auto objs = objectives_of(pop.members);
  return fast_non_dominated_sort(objs);
}

std::vector<double> crowding_distance(std::span<const ObjectiveVector> front) {
  const std::size_t n = front.size();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), kInf);
    return dist;
  }
  std::vector<std::size_t> order(n);
  for (std::size_t m = 0; m < ObjectiveVector::size(); ++m) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return front[a][m] < front[b][m]; });
    dist[order.front()] = kInf;
    dist[order.back()] = kInf;
    const double range = front[order.back()][m] - front[order.front()][m];
    if (!(range > 0)) continue;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      dist[order[k]] += (front[order[k + 1]][m] - front[order[k - 1]][m]) / range;
    }
  }
  return dist;
}

void assign_rank_and_crowding(std::vector<Individual>& members) {
  const auto objs = objectives_of(members);
  const auto fronts = fast_non_dominated_sort(objs);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    const auto dist = crowding_distance(gather(members, fronts[r]));
    for (std::size_t k = 0; k < fronts[r].size(); ++k) {
      members[fronts[r][k]].rank = static_cast<int>(r);
      members[fronts[r][k]].crowding = dist[k];
    }
  }
}

std::vector<Individual> environmental_select(std::vector<Individual> combined, std::size_t target_size) {
  if (target_size > combined.size()) {
    throw StructuralError("cannot select " + std::to_string(target_size) + " survivors from " +
                          std::to_string(combined.size()));
  }
  assign_rank_and_crowding(combined);
  const auto fronts = fast_non_dominated_sort(objectives_of(combined));
  std::vector<Individual> selected;
  selected.reserve(target_size);
  for (const auto& front : fronts) {
    if (selected.size() == target_size) break;
    std::vector<std::size_t> members = front;
    if (selected.size() + front.size() > target_size) {
      std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
        if (combined[a].crowding != combined[b].crowding) return combined[a].crowding > combined[b].crowding;
        return combined[a].eval_id < combined[b].eval_id;
      });
      members.resize(target_size - selected.size());
    }
    for (auto i : members) selected.push_back(combined[i]);
  }
  return selected;
}

const Individual& binary_tournament(const std::vector<Individual>& members, Rng& rng) {
  if (members.empty()) throw StructuralError("tournament over an empty population");
  const std::size_t a = rng.below(members.size());
  if (members.size() == 1) return members[a];
  std::size_t b = rng.below(members.size() - 1);
  if (b >= a) ++b;
  return tournament_better(members[a], members[b]) ? members[a] : members[b];
}

std::vector<Offspring> make_offspring(const Population& pop, const SearchSpace& space, const VariationParams& params,
                                      Rng& rng) {
  for (const auto& m : pop.members) {
    if (m.rank < 0) throw StructuralError("offspring requested before ranks were assigned");
  }
  const std::size_t d = space.vector_length();
  const double p_m = params.mutation_prob.value_or(1.0 / static_cast<double>(d));
  std::vector<Offspring> children;
  children.reserve(pop.members.size());
  while (children.size() < pop.members.size()) {
    const auto& a = binary_tournament(pop.members, rng);
    const auto& b = binary_tournament(pop.members, rng);
    auto [c1, c2] = sbx_crossover(a.chromosome, b.chromosome, params.eta_c, rng, params.crossover_prob,
                                  params.component_swap_prob);
    for (auto* c : {&c1, &c2}) {
      if (children.size() == pop.members.size()) break;
      RealVector v = polynomial_mutation(*c, params.eta_m, p_m, rng);
      Genome g = decode(v, space);
      children.push_back({std::move(g), std::move(v)});
    }
  }
  return children;
}

BatchEvaluator parallel_evaluator(SingleEvaluator single, int workers) {
  return [single = std::move(single), workers](std::span<const Candidate> batch) {
    std::vector<EvalOutcome> out(batch.size());
    auto run_one = [&](std::size_t i) {
      try {
        out[i] = single(batch[i]);
      } catch (const std::exception&) {
        out[i] = EvalOutcome{worst_objectives(), false};
      }
    };
    const auto width = static_cast<std::size_t>(std::max(1, workers));
    if (width == 1 || batch.size() <= 1) {
      for (std::size_t i = 0; i < batch.size(); ++i) run_one(i);
      return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(width, batch.size()); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < batch.size(); i = next++) run_one(i);
      });
    }
    for (auto& t : pool) t.join();
    return out;
  };
}

SearchResult run_search(const SearchSpace& space, const BatchEvaluator& evaluator, const SearchParams& params) {
  space.validate();
  if (params.pop_size == 0 || params.pop_size % 2 != 0) throw ConfigError("population size must be positive and even");
  if (params.generations < 1) throw ConfigError("at least one generation is required");

  SearchResult result;
  std::int64_t next_id = 0;

  auto evaluate = [&](std::vector<Individual>& batch) {
    std::vector<Candidate> candidates;
    candidates.reserve(batch.size());
    for (const auto& ind : batch) candidates.push_back({ind.eval_id, ind.generation, ind.genome});
    auto outcomes = evaluator(candidates);
    if (outcomes.size() != batch.size()) throw StructuralError("evaluator returned the wrong number of outcomes");
    for (std::size_t i = 0; i < batch.size(); ++i) {
      batch[i].failed = !outcomes[i].ok;
      batch[i].objectives = outcomes[i].ok ? outcomes[i].objectives : worst_objectives();
      result.archive.push_back(batch[i]);
    }
  };

  auto snapshot = [&](const Population& pop) {
    GenerationSnapshot snap;
    snap.generation = pop.generation;
    for (const auto& m : pop.members) {
      snap.population.push_back(m.eval_id);
      if (m.rank == 0) snap.front0.push_back(m.eval_id);
    }
    result.history.push_back(std::move(snap));
  };

  Population pop;
  {
    Rng rng(Rng::derive_seed(params.seed, 0));
    for (std::size_t i = 0; i < params.pop_size; ++i) {
      Individual ind;
      ind.genome = sample(space, rng);
      ind.chromosome = initial_chromosome(ind.genome, space, rng);
      ind.eval_id = next_id++;
      ind.generation = 0;
      pop.members.push_back(std::move(ind));
    }
    evaluate(pop.members);
    result.initial_evaluations = pop.members.size();
    assign_rank_and_crowding(pop.members);
    snapshot(pop);
  }

  for (int gen = 1; gen <= params.generations; ++gen) {
    Rng rng(Rng::derive_seed(params.seed, static_cast<std::uint64_t>(gen)));
    auto children = make_offspring(pop, space, params.variation, rng);
    std::vector<Individual> offspring;
    for (auto& child : children) {
      Individual ind;
      ind.genome = std::move(child.genome);
      ind.chromosome = std::move(child.chromosome);
      ind.eval_id = next_id++;
      ind.generation = gen;
      offspring.push_back(std::move(ind));
    }
    evaluate(offspring);
    result.offspring_evaluations += offspring.size();

    std::vector<Individual> combined = std::move(pop.members);
    combined.insert(combined.end(), offspring.begin(), offspring.end());
    pop.members = environmental_select(std::move(combined), params.pop_size);
    pop.generation = gen;
    assign_rank_and_crowding(pop.members);
    snapshot(pop);
  }

  result.population = pop.members;
  for (const auto& m : pop.members) {
    if (m.rank == 0) result.pareto.push_back(m);
  }
  std::sort(result.pareto.begin(), result.pareto.end(),
            [](const Individual& a, const Individual& b) { return a.eval_id < b.eval_id; });
  return result;
}

}  // namespace qsearch::nsga2
