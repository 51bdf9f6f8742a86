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

#include "qsearch/cutting.hpp"

#include <algorithm>
#include <set>

#include "qsearch/errors.hpp"

namespace qsearch::cutting {

namespace {

std::vector<int> group_index(int n, const std::vector<QubitGroup>& groups) {
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (int q : groups[gi]) owner[static_cast<std::size_t>(q)] = static_cast<int>(gi);
  }
  return owner;
}

PlacedGate::Kind embed_kind() { return PlacedGate::Kind::Embed; }

void add_layer_rotations(Subcircuit& sc, int layer, int n, const std::vector<int>& qubits) {
  constexpr PlacedGate::Kind kAxes[] = {PlacedGate::Kind::RX, PlacedGate::Kind::RY, PlacedGate::Kind::RZ};
  for (int q : qubits) {
    for (int a = 0; a < 3; ++a) sc.gates.push_back({kAxes[a], layer, q, -1, layer * 3 * n + 3 * q + a});
  }
}

}  // namespace

std::string to_string(SubcircuitRole role) {
  switch (role) {
    case SubcircuitRole::EmbedAndLayer: return "embed_and_layer";
    case SubcircuitRole::Layer: return "layer";
    case SubcircuitRole::CrossEntangleAndMeasure: return "cross_entangle_and_measure";
  }
  return "?";
}

std::string to_string(PlacedGate::Kind kind) {
  switch (kind) {
    case PlacedGate::Kind::Embed: return "embed";
    case PlacedGate::Kind::RX: return "rx";
    case PlacedGate::Kind::RY: return "ry";
    case PlacedGate::Kind::RZ: return "rz";
    case PlacedGate::Kind::CNOT: return "cnot";
  }
  return "?";
}

std::vector<QubitGroup> group_qubits(int n, int q) {
  if (n < 1 || q < 1) throw ConfigError("grouping needs n >= 1 and q >= 1");
  const int g = (n + q - 1) / q;
  const int base = n / g;
  const int larger = n % g;
  std::vector<QubitGroup> groups;
  int next = 0;
  for (int i = 0; i < g; ++i) {
    QubitGroup group;
    for (int k = 0; k < base + (i < larger ? 1 : 0); ++k) group.push_back(next++);
    groups.push_back(std::move(group));
  }
  return groups;
}

std::vector<std::vector<hqnn::Pair>> cross_pairs(const Genome& g, const std::vector<QubitGroup>& groups) {
  const auto owner = group_index(g.n, groups);
  std::vector<std::vector<hqnn::Pair>> out;
  for (const auto& pairs : hqnn::layer_pairs(g)) {
    std::vector<hqnn::Pair> crossing;
    for (const auto& p : pairs) {
      if (owner[static_cast<std::size_t>(p.first)] != owner[static_cast<std::size_t>(p.second)]) crossing.push_back(p);
    }
    out.push_back(std::move(crossing));
  }
  return out;
}

int estimate_f3(const Genome& g, int q_target) {
  g.validate();
  if (q_target < 1) throw ConfigError("qubit budget must be positive");
  if (g.n <= q_target) return 1;
  const auto groups = group_qubits(g.n, q_target);
  const auto crossing = cross_pairs(g, groups);
  const bool any_cross = std::any_of(crossing.begin(), crossing.end(), [](const auto& c) { return !c.empty(); });
  return g.depth * static_cast<int>(groups.size()) + (any_cross ? 1 : 0);
}

CutPlan emit_cut_plan(const Genome& g, int q_target) {
  g.validate();
  if (q_target < 1) throw ConfigError("qubit budget must be positive");
  CutPlan plan;
  plan.q_target = q_target;
  const auto layers = hqnn::layer_pairs(g);

  if (g.n <= q_target) {
    QubitGroup all(static_cast<std::size_t>(g.n));
    for (int q = 0; q < g.n; ++q) all[static_cast<std::size_t>(q)] = q;
    plan.groups = {all};
    Subcircuit sc;
    sc.qubits = all;
    sc.role = SubcircuitRole::EmbedAndLayer;
    sc.layer = 0;
    for (int q : all) sc.gates.push_back({embed_kind(), -1, q, -1, -1});
    for (int l = 0; l < g.depth; ++l) {
      add_layer_rotations(sc, l, g.n, all);
      for (auto [c, t] : layers[static_cast<std::size_t>(l)]) sc.gates.push_back({PlacedGate::Kind::CNOT, l, t, c, -1});
    }
    plan.subcircuits.push_back(std::move(sc));
    plan.f3 = 1;
    return plan;
  }

  plan.groups = group_qubits(g.n, q_target);
  const auto owner = group_index(g.n, plan.groups);
  for (int l = 0; l < g.depth; ++l) {
    for (std::size_t gi = 0; gi < plan.groups.size(); ++gi) {
      Subcircuit sc;
      sc.qubits = plan.groups[gi];
      sc.layer = l;
      sc.role = l == 0 ? SubcircuitRole::EmbedAndLayer : SubcircuitRole::Layer;
      if (l == 0) {
        for (int q : sc.qubits) sc.gates.push_back({embed_kind(), -1, q, -1, -1});
      }
      add_layer_rotations(sc, l, g.n, sc.qubits);
      for (auto [c, t] : layers[static_cast<std::size_t>(l)]) {
        if (owner[static_cast<std::size_t>(c)] == static_cast<int>(gi) &&
            owner[static_cast<std::size_t>(t)] == static_cast<int>(gi)) {
          sc.gates.push_back({PlacedGate::Kind::CNOT, l, t, c, -1});
        }
      }
      plan.subcircuits.push_back(std::move(sc));
    }
  }

  // Cross-group CNOTs, packed greedily in (layer, control) order.
  const auto crossing = cross_pairs(g, plan.groups);
  std::set<int> open_qubits;
  Subcircuit current;
  auto flush = [&] {
    if (current.gates.empty()) return;
    current.qubits.assign(open_qubits.begin(), open_qubits.end());
    current.role = SubcircuitRole::CrossEntangleAndMeasure;
    current.layer = -1;
    plan.subcircuits.push_back(std::move(current));
    current = Subcircuit{};
    open_qubits.clear();
  };
  for (int l = 0; l < g.depth; ++l) {
    for (auto [c, t] : crossing[static_cast<std::size_t>(l)]) {
      if (q_target < 2) throw ConfigError("a qubit budget of 1 cannot host a CNOT");
      std::set<int> merged = open_qubits;
      merged.insert(c);
      merged.insert(t);
      if (static_cast<int>(merged.size()) > q_target) {
        flush();
        merged = {c, t};
      }
      open_qubits = std::move(merged);
      current.gates.push_back({PlacedGate::Kind::CNOT, l, t, c, -1});
    }
  }
  flush();

  // A wire that appears in consecutive subcircuits is cut between them.
  std::vector<int> last_seen(static_cast<std::size_t>(g.n), -1);
  for (std::size_t s = 0; s < plan.subcircuits.size(); ++s) {
    for (int q : plan.subcircuits[s].qubits) {
      int& prev = last_seen[static_cast<std::size_t>(q)];
      if (prev >= 0) {
        plan.subcircuits[static_cast<std::size_t>(prev)].cut_out.push_back(q);
        plan.subcircuits[s].cut_in.push_back(q);
        ++plan.num_cuts;
      }
      prev = static_cast<int>(s);
    }
  }
  plan.f3 = static_cast<int>(plan.subcircuits.size());
  return plan;
}

std::uint64_t execution_overhead(int num_cuts) {
  if (num_cuts < 0 || num_cuts > 30) throw ConfigError("cut count " + std::to_string(num_cuts) + " outside [0, 30]");
  return std::uint64_t{1} << (2 * num_cuts);
}

}  // namespace qsearch::cutting
