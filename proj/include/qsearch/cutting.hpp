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

#include <cstdint>
#include <string>
#include <vector>

#include "qsearch/genome.hpp"
#include "qsearch/hqnn.hpp"
#include "qsearch/qsim.hpp"

namespace qsearch::cutting {

using QubitGroup = std::vector<int>;

enum class SubcircuitRole { EmbedAndLayer, Layer, CrossEntangleAndMeasure };

std::string to_string(SubcircuitRole role);

// A gate of the uncut circuit, tagged with where it came from.
struct PlacedGate {
  enum class Kind { Embed, RX, RY, RZ, CNOT } kind;
  int layer = -1;      // -1 for the embedding
  int target = 0;
  int control = -1;    // CNOT only
  int param_index = -1;

  bool operator==(const PlacedGate&) const = default;
};

std::string to_string(PlacedGate::Kind kind);

struct Subcircuit {
  std::vector<int> qubits;
  SubcircuitRole role = SubcircuitRole::Layer;
  int layer = -1;  // -1 for cross subcircuits
  std::vector<PlacedGate> gates;
  std::vector<int> cut_in;   // wires arriving from an earlier subcircuit
  std::vector<int> cut_out;  // wires continuing in a later subcircuit
};

struct CutPlan {
  int q_target = 0;
  std::vector<QubitGroup> groups;
  std::vector<Subcircuit> subcircuits;
  int num_cuts = 0;
  int f3 = 1;
};

/// ceil(n/q) contiguous groups, the first n mod g of them one larger.
std::vector<QubitGroup> group_qubits(int n, int q);

/// Per layer, the CNOT pairs whose endpoints fall into different groups.
std::vector<std::vector<hqnn::Pair>> cross_pairs(const Genome& g, const std::vector<QubitGroup>& groups);

/// 1 when the genome fits the budget, else depth * groups + (1 if any
/// cross-group CNOT exists).
int estimate_f3(const Genome& g, int q_target);

/// Layer-by-group blocks followed by cross-group entangling blocks; cut
/// markers on every wire that moves between subcircuits.
CutPlan emit_cut_plan(const Genome& g, int q_target);

/// 4^k; throws ConfigError for k > 30.
std::uint64_t execution_overhead(int num_cuts);

}  // namespace qsearch::cutting
