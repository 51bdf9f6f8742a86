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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsearch/qsim.hpp"
#include "qsearch/rng.hpp"

namespace qsearch {

using qsim::Embedding;

enum class CnotMode { All, Odd, Even, None };

std::string to_string(Embedding e);
std::string to_string(CnotMode m);
Embedding parse_embedding(std::string_view s);
CnotMode parse_cnot_mode(std::string_view s);

struct LayerGene {
  int range = 1;  // entanglement offset r, 1 <= r <= n - 1
  CnotMode mode = CnotMode::None;

  bool operator==(const LayerGene&) const = default;
};

// Ranges are inclusive.
struct SearchSpace {
  std::vector<Embedding> embeddings{Embedding::AngleX, Embedding::AngleY, Embedding::AngleZ, Embedding::Amplitude};
  int n_min = 2;
  int n_max = 8;
  int depth_min = 1;
  int depth_max = 4;
  double lr_min = 1e-3;
  double lr_max = 5e-3;
  std::vector<CnotMode> cnot_modes{CnotMode::All, CnotMode::Odd, CnotMode::Even, CnotMode::None};
  int q_target = 4;

  void validate() const;

  /// Length of the real-coded chromosome: embedding, n, depth, (r, mode) per
  /// possible layer, lr.
  std::size_t vector_length() const { return 3 + 2 * static_cast<std::size_t>(depth_max) + 1; }

  // The image-task space (depth 1..4, budget 4) and the Iris space (depth 1..5, budget 2).
  static SearchSpace images();
  static SearchSpace iris();
};

struct Genome {
  Embedding embedding = Embedding::AngleY;
  int n = 2;
  int depth = 1;
  std::vector<LayerGene> layers{LayerGene{}};
  double lr = 1e-3;

  /// Throws StructuralError if the genome is not a member of `space`.
  void validate(const SearchSpace& space) const;
  /// Space-independent structural checks only.
  void validate() const;

  /// "none-odd" style per-layer mode string.
  std::string modes_string() const;
  /// "4-4" style per-layer range string.
  std::string ranges_string() const;

  bool operator==(const Genome&) const = default;
};

struct RealVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const RealVector&) const = default;
};

/// Uniform draw of every gene.
Genome sample(const SearchSpace& space, Rng& rng);

/// Total on [0,1]^d (components are clamped first).
Genome decode(const RealVector& v, const SearchSpace& space);

/// Bin-center encoding; decode(encode(g)) == g. Masked layer slots get the
/// lower-boundary encoding.
RealVector encode(const Genome& g, const SearchSpace& space);

struct VariationParams {
  double eta_c = 15.0;
  double eta_m = 20.0;
  double crossover_prob = 0.9;      // per pair
  double component_swap_prob = 0.5; // per component, given crossover happens
  std::optional<double> mutation_prob;  // per gene; defaults to 1/d
};

/// Simulated binary crossover with children clamped to [0,1].
std::pair<RealVector, RealVector> sbx_crossover(const RealVector& p1, const RealVector& p2, double eta_c, Rng& rng,
                                                double crossover_prob = 0.9, double component_prob = 0.5);

/// Polynomial mutation with per-gene probability p_m, clamped to [0,1].
RealVector polynomial_mutation(const RealVector& v, double eta_m, double p_m, Rng& rng);

namespace detail {
// SBX children before clamping; exposed so the mean-preservation law can be tested.
std::pair<RealVector, RealVector> sbx_unclamped(const RealVector& p1, const RealVector& p2, double eta_c, Rng& rng,
                                                double crossover_prob, double component_prob);
}  // namespace detail

}  // namespace qsearch
