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

#include "qsearch/genome.hpp"

#include <algorithm>
#include <cmath>

#include "qsearch/errors.hpp"

namespace qsearch {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Equal-width quantization of [0,1] into k bins.
int quantize(double v, int k) { return std::min(k - 1, static_cast<int>(std::floor(clamp01(v) * k))); }
double bin_center(int idx, int k) { return (idx + 0.5) / k; }

template <typename T>
int index_of(const std::vector<T>& set, T value) {
  auto it = std::find(set.begin(), set.end(), value);
  return it == set.end() ? -1 : static_cast<int>(it - set.begin());
}

double r_fraction(int r, int n) { return n > 2 ? static_cast<double>(r - 1) / (n - 2) : 0.0; }
int r_from_fraction(double f, int n) { return 1 + static_cast<int>(std::lround(clamp01(f) * (n - 2))); }

constexpr std::size_t kEmbedSlot = 0, kQubitSlot = 1, kDepthSlot = 2, kLayerBase = 3;

}  // namespace

std::string to_string(Embedding e) {
  switch (e) {
    case Embedding::AngleX: return "angle-x";
    case Embedding::AngleY: return "angle-y";
    case Embedding::AngleZ: return "angle-z";
    case Embedding::Amplitude: return "amplitude";
  }
  return "?";
}

std::string to_string(CnotMode m) {
  switch (m) {
    case CnotMode::All: return "all";
    case CnotMode::Odd: return "odd";
    case CnotMode::Even: return "even";
    case CnotMode::None: return "none";
  }
  return "?";
}

Embedding parse_embedding(std::string_view s) {
  if (s == "angle-x") return Embedding::AngleX;
  if (s == "angle-y") return Embedding::AngleY;
  if (s == "angle-z") return Embedding::AngleZ;
  if (s == "amplitude") return Embedding::Amplitude;
  throw ConfigError("unknown embedding '" + std::string(s) + "'");
}

CnotMode parse_cnot_mode(std::string_view s) {
  if (s == "all") return CnotMode::All;
  if (s == "odd") return CnotMode::Odd;
  if (s == "even") return CnotMode::Even;
  if (s == "none") return CnotMode::None;
  throw ConfigError("unknown CNOT mode '" + std::string(s) + "'");
}

void SearchSpace::validate() const {
  if (embeddings.empty()) throw ConfigError("search space has no embeddings");
  if (cnot_modes.empty()) throw ConfigError("search space has no CNOT modes");
  if (n_min < 2 || n_max < n_min || n_max > qsim::kMaxQubits) throw ConfigError("invalid qubit range");
  if (depth_min < 1 || depth_max < depth_min) throw ConfigError("invalid depth range");
  if (!(lr_min > 0.0) || lr_max < lr_min) throw ConfigError("invalid learning-rate range");
  if (q_target < 2) throw ConfigError("qubit budget must be at least 2");
}

SearchSpace SearchSpace::images() { return SearchSpace{}; }

SearchSpace SearchSpace::iris() {
  SearchSpace s;
  s.depth_max = 5;
  s.q_target = 2;
  return s;
}

void Genome::validate() const {
  if (n < 2 || n > qsim::kMaxQubits) throw StructuralError("genome qubit count out of range");
  if (depth < 1) throw StructuralError("genome depth must be positive");
  if (layers.size() != static_cast<std::size_t>(depth)) throw StructuralError("genome layer count != depth");
  for (const auto& layer : layers) {
    if (layer.range < 1 || layer.range > n - 1) {
      throw StructuralError("entanglement range " + std::to_string(layer.range) + " outside [1, " +
                            std::to_string(n - 1) + "]");
    }
  }
  if (!(lr > 0.0) || !std::isfinite(lr)) throw StructuralError("genome learning rate must be positive");
}

void Genome::validate(const SearchSpace& space) const {
  validate();
  if (index_of(space.embeddings, embedding) < 0) throw StructuralError("embedding not in search space");
  if (n < space.n_min || n > space.n_max) throw StructuralError("qubit count outside search space");
  if (depth < space.depth_min || depth > space.depth_max) throw StructuralError("depth outside search space");
  for (const auto& layer : layers) {
    if (index_of(space.cnot_modes, layer.mode) < 0) throw StructuralError("CNOT mode not in search space");
  }
  if (lr < space.lr_min || lr > space.lr_max) throw StructuralError("learning rate outside search space");
}

std::string Genome::modes_string() const {
  std::string out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) out += '-';
    out += to_string(layers[i].mode);
  }
  return out;
}

std::string Genome::ranges_string() const {
  std::string out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(layers[i].range);
  }
  return out;
}

Genome sample(const SearchSpace& space, Rng& rng) {
  Genome g;
  g.embedding = space.embeddings[rng.below(space.embeddings.size())];
  g.n = rng.range(space.n_min, space.n_max);
  g.depth = rng.range(space.depth_min, space.depth_max);
  g.layers.clear();
  for (int l = 0; l < g.depth; ++l) {
    LayerGene layer;
    layer.range = rng.range(1, g.n - 1);
    layer.mode = space.cnot_modes[rng.below(space.cnot_modes.size())];
    g.layers.push_back(layer);
  }
  g.lr = space.lr_min == space.lr_max ? space.lr_min : rng.uniform(space.lr_min, space.lr_max);
  return g;
}

Genome decode(const RealVector& v, const SearchSpace& space) {
  if (v.size() != space.vector_length()) throw StructuralError("chromosome length does not match search space");
  Genome g;
  const int n_emb = static_cast<int>(space.embeddings.size());
  const int n_modes = static_cast<int>(space.cnot_modes.size());
  g.embedding = space.embeddings[quantize(v[kEmbedSlot], n_emb)];
  g.n = space.n_min + quantize(v[kQubitSlot], space.n_max - space.n_min + 1);
  g.depth = space.depth_min + quantize(v[kDepthSlot], space.depth_max - space.depth_min + 1);
  g.layers.clear();
  for (int l = 0; l < g.depth; ++l) {
    const std::size_t base = kLayerBase + 2 * static_cast<std::size_t>(l);
    g.layers.push_back({r_from_fraction(v[base], g.n), space.cnot_modes[quantize(v[base + 1], n_modes)]});
  }
  g.lr = space.lr_min + clamp01(v[v.size() - 1]) * (space.lr_max - space.lr_min);
  return g;
}

RealVector encode(const Genome& g, const SearchSpace& space) {
  g.validate(space);
  RealVector v{std::vector<double>(space.vector_length(), 0.0)};
  const int n_emb = static_cast<int>(space.embeddings.size());
  const int n_modes = static_cast<int>(space.cnot_modes.size());
  v[kEmbedSlot] = bin_center(index_of(space.embeddings, g.embedding), n_emb);
  v[kQubitSlot] = bin_center(g.n - space.n_min, space.n_max - space.n_min + 1);
  v[kDepthSlot] = bin_center(g.depth - space.depth_min, space.depth_max - space.depth_min + 1);
  for (int l = 0; l < space.depth_max; ++l) {
    const std::size_t base = kLayerBase + 2 * static_cast<std::size_t>(l);
    if (l < g.depth) {
      v[base] = r_fraction(g.layers[l].range, g.n);
      v[base + 1] = bin_center(index_of(space.cnot_modes, g.layers[l].mode), n_modes);
    } else {
      v[base] = 0.0;
      v[base + 1] = bin_center(0, n_modes);
    }
  }
  const double span = space.lr_max - space.lr_min;
  v[v.size() - 1] = span > 0 ? clamp01((g.lr - space.lr_min) / span) : 0.0;
  return v;
}

namespace detail {

std::pair<RealVector, RealVector> sbx_unclamped(const RealVector& p1, const RealVector& p2, double eta_c, Rng& rng,
                                                double crossover_prob, double component_prob) {
  if (p1.size() != p2.size()) throw StructuralError("SBX parents differ in length");
  RealVector c1 = p1, c2 = p2;
  if (!rng.bernoulli(crossover_prob)) return {c1, c2};
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (!rng.bernoulli(component_prob)) continue;
    const double u = rng.uniform();
    const double beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta_c + 1.0))
                                 : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta_c + 1.0));
    c1[i] = 0.5 * ((1.0 + beta) * p1[i] + (1.0 - beta) * p2[i]);
    c2[i] = 0.5 * ((1.0 - beta) * p1[i] + (1.0 + beta) * p2[i]);
  }
  return {c1, c2};
}

}  // namespace detail

std::pair<RealVector, RealVector> sbx_crossover(const RealVector& p1, const RealVector& p2, double eta_c, Rng& rng,
                                                double crossover_prob, double component_prob) {
  auto children = detail::sbx_unclamped(p1, p2, eta_c, rng, crossover_prob, component_prob);
  for (auto& x : children.first.values) x = clamp01(x);
  for (auto& x : children.second.values) x = clamp01(x);
  return children;
}

RealVector polynomial_mutation(const RealVector& v, double eta_m, double p_m, Rng& rng) {
  RealVector out = v;
  for (auto& x : out.values) {
    if (!rng.bernoulli(p_m)) continue;
    const double u = rng.uniform();
    const double delta = u < 0.5 ? std::pow(2.0 * u, 1.0 / (eta_m + 1.0)) - 1.0
                                 : 1.0 - std::pow(2.0 * (1.0 - u), 1.0 / (eta_m + 1.0));
    x = clamp01(x + delta);
  }
  return out;
}

}  // namespace qsearch
