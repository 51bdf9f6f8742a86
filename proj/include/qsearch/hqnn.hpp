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
#include <span>
#include <utility>
#include <vector>

#include "qsearch/data.hpp"
#include "qsearch/genome.hpp"
#include "qsearch/qsim.hpp"
#include "qsearch/rng.hpp"

namespace qsearch::hqnn {

using Pair = std::pair<int, int>;  // (control, target)

/// {(i, (i + r) mod n)} filtered by mode on the control index, in increasing control order.
std::vector<Pair> entangling_pairs(int n, int range, CnotMode mode);

/// Per-layer CNOT pairs of a genome.
std::vector<std::vector<Pair>> layer_pairs(const Genome& g);

/// Per layer: RX, RY, RZ on every qubit (qubit-major, 3n parameters), then the
/// layer's CNOTs.
qsim::CircuitSpec build_circuit(const Genome& g);

struct GateCensus {
  std::size_t single_qubit = 0;  // embedding rotations + variational rotations
  std::size_t cnot = 0;
};

GateCensus gate_census(const qsim::CircuitSpec& circuit);

/// 10 units per single-qubit gate, 100 per CNOT.
double gate_cost_per_sample(const qsim::CircuitSpec& circuit);

struct ModelOptions {
  // Amplitude pre-head: identity by default, or linear -> tanh -> linear with
  // this many hidden units when hidden_width > 0.
  int amplitude_hidden_width = 0;
};

// Classical pre-head, variational circuit, linear read-out over <Z>.
// All trainable values live in one flat vector so optimizers and gradient
// checks can treat the model uniformly.
class HqnnModel {
 public:
  HqnnModel(Genome genome, std::size_t input_dim, int n_classes, ModelOptions options, Rng& rng);

  const Genome& genome() const { return genome_; }
  const qsim::CircuitSpec& circuit() const { return circuit_; }
  std::size_t input_dim() const { return input_dim_; }
  int n_classes() const { return n_classes_; }
  int n_qubits() const { return genome_.n; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> theta() { return slice(theta_); }
  std::span<double> post_weights() { return slice(post_w_); }
  std::span<double> post_bias() { return slice(post_b_); }
  std::span<const double> theta() const { return slice(theta_); }

  /// Embedded circuit input produced by the pre-head.
  std::vector<double> circuit_input(std::span<const double> features) const;
  std::vector<double> forward(std::span<const double> features) const;

  /// Softmax cross-entropy of one sample; adds d loss/d parameters into `grad`.
  /// Optionally reports the argmax class of the logits.
  double loss_and_gradient(std::span<const double> features, int label, std::span<double> grad,
                           int* predicted = nullptr) const;
  double loss(std::span<const double> features, int label) const;

 private:
  struct Block {
    std::size_t offset = 0;
    std::size_t size = 0;
  };
  enum class PreHead { Linear, Identity, Hidden };

  std::span<double> slice(Block b) { return {params_.data() + b.offset, b.size}; }
  std::span<const double> slice(Block b) const { return {params_.data() + b.offset, b.size}; }
  Block add_block(std::size_t size);

  Genome genome_;
  qsim::CircuitSpec circuit_;
  std::size_t input_dim_;
  int n_classes_;
  PreHead pre_head_;
  std::size_t hidden_ = 0;
  std::size_t encode_width_;
  std::vector<double> params_;
  Block pre1_w_, pre1_b_, pre2_w_, pre2_b_, theta_, post_w_, post_b_;
};

struct TrainOptions {
  int epochs = 1;
  double lr = 1e-3;
  std::size_t batch_size = 32;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainReport {
  int epochs = 0;
  std::vector<double> train_loss;  // mean per epoch
  std::vector<double> train_acc;
  std::vector<double> val_acc;     // per epoch, empty without a validation set
  std::vector<double> val_loss;
  double t_val = 0.0;
  std::size_t n_val = 0;
  double gate_cost = 0.0;
  std::size_t skipped_samples = 0;
};

/// Mini-batch Adam on softmax cross-entropy. Throws NumericError when the
/// loss becomes non-finite. When `val` is given, accuracy is recorded after
/// every epoch.
TrainReport train(HqnnModel& model, const data::Dataset& train_set, const TrainOptions& options, Rng& rng,
                  const data::Dataset* val = nullptr);

struct EvalResult {
  double val_acc = 0.0;
  double t_val = 0.0;  // seconds around the whole loop
  std::size_t n_val = 0;
  double gate_cost = 0.0;
  double mean_loss = 0.0;
};

/// Argmax accuracy. Degenerate samples count as misclassified.
EvalResult evaluate(const HqnnModel& model, const data::Dataset& val_set);

}  // namespace qsearch::hqnn
