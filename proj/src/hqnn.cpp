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

#include "qsearch/hqnn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qsearch/errors.hpp"

namespace qsearch::hqnn {

namespace {

using qsim::GateKind;
using qsim::GateOp;

// y = W x + b with W stored row-major (out x in).
void affine(std::span<const double> w, std::span<const double> b, std::span<const double> x, std::span<double> y) {
  const std::size_t in = x.size();
  for (std::size_t o = 0; o < y.size(); ++o) {
    y[o] = b[o] + std::inner_product(x.begin(), x.end(), w.begin() + static_cast<std::ptrdiff_t>(o * in), 0.0);
  }
}

// Accumulates dW += dy x^T, db += dy and returns W^T dy.
std::vector<double> affine_backward(std::span<const double> w, std::span<const double> x, std::span<const double> dy,
                                    std::span<double> dw, std::span<double> db) {
  const std::size_t in = x.size();
  std::vector<double> dx(in, 0.0);
  for (std::size_t o = 0; o < dy.size(); ++o) {
    db[o] += dy[o];
    for (std::size_t i = 0; i < in; ++i) {
      dw[o * in + i] += dy[o] * x[i];
      dx[i] += w[o * in + i] * dy[o];
    }
  }
  return dx;
}

int argmax(std::span<const double> v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Returns the loss and overwrites `logits` with softmax probabilities.
double softmax_cross_entropy(std::span<double> logits, int label) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& l : logits) {
    l = std::exp(l - peak);
    sum += l;
  }
  for (double& l : logits) l /= sum;
  return -std::log(std::max(logits[static_cast<std::size_t>(label)], 1e-300));
}

}  // namespace

std::vector<Pair> entangling_pairs(int n, int range, CnotMode mode) {
  if (n < 2 || range < 1 || range >= n) {
    throw StructuralError("entangling range " + std::to_string(range) + " outside [1, " + std::to_string(n - 1) + "]");
  }
  std::vector<Pair> pairs;
  if (mode == CnotMode::None) return pairs;
  for (int i = 0; i < n; ++i) {
    if (mode == CnotMode::Odd && i % 2 == 0) continue;
    if (mode == CnotMode::Even && i % 2 == 1) continue;
    pairs.emplace_back(i, (i + range) % n);
  }
  return pairs;
}

std::vector<std::vector<Pair>> layer_pairs(const Genome& g) {
  std::vector<std::vector<Pair>> out;
  for (const auto& layer : g.layers) out.push_back(entangling_pairs(g.n, layer.range, layer.mode));
  return out;
}

qsim::CircuitSpec build_circuit(const Genome& g) {
  g.validate();
  qsim::CircuitSpec c;
  c.n_qubits = g.n;
  c.embedding = g.embedding;
  int param = 0;
  for (const auto& pairs : layer_pairs(g)) {
    for (int q = 0; q < g.n; ++q) {
      for (auto kind : {GateKind::RX, GateKind::RY, GateKind::RZ}) c.ops.push_back(GateOp::rotation(kind, q, param++));
    }
    for (auto [control, target] : pairs) c.ops.push_back(GateOp::cnot(control, target));
  }
  c.n_params = param;
  c.validate();
  return c;
}

GateCensus gate_census(const qsim::CircuitSpec& circuit) {
  // One state-preparation gate per wire for every embedding kind.
  GateCensus census{static_cast<std::size_t>(circuit.n_qubits), 0};
  for (const auto& op : circuit.ops) (op.kind == GateKind::CNOT ? census.cnot : census.single_qubit)++;
  return census;
}

double gate_cost_per_sample(const qsim::CircuitSpec& circuit) {
  const auto census = gate_census(circuit);
  return 10.0 * static_cast<double>(census.single_qubit) + 100.0 * static_cast<double>(census.cnot);
}

HqnnModel::HqnnModel(Genome genome, std::size_t input_dim, int n_classes, ModelOptions options, Rng& rng)
    : genome_(std::move(genome)), circuit_(build_circuit(genome_)), input_dim_(input_dim), n_classes_(n_classes) {
  if (input_dim == 0) throw StructuralError("model input dimension must be positive");
  if (n_classes < 2) throw StructuralError("need at least two classes");
  const auto n = static_cast<std::size_t>(genome_.n);
  if (genome_.embedding != Embedding::Amplitude) {
    pre_head_ = PreHead::Linear;
    encode_width_ = n;
    pre1_w_ = add_block(n * input_dim);
    pre1_b_ = add_block(n);
  } else if (options.amplitude_hidden_width > 0) {
    pre_head_ = PreHead::Hidden;
    hidden_ = static_cast<std::size_t>(options.amplitude_hidden_width);
    encode_width_ = std::size_t{1} << n;
    pre1_w_ = add_block(hidden_ * input_dim);
    pre1_b_ = add_block(hidden_);
    pre2_w_ = add_block(encode_width_ * hidden_);
    pre2_b_ = add_block(encode_width_);
  } else {
    pre_head_ = PreHead::Identity;
    encode_width_ = input_dim;
    if (input_dim > (std::size_t{1} << n)) {
      throw StructuralError("amplitude input of width " + std::to_string(input_dim) + " does not fit " +
                            std::to_string(n) + " qubits");
    }
  }
  theta_ = add_block(static_cast<std::size_t>(circuit_.n_params));
  post_w_ = add_block(static_cast<std::size_t>(n_classes) * n);
  post_b_ = add_block(static_cast<std::size_t>(n_classes));

  auto init_uniform = [&](Block b, double bound) {
    for (auto& w : slice(b)) w = rng.uniform(-bound, bound);
  };
  const double in_bound = 1.0 / std::sqrt(static_cast<double>(input_dim));
  if (pre_head_ != PreHead::Identity) {
    init_uniform(pre1_w_, in_bound);
    init_uniform(pre1_b_, in_bound);
  }
  if (pre_head_ == PreHead::Hidden) {
    const double h_bound = 1.0 / std::sqrt(static_cast<double>(hidden_));
    init_uniform(pre2_w_, h_bound);
    init_uniform(pre2_b_, h_bound);
  }
  init_uniform(theta_, std::numbers::pi);
  const double z_bound = 1.0 / std::sqrt(static_cast<double>(n));
  init_uniform(post_w_, z_bound);
  init_uniform(post_b_, z_bound);
}

HqnnModel::Block HqnnModel::add_block(std::size_t size) {
  Block b{params_.size(), size};
  params_.resize(params_.size() + size, 0.0);
  return b;
}

std::vector<double> HqnnModel::circuit_input(std::span<const double> features) const {
  if (features.size() != input_dim_) {
    throw StructuralError("feature width " + std::to_string(features.size()) + " != model input " +
                          std::to_string(input_dim_));
  }
  switch (pre_head_) {
    case PreHead::Identity:
      return {features.begin(), features.end()};
    case PreHead::Linear: {
      std::vector<double> out(encode_width_);
      affine(slice(pre1_w_), slice(pre1_b_), features, out);
      return out;
    }
    case PreHead::Hidden: {
      std::vector<double> h(hidden_), out(encode_width_);
      affine(slice(pre1_w_), slice(pre1_b_), features, h);
      for (double& v : h) v = std::tanh(v);
      affine(slice(pre2_w_), slice(pre2_b_), h, out);
      return out;
    }
  }
  return {};
}

std::vector<double> HqnnModel::forward(std::span<const double> features) const {
  const auto input = circuit_input(features);
  const auto z = qsim::expectations(circuit_, theta(), input);
  std::vector<double> logits(static_cast<std::size_t>(n_classes_));
  affine(slice(post_w_), slice(post_b_), z, logits);
  return logits;
}

double HqnnModel::loss(std::span<const double> features, int label) const {
  auto logits = forward(features);
  return softmax_cross_entropy(logits, label);
}

double HqnnModel::loss_and_gradient(std::span<const double> features, int label, std::span<double> grad,
                                    int* predicted) const {
  if (grad.size() != params_.size()) throw StructuralError("gradient buffer size mismatch");
  if (label < 0 || label >= n_classes_) throw IndexError("label out of range");
  if (features.size() != input_dim_) throw StructuralError("feature width mismatch");

  std::vector<double> hidden;
  std::vector<double> input;
  switch (pre_head_) {
    case PreHead::Identity:
      input.assign(features.begin(), features.end());
      break;
    case PreHead::Linear:
      input.resize(encode_width_);
      affine(slice(pre1_w_), slice(pre1_b_), features, input);
      break;
    case PreHead::Hidden:
      hidden.resize(hidden_);
      input.resize(encode_width_);
      affine(slice(pre1_w_), slice(pre1_b_), features, hidden);
      for (double& v : hidden) v = std::tanh(v);
      affine(slice(pre2_w_), slice(pre2_b_), hidden, input);
      break;
  }

  const auto state = qsim::run(circuit_, theta(), input);
  const auto z = qsim::expect_z_all(state);
  std::vector<double> probs(static_cast<std::size_t>(n_classes_));
  affine(slice(post_w_), slice(post_b_), z, probs);
  if (predicted != nullptr) *predicted = argmax(probs);
  const double loss_value = softmax_cross_entropy(probs, label);

  auto g = [&](Block b) { return std::span<double>(grad.data() + b.offset, b.size); };
  std::vector<double> dlogits = probs;
  dlogits[static_cast<std::size_t>(label)] -= 1.0;
  const auto dz = affine_backward(slice(post_w_), z, dlogits, g(post_w_), g(post_b_));

  const auto adj = qsim::grad_adjoint(circuit_, theta(), input, state, dz);
  auto dtheta = g(theta_);
  for (std::size_t k = 0; k < dtheta.size(); ++k) dtheta[k] += adj.params[k];

  switch (pre_head_) {
    case PreHead::Identity:
      break;
    case PreHead::Linear:
      affine_backward(slice(pre1_w_), features, adj.input, g(pre1_w_), g(pre1_b_));
      break;
    case PreHead::Hidden: {
      auto dh = affine_backward(slice(pre2_w_), hidden, adj.input, g(pre2_w_), g(pre2_b_));
      for (std::size_t i = 0; i < dh.size(); ++i) dh[i] *= 1.0 - hidden[i] * hidden[i];
      affine_backward(slice(pre1_w_), features, dh, g(pre1_w_), g(pre1_b_));
      break;
    }
  }
  return loss_value;
}

TrainReport train(HqnnModel& model, const data::Dataset& train_set, const TrainOptions& options, Rng& rng,
                  const data::Dataset* val) {
  if (train_set.size() == 0) throw DataError("empty training set");
  if (options.epochs < 1) throw ConfigError("epochs must be at least 1");
  if (options.batch_size == 0) throw ConfigError("batch size must be positive");

  auto params = model.parameters();
  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0), grad(params.size());
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  long step = 0;

  TrainReport report;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    double loss_sum = 0.0;
    std::size_t used = 0, correct = 0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t stop = std::min(order.size(), start + options.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      std::size_t batch_used = 0;
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t idx = order[k];
        int predicted = -1;
        try {
          loss_sum += model.loss_and_gradient(train_set.row(idx), train_set.labels[idx], grad, &predicted);
        } catch (const DegenerateInputError&) {
          ++report.skipped_samples;
          continue;
        }
        ++batch_used;
        if (predicted == train_set.labels[idx]) ++correct;
      }
      if (!std::isfinite(loss_sum)) throw NumericError("training diverged: non-finite loss");
      if (batch_used == 0) continue;
      used += batch_used;
      ++step;
      const double scale = 1.0 / static_cast<double>(batch_used);
      const double bc1 = 1.0 - std::pow(options.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(options.beta2, static_cast<double>(step));
      for (std::size_t p = 0; p < params.size(); ++p) {
        const double gp = grad[p] * scale;
        m[p] = options.beta1 * m[p] + (1.0 - options.beta1) * gp;
        v[p] = options.beta2 * v[p] + (1.0 - options.beta2) * gp * gp;
        params[p] -= options.lr * (m[p] / bc1) / (std::sqrt(v[p] / bc2) + options.epsilon);
      }
    }
    report.train_loss.push_back(used ? loss_sum / static_cast<double>(used) : 0.0);
    report.train_acc.push_back(used ? static_cast<double>(correct) / static_cast<double>(used) : 0.0);
    if (val != nullptr) {
      const auto r = evaluate(model, *val);
      report.val_acc.push_back(r.val_acc);
      report.val_loss.push_back(r.mean_loss);
      report.t_val = r.t_val;
      report.n_val = r.n_val;
      report.gate_cost = r.gate_cost;
    }
    ++report.epochs;
  }
  return report;
}

EvalResult evaluate(const HqnnModel& model, const data::Dataset& val_set) {
  if (val_set.size() == 0) throw DataError("empty validation set");
  EvalResult r;
  std::size_t correct = 0;
  double loss_sum = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < val_set.size(); ++i) {
    try {
      auto logits = model.forward(val_set.row(i));
      if (argmax(logits) == val_set.labels[i]) ++correct;
      loss_sum += softmax_cross_entropy(logits, val_set.labels[i]);
    } catch (const DegenerateInputError&) {
      // counted as a miss
    }
  }
  r.t_val = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.n_val = val_set.size();
  r.val_acc = static_cast<double>(correct) / static_cast<double>(r.n_val);
  r.mean_loss = loss_sum / static_cast<double>(r.n_val);
  r.gate_cost = static_cast<double>(r.n_val) * gate_cost_per_sample(model.circuit());
  return r;
}

}  // namespace qsearch::hqnn
