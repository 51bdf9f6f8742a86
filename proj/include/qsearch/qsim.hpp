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

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace qsearch::qsim {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 12;

enum class Axis { X, Y, Z };

enum class Embedding { AngleX, AngleY, AngleZ, Amplitude };

// Rotation axis used by an angle embedding. Amplitude has none.
std::optional<Axis> embedding_axis(Embedding e);

// Dense n-qubit state. Qubit 0 is the least-significant bit of the basis index.
class StateVector {
 public:
  explicit StateVector(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }

  std::span<Complex> amplitudes() { return amps_; }
  std::span<const Complex> amplitudes() const { return amps_; }
  Complex& operator[](std::size_t i) { return amps_[i]; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const;
  Complex inner(const StateVector& other) const;  // <this|other>

 private:
  int n_qubits_;
  std::vector<Complex> amps_;
};

/// |0...0> on n qubits; throws ConfigError unless 1 <= n <= kMaxQubits.
StateVector new_zero_state(int n);

/// exp(-i theta P / 2) on one wire.
void apply_rotation(StateVector& state, Axis axis, int qubit, double theta);
void apply_cnot(StateVector& state, int control, int target);
/// Applies the bare Pauli P on one wire (used for generator insertion).
void apply_pauli(StateVector& state, Axis axis, int qubit);

/// Rotation about `axis` on wire i by angles[i]. Expects a fresh |0...0> state.
void angle_embed(StateVector& state, Axis axis, std::span<const double> angles);
/// Zero-pads `features` to 2^n and l2-normalizes it into the amplitudes.
void amplitude_embed(StateVector& state, std::span<const double> features);

/// <Z_i> for every wire i.
std::vector<double> expect_z_all(const StateVector& state);

enum class GateKind { RX, RY, RZ, CNOT };

struct GateOp {
  GateKind kind;
  int target;
  std::optional<int> control;      // CNOT only
  std::optional<int> param_index;  // rotations only

  static GateOp rotation(GateKind kind, int target, int param_index) {
    return {kind, target, std::nullopt, param_index};
  }
  static GateOp cnot(int control, int target) { return {GateKind::CNOT, target, control, std::nullopt}; }

  bool operator==(const GateOp&) const = default;
};

Axis rotation_axis(GateKind kind);

struct CircuitSpec {
  int n_qubits = 0;
  Embedding embedding = Embedding::AngleY;
  std::vector<GateOp> ops;  // executed after the embedding
  int n_params = 0;

  /// Throws StructuralError/IndexError when the op list breaks its invariants.
  void validate() const;

  /// Length of the embedded-input vector this circuit expects: n for angle
  /// embeddings, at most 2^n for amplitude.
  std::size_t input_width() const;
};

/// Embedding only (no variational ops).
StateVector prepare_state(const CircuitSpec& circuit, std::span<const double> input);

/// Embedding followed by every op.
StateVector run(const CircuitSpec& circuit, std::span<const double> params, std::span<const double> input);

std::vector<double> expectations(const CircuitSpec& circuit, std::span<const double> params,
                                 std::span<const double> input);

/// d(sum_i weights[i] <Z_i>)/d theta_k for every k in `wrt`, evaluated with the
/// two-term shift rule. Empty `weights` means all ones.
std::vector<double> grad_parameter_shift(const CircuitSpec& circuit, std::span<const double> params,
                                         std::span<const double> input, std::span<const int> wrt,
                                         std::span<const double> weights = {});

/// Full d<Z_i>/d theta_k Jacobian (rows = wires) via the shift rule.
std::vector<std::vector<double>> jacobian_parameter_shift(const CircuitSpec& circuit,
                                                          std::span<const double> params,
                                                          std::span<const double> input);

struct AdjointGradient {
  std::vector<double> params;  // d loss / d theta, length n_params
  std::vector<double> input;   // d loss / d embedded input, length of the input
};

/// Reverse-mode gradient of sum_i upstream[i] <Z_i>.
AdjointGradient grad_adjoint(const CircuitSpec& circuit, std::span<const double> params,
                             std::span<const double> input, std::span<const double> upstream);

/// Same, reusing an already simulated final state.
AdjointGradient grad_adjoint(const CircuitSpec& circuit, std::span<const double> params,
                             std::span<const double> input, const StateVector& final_state,
                             std::span<const double> upstream);

}  // namespace qsearch::qsim
