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

#include "qsearch/qsim.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsearch/errors.hpp"

namespace qsearch::qsim {

namespace {

void check_wire(const StateVector& state, int qubit) {
  if (qubit < 0 || qubit >= state.n_qubits()) {
    throw IndexError("qubit index " + std::to_string(qubit) + " out of range for " +
                     std::to_string(state.n_qubits()) + "-qubit state");
  }
}

// Visits every (i0, i1) amplitude pair that differs only in bit `qubit`.
template <typename F>
void for_each_pair(StateVector& state, int qubit, F&& f) {
  const std::size_t stride = std::size_t{1} << qubit;
  const std::size_t dim = state.dim();
  auto amps = state.amplitudes();
  for (std::size_t block = 0; block < dim; block += 2 * stride) {
    for (std::size_t i = block; i < block + stride; ++i) {
      f(amps[i], amps[i + stride]);
    }
  }
}

void apply_rotation_unchecked(StateVector& state, Axis axis, int qubit, double theta) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  switch (axis) {
    case Axis::X:
      for_each_pair(state, qubit, [c, s](Complex& a0, Complex& a1) {
        const Complex b0 = a0, b1 = a1;
        // [[c, -is], [-is, c]]
        a0 = c * b0 + Complex(s * b1.imag(), -s * b1.real());
        a1 = Complex(s * b0.imag(), -s * b0.real()) + c * b1;
      });
      break;
    case Axis::Y:
      for_each_pair(state, qubit, [c, s](Complex& a0, Complex& a1) {
        const Complex b0 = a0, b1 = a1;
        a0 = c * b0 - s * b1;
        a1 = s * b0 + c * b1;
      });
      break;
    case Axis::Z: {
      const Complex lo(c, -s), hi(c, s);
      for_each_pair(state, qubit, [lo, hi](Complex& a0, Complex& a1) {
        a0 *= lo;
        a1 *= hi;
      });
      break;
    }
  }
}

void apply_cnot_unchecked(StateVector& state, int control, int target) {
  const std::size_t cmask = std::size_t{1} << control;
  const std::size_t tmask = std::size_t{1} << target;
  auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    // Visit each swapped pair once, from the member with the target bit clear.
    if ((i & cmask) && !(i & tmask)) std::swap(amps[i], amps[i | tmask]);
  }
}

void apply_op(StateVector& state, const GateOp& op, std::span<const double> params, bool inverse) {
  if (op.kind == GateKind::CNOT) {
    apply_cnot_unchecked(state, *op.control, op.target);
    return;
  }
  const double theta = params[static_cast<std::size_t>(*op.param_index)];
  apply_rotation_unchecked(state, rotation_axis(op.kind), op.target, inverse ? -theta : theta);
}

// sum_i w_i Z_i |psi>; Z-sums are diagonal, so this is a per-amplitude scale.
StateVector apply_weighted_z(const StateVector& psi, std::span<const double> weights) {
  StateVector out = psi;
  const int n = psi.n_qubits();
  for (std::size_t i = 0; i < psi.dim(); ++i) {
    double diag = 0.0;
    for (int q = 0; q < n; ++q) diag += ((i >> q) & 1U) ? -weights[q] : weights[q];
    out[i] *= diag;
  }
  return out;
}

void check_params(const CircuitSpec& circuit, std::span<const double> params) {
  if (params.size() != static_cast<std::size_t>(circuit.n_params)) {
    throw StructuralError("expected " + std::to_string(circuit.n_params) + " circuit parameters, got " +
                          std::to_string(params.size()));
  }
}

}  // namespace

std::optional<Axis> embedding_axis(Embedding e) {
  switch (e) {
    case Embedding::AngleX: return Axis::X;
    case Embedding::AngleY: return Axis::Y;
    case Embedding::AngleZ: return Axis::Z;
    case Embedding::Amplitude: return std::nullopt;
  }
  return std::nullopt;
}

Axis rotation_axis(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return Axis::X;
    case GateKind::RY: return Axis::Y;
    case GateKind::RZ: return Axis::Z;
    case GateKind::CNOT: break;
  }
  throw StructuralError("CNOT has no rotation axis");
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw ConfigError("qubit count " + std::to_string(n_qubits) + " outside [1, " +
                      std::to_string(kMaxQubits) + "]");
  }
  amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  amps_[0] = 1.0;
}

double StateVector::norm_squared() const {
  double acc = 0.0;
  for (const auto& a : amps_) acc += std::norm(a);
  return acc;
}

Complex StateVector::inner(const StateVector& other) const {
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < amps_.size(); ++i) acc += std::conj(amps_[i]) * other.amps_[i];
  return acc;
}

StateVector new_zero_state(int n) { return StateVector(n); }

void apply_rotation(StateVector& state, Axis axis, int qubit, double theta) {
  if (!std::isfinite(theta)) throw NumericError("rotation angle is not finite");
  check_wire(state, qubit);
  apply_rotation_unchecked(state, axis, qubit, theta);
}

void apply_cnot(StateVector& state, int control, int target) {
  check_wire(state, control);
  check_wire(state, target);
  if (control == target) throw StructuralError("CNOT control and target coincide");
  apply_cnot_unchecked(state, control, target);
}

void apply_pauli(StateVector& state, Axis axis, int qubit) {
  check_wire(state, qubit);
  switch (axis) {
    case Axis::X:
      for_each_pair(state, qubit, [](Complex& a0, Complex& a1) { std::swap(a0, a1); });
      break;
    case Axis::Y:
      for_each_pair(state, qubit, [](Complex& a0, Complex& a1) {
        const Complex b0 = a0;
        a0 = Complex(a1.imag(), -a1.real());  // -i * a1
        a1 = Complex(-b0.imag(), b0.real());  //  i * a0
      });
      break;
    case Axis::Z:
      for_each_pair(state, qubit, [](Complex&, Complex& a1) { a1 = -a1; });
      break;
  }
}

void angle_embed(StateVector& state, Axis axis, std::span<const double> angles) {
  if (angles.size() != static_cast<std::size_t>(state.n_qubits())) {
    throw StructuralError("angle embedding expects " + std::to_string(state.n_qubits()) + " angles, got " +
                          std::to_string(angles.size()));
  }
  for (int q = 0; q < state.n_qubits(); ++q) apply_rotation(state, axis, q, angles[q]);
}

void amplitude_embed(StateVector& state, std::span<const double> features) {
  if (features.size() > state.dim()) {
    throw StructuralError("amplitude embedding got " + std::to_string(features.size()) +
                          " features for a state of dimension " + std::to_string(state.dim()));
  }
  double norm2 = 0.0;
  for (double f : features) {
    if (!std::isfinite(f)) throw NumericError("amplitude feature is not finite");
    norm2 += f * f;
  }
  if (norm2 == 0.0) throw DegenerateInputError("amplitude embedding of an all-zero feature vector");
  const double inv = 1.0 / std::sqrt(norm2);
  auto amps = state.amplitudes();
  std::fill(amps.begin(), amps.end(), Complex{0.0, 0.0});
  for (std::size_t i = 0; i < features.size(); ++i) amps[i] = features[i] * inv;
}

std::vector<double> expect_z_all(const StateVector& state) {
  const int n = state.n_qubits();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < state.dim(); ++i) {
    const double p = std::norm(state[i]);
    for (int q = 0; q < n; ++q) out[q] += ((i >> q) & 1U) ? -p : p;
  }
  return out;
}

void CircuitSpec::validate() const {
  if (n_qubits < 1 || n_qubits > kMaxQubits) throw ConfigError("circuit qubit count out of range");
  if (n_params < 0) throw StructuralError("negative parameter count");
  std::vector<int> seen(static_cast<std::size_t>(n_params), 0);
  for (const auto& op : ops) {
    if (op.target < 0 || op.target >= n_qubits) throw IndexError("gate target out of range");
    if (op.kind == GateKind::CNOT) {
      if (!op.control) throw StructuralError("CNOT without control");
      if (*op.control < 0 || *op.control >= n_qubits) throw IndexError("CNOT control out of range");
      if (*op.control == op.target) throw StructuralError("CNOT control and target coincide");
      if (op.param_index) throw StructuralError("CNOT carries a parameter index");
    } else {
      if (op.control) throw StructuralError("rotation carries a control");
      if (!op.param_index) throw StructuralError("rotation without parameter index");
      if (*op.param_index < 0 || *op.param_index >= n_params) throw IndexError("parameter index out of range");
      if (seen[static_cast<std::size_t>(*op.param_index)]++) throw StructuralError("parameter index reused");
    }
  }
  for (int count : seen) {
    if (count != 1) throw StructuralError("parameter index never used");
  }
}

std::size_t CircuitSpec::input_width() const {
  return embedding == Embedding::Amplitude ? (std::size_t{1} << n_qubits) : static_cast<std::size_t>(n_qubits);
}

StateVector prepare_state(const CircuitSpec& circuit, std::span<const double> input) {
  StateVector state(circuit.n_qubits);
  if (auto axis = embedding_axis(circuit.embedding)) {
    angle_embed(state, *axis, input);
  } else {
    amplitude_embed(state, input);
  }
  return state;
}

StateVector run(const CircuitSpec& circuit, std::span<const double> params, std::span<const double> input) {
  check_params(circuit, params);
  StateVector state = prepare_state(circuit, input);
  for (const auto& op : circuit.ops) apply_op(state, op, params, false);
  return state;
}

std::vector<double> expectations(const CircuitSpec& circuit, std::span<const double> params,
                                 std::span<const double> input) {
  return expect_z_all(run(circuit, params, input));
}

std::vector<double> grad_parameter_shift(const CircuitSpec& circuit, std::span<const double> params,
                                         std::span<const double> input, std::span<const int> wrt,
                                         std::span<const double> weights) {
  check_params(circuit, params);
  std::vector<double> w(weights.begin(), weights.end());
  if (w.empty()) w.assign(circuit.n_qubits, 1.0);
  if (w.size() != static_cast<std::size_t>(circuit.n_qubits)) throw StructuralError("weight vector width mismatch");

  auto weighted = [&](std::span<const double> p) {
    const auto z = expectations(circuit, p, input);
    double e = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) e += w[i] * z[i];
    return e;
  };

  std::vector<double> shifted(params.begin(), params.end());
  std::vector<double> grad;
  grad.reserve(wrt.size());
  constexpr double kShift = std::numbers::pi / 2;
  for (int k : wrt) {
    if (k < 0 || k >= circuit.n_params) throw IndexError("gradient index " + std::to_string(k) + " out of range");
    const double orig = shifted[k];
    shifted[k] = orig + kShift;
    const double plus = weighted(shifted);
    shifted[k] = orig - kShift;
    const double minus = weighted(shifted);
    shifted[k] = orig;
    grad.push_back((plus - minus) / 2);
  }
  return grad;
}

std::vector<std::vector<double>> jacobian_parameter_shift(const CircuitSpec& circuit,
                                                          std::span<const double> params,
                                                          std::span<const double> input) {
  std::vector<int> all(static_cast<std::size_t>(circuit.n_params));
  for (int k = 0; k < circuit.n_params; ++k) all[k] = k;
  std::vector<std::vector<double>> jac;
  std::vector<double> w(circuit.n_qubits, 0.0);
  for (int q = 0; q < circuit.n_qubits; ++q) {
    w[q] = 1.0;
    jac.push_back(grad_parameter_shift(circuit, params, input, all, w));
    w[q] = 0.0;
  }
  return jac;
}

AdjointGradient grad_adjoint(const CircuitSpec& circuit, std::span<const double> params,
                             std::span<const double> input, std::span<const double> upstream) {
  return grad_adjoint(circuit, params, input, run(circuit, params, input), upstream);
}

AdjointGradient grad_adjoint(const CircuitSpec& circuit, std::span<const double> params,
                             std::span<const double> input, const StateVector& final_state,
                             std::span<const double> upstream) {
  check_params(circuit, params);
  if (upstream.size() != static_cast<std::size_t>(circuit.n_qubits)) {
    throw StructuralError("upstream gradient width does not match qubit count");
  }
  AdjointGradient out;
  out.params.assign(static_cast<std::size_t>(circuit.n_params), 0.0);
  out.input.assign(input.size(), 0.0);

  StateVector psi = final_state;
  StateVector lambda = apply_weighted_z(psi, upstream);

  // d<psi|H|psi>/dtheta for U = exp(-i theta P/2) is Im <lambda| P |psi>,
  // with both vectors taken just after the gate.
  auto generator_term = [&](Axis axis, int qubit) {
    StateVector mu = psi;
    apply_pauli(mu, axis, qubit);
    return lambda.inner(mu).imag();
  };

  for (auto it = circuit.ops.rbegin(); it != circuit.ops.rend(); ++it) {
    if (it->kind != GateKind::CNOT) {
      out.params[static_cast<std::size_t>(*it->param_index)] = generator_term(rotation_axis(it->kind), it->target);
    }
    apply_op(psi, *it, params, true);
    apply_op(lambda, *it, params, true);
  }

  if (auto axis = embedding_axis(circuit.embedding)) {
    for (int q = circuit.n_qubits - 1; q >= 0; --q) {
      out.input[q] = generator_term(*axis, q);
      apply_rotation_unchecked(psi, *axis, q, -input[q]);
      apply_rotation_unchecked(lambda, *axis, q, -input[q]);
    }
  } else {
    // psi is now the normalized real input u = x/|x|; dE/du_j = 2 Re lambda_j.
    // Chain through normalization: dE/dx = (g - u (u.g)) / |x|.
    double norm2 = 0.0;
    for (double f : input) norm2 += f * f;
    const double norm = std::sqrt(norm2);
    double ug = 0.0;
    std::vector<double> g(input.size());
    for (std::size_t j = 0; j < input.size(); ++j) {
      g[j] = 2.0 * lambda[j].real();
      ug += psi[j].real() * g[j];
    }
    for (std::size_t j = 0; j < input.size(); ++j) out.input[j] = (g[j] - psi[j].real() * ug) / norm;
  }
  return out;
}

}  // namespace qsearch::qsim
