// Copyright 2026 The mbpurify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mbpurify/pauli.hpp"

namespace mbpurify {

enum class GateKind : uint8_t { H, S, Sdg, X, Y, Z, CNOT, CZ, Swap };

struct Gate {
  GateKind kind;
  uint32_t a = 0;
  uint32_t b = 0;  // second qubit for CNOT/CZ/Swap

  static Gate h(uint32_t q) { return {GateKind::H, q, 0}; }
  static Gate s(uint32_t q) { return {GateKind::S, q, 0}; }
  static Gate sdg(uint32_t q) { return {GateKind::Sdg, q, 0}; }
  static Gate x(uint32_t q) { return {GateKind::X, q, 0}; }
  static Gate y(uint32_t q) { return {GateKind::Y, q, 0}; }
  static Gate z(uint32_t q) { return {GateKind::Z, q, 0}; }
  static Gate cnot(uint32_t c, uint32_t t) { return {GateKind::CNOT, c, t}; }
  static Gate cz(uint32_t a, uint32_t b) { return {GateKind::CZ, a, b}; }
  static Gate swap(uint32_t a, uint32_t b) { return {GateKind::Swap, a, b}; }

  bool is_two_qubit() const {
    return kind == GateKind::CNOT || kind == GateKind::CZ || kind == GateKind::Swap;
  }
};

enum class Basis : uint8_t { X, Y, Z };

inline PauliKind basis_pauli(Basis b) {
  switch (b) {
    case Basis::X: return PauliKind::X;
    case Basis::Y: return PauliKind::Y;
    case Basis::Z: return PauliKind::Z;
  }
  throw std::logic_error("bad basis");
}

struct PauliMeasurement {
  uint32_t qubit;
  Basis basis;
};

/// Ordered Clifford circuit: H/S/CNOT/CZ/Pauli gates interleaved with
/// single-qubit Pauli measurements, in execution order.
struct CliffordCircuit {
  size_t n_qubits = 0;
  std::vector<std::variant<Gate, PauliMeasurement>> ops;

  explicit CliffordCircuit(size_t n = 0) : n_qubits(n) {}

  void add_gate(Gate g) {
    check_index(g.a);
    if (g.is_two_qubit()) {
      check_index(g.b);
      if (g.a == g.b) throw std::invalid_argument("two-qubit gate needs distinct qubits");
    }
    ops.emplace_back(g);
  }

  void add_measurement(uint32_t qubit, Basis basis) {
    check_index(qubit);
    ops.emplace_back(PauliMeasurement{qubit, basis});
  }

  std::vector<Gate> gates() const {
    std::vector<Gate> out;
    for (const auto& op : ops) {
      if (const Gate* g = std::get_if<Gate>(&op)) out.push_back(*g);
    }
    return out;
  }

  std::vector<PauliMeasurement> measurements() const {
    std::vector<PauliMeasurement> out;
    for (const auto& op : ops) {
      if (const PauliMeasurement* m = std::get_if<PauliMeasurement>(&op)) out.push_back(*m);
    }
    return out;
  }

  size_t count_two_qubit_gates() const {
    size_t c = 0;
    for (const auto& op : ops) {
      if (const Gate* g = std::get_if<Gate>(&op)) {
        if (g->is_two_qubit()) ++c;
      }
    }
    return c;
  }

 private:
  void check_index(uint32_t q) const {
    if (q >= n_qubits) throw std::out_of_range("qubit index out of range");
  }
};

}  // namespace mbpurify
