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

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "mbpurify/gf2.hpp"

namespace mbpurify {

enum class PauliKind : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// n-qubit Pauli operator stored as i^phase_exp * prod_j X_j^{x_j} Z_j^{z_j},
/// with x and z bit-packed 64 qubits per word. A Hermitian Pauli (one with a
/// +/-1 prefactor in the usual IXYZ notation) satisfies
/// phase_exp == popcount(x & z) (mod 2); each Y contributes one factor of i.
class PauliOperator {
 public:
  PauliOperator() = default;
  explicit PauliOperator(size_t n) : n_(n), x_(n), z_(n), phase_exp_(0) {}

  static PauliOperator identity(size_t n) { return PauliOperator(n); }

  /// Single-qubit Pauli with +1 sign on an n-qubit register.
  static PauliOperator single(size_t n, size_t qubit, PauliKind k) {
    PauliOperator p(n);
    p.set_pauli(qubit, k);
    return p;
  }

  /// Parses strings like "XIZY", "-XX", "+iZ".
  static PauliOperator from_string(const std::string& s) {
    size_t pos = 0;
    uint8_t phase = 0;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      if (s[pos] == '-') phase = 2;
      ++pos;
    }
    if (pos < s.size() && s[pos] == 'i') {
      phase = (phase + 1) & 3;
      ++pos;
    }
    PauliOperator p(s.size() - pos);
    for (size_t q = 0; pos < s.size(); ++q, ++pos) {
      switch (s[pos]) {
        case 'I': break;
        case 'X': p.set_pauli(q, PauliKind::X); break;
        case 'Y': p.set_pauli(q, PauliKind::Y); break;
        case 'Z': p.set_pauli(q, PauliKind::Z); break;
        default: throw std::invalid_argument("invalid Pauli character");
      }
    }
    p.phase_exp_ = (p.phase_exp_ + phase) & 3;
    return p;
  }

  size_t n_qubits() const { return n_; }
  bool x_bit(size_t q) const { return x_.get(q); }
  bool z_bit(size_t q) const { return z_.get(q); }
  const BitVec& x_bits() const { return x_; }
  const BitVec& z_bits() const { return z_; }
  uint8_t phase_exp() const { return phase_exp_; }

  /// Overwrites the single-qubit component; adjusts the phase so the stored
  /// operator keeps its +1 prefactor on that qubit (Y = i XZ).
  void set_pauli(size_t q, PauliKind k) {
    if (x_.get(q) && z_.get(q)) phase_exp_ = (phase_exp_ + 3) & 3;
    x_.set(q, k == PauliKind::X || k == PauliKind::Y);
    z_.set(q, k == PauliKind::Z || k == PauliKind::Y);
    if (k == PauliKind::Y) phase_exp_ = (phase_exp_ + 1) & 3;
  }

  PauliKind pauli_at(size_t q) const {
    bool x = x_.get(q), z = z_.get(q);
    if (x && z) return PauliKind::Y;
    if (x) return PauliKind::X;
    if (z) return PauliKind::Z;
    return PauliKind::I;
  }

  size_t y_count() const {
    size_t c = 0;
    for (size_t w = 0; w < x_.words().size(); ++w) {
      c += std::popcount(x_.words()[w] & z_.words()[w]);
    }
    return c;
  }

  size_t weight() const {
    size_t c = 0;
    for (size_t w = 0; w < x_.words().size(); ++w) {
      c += std::popcount(x_.words()[w] | z_.words()[w]);
    }
    return c;
  }

  bool is_identity_bits() const { return !x_.any() && !z_.any(); }

  /// True when the operator squares to +1, i.e. it is +/-(tensor of IXYZ).
  bool is_hermitian() const { return ((phase_exp_ ^ y_count()) & 1) == 0; }

  /// 0 for +1, 1 for -1. Only meaningful for Hermitian operators.
  bool sign_bit() const {
    if (!is_hermitian()) throw std::logic_error("sign of non-Hermitian Pauli");
    return ((phase_exp_ + 4 - (y_count() & 3)) & 3) == 2;
  }

  void negate() { phase_exp_ = (phase_exp_ + 2) & 3; }
  void set_sign_bit(bool neg) {
    if (sign_bit() != neg) negate();
  }

  /// Resets the phase so the operator is Hermitian with +1 sign. Only valid
  /// where the overall phase is irrelevant (destabilizers, frame algebra).
  void drop_phase_to_positive() { phase_exp_ = static_cast<uint8_t>(y_count() & 3); }

  bool commutes_with(const PauliOperator& o) const {
    if (o.n_ != n_) throw std::invalid_argument("qubit count mismatch");
    uint64_t acc = 0;
    for (size_t w = 0; w < x_.words().size(); ++w) {
      acc ^= (x_.words()[w] & o.z_.words()[w]) ^ (z_.words()[w] & o.x_.words()[w]);
    }
    return (std::popcount(acc) & 1) == 0;
  }

  /// Left-multiplication: *this = *this * o. Phase follows from moving every
  /// Z in *this past every X in o: i^r = i^{r1+r2} (-1)^{|z1 & x2|}.
  PauliOperator& operator*=(const PauliOperator& o) {
    if (o.n_ != n_) throw std::invalid_argument("qubit count mismatch");
    size_t swaps = 0;
    for (size_t w = 0; w < x_.words().size(); ++w) {
      swaps += std::popcount(z_.words()[w] & o.x_.words()[w]);
    }
    phase_exp_ = static_cast<uint8_t>((phase_exp_ + o.phase_exp_ + 2 * (swaps & 1)) & 3);
    x_ ^= o.x_;
    z_ ^= o.z_;
    return *this;
  }

  friend PauliOperator operator*(PauliOperator a, const PauliOperator& b) {
    a *= b;
    return a;
  }

  bool operator==(const PauliOperator& o) const = default;
  bool equal_bits(const PauliOperator& o) const { return x_ == o.x_ && z_ == o.z_; }

  // Clifford conjugations P -> U P U^dagger, applied qubit-locally.
  void conj_h(size_t q) {
    bool x = x_.get(q), z = z_.get(q);
    if (x && z) phase_exp_ = (phase_exp_ + 2) & 3;
    x_.set(q, z);
    z_.set(q, x);
  }

  void conj_s(size_t q) {
    if (x_.get(q)) {
      phase_exp_ = (phase_exp_ + 1) & 3;
      z_.flip(q);
    }
  }

  void conj_sdg(size_t q) {
    if (x_.get(q)) {
      phase_exp_ = (phase_exp_ + 3) & 3;
      z_.flip(q);
    }
  }

  void conj_x(size_t q) {
    if (z_.get(q)) phase_exp_ = (phase_exp_ + 2) & 3;
  }

  void conj_y(size_t q) {
    if (x_.get(q) != z_.get(q)) phase_exp_ = (phase_exp_ + 2) & 3;
  }

  void conj_z(size_t q) {
    if (x_.get(q)) phase_exp_ = (phase_exp_ + 2) & 3;
  }

  void conj_cnot(size_t c, size_t t) {
    x_.set(t, x_.get(t) ^ x_.get(c));
    z_.set(c, z_.get(c) ^ z_.get(t));
  }

  void conj_cz(size_t a, size_t b) {
    if (x_.get(a) && x_.get(b)) phase_exp_ = (phase_exp_ + 2) & 3;
    z_.set(a, z_.get(a) ^ x_.get(b));
    z_.set(b, z_.get(b) ^ x_.get(a));
  }

  void conj_swap(size_t a, size_t b) {
    bool xa = x_.get(a), za = z_.get(a);
    x_.set(a, x_.get(b));
    z_.set(a, z_.get(b));
    x_.set(b, xa);
    z_.set(b, za);
  }

  std::string to_string() const {
    static const char* names = "IXYZ";
    std::string s;
    uint8_t sign = static_cast<uint8_t>((phase_exp_ + 4 - (y_count() & 3)) & 3);
    switch (sign) {
      case 0: s = "+"; break;
      case 1: s = "+i"; break;
      case 2: s = "-"; break;
      case 3: s = "-i"; break;
    }
    for (size_t q = 0; q < n_; ++q) s.push_back(names[static_cast<int>(pauli_at(q))]);
    return s;
  }

 private:
  size_t n_ = 0;
  BitVec x_, z_;
  uint8_t phase_exp_ = 0;
};

/// Sign-free Pauli byproduct record. Composition is bitwise XOR; signs are
/// irrelevant because frames only ever feed outcome-flip and correction logic.
class PauliFrame {
 public:
  PauliFrame() = default;
  explicit PauliFrame(size_t n) : x_(n), z_(n) {}
  PauliFrame(BitVec x, BitVec z) : x_(std::move(x)), z_(std::move(z)) {
    if (x_.size() != z_.size()) throw std::invalid_argument("frame size mismatch");
  }

  size_t n_qubits() const { return x_.size(); }
  bool x_bit(size_t q) const { return x_.get(q); }
  bool z_bit(size_t q) const { return z_.get(q); }
  void set_x(size_t q, bool v) { x_.set(q, v); }
  void set_z(size_t q, bool v) { z_.set(q, v); }
  const BitVec& x_bits() const { return x_; }
  const BitVec& z_bits() const { return z_; }

  PauliFrame& operator^=(const PauliFrame& o) {
    x_ ^= o.x_;
    z_ ^= o.z_;
    return *this;
  }

  bool operator==(const PauliFrame& o) const = default;

  bool is_identity() const { return !x_.any() && !z_.any(); }

  /// True if the frame anticommutes with the given single-qubit observable.
  bool anticommutes_with_single(size_t q, PauliKind k) const {
    bool x = x_.get(q), z = z_.get(q);
    switch (k) {
      case PauliKind::I: return false;
      case PauliKind::X: return z;
      case PauliKind::Y: return x != z;
      case PauliKind::Z: return x;
    }
    return false;
  }

  void clear_qubit(size_t q) {
    x_.set(q, false);
    z_.set(q, false);
  }

  // Heisenberg propagation through Clifford gates (sign dropped).
  void conj_h(size_t q) {
    bool x = x_.get(q);
    x_.set(q, z_.get(q));
    z_.set(q, x);
  }
  void conj_s(size_t q) { z_.set(q, z_.get(q) ^ x_.get(q)); }
  void conj_cnot(size_t c, size_t t) {
    x_.set(t, x_.get(t) ^ x_.get(c));
    z_.set(c, z_.get(c) ^ z_.get(t));
  }
  void conj_cz(size_t a, size_t b) {
    z_.set(a, z_.get(a) ^ x_.get(b));
    z_.set(b, z_.get(b) ^ x_.get(a));
  }
  void conj_swap(size_t a, size_t b) {
    bool xa = x_.get(a), za = z_.get(a);
    x_.set(a, x_.get(b));
    z_.set(a, z_.get(b));
    x_.set(b, xa);
    z_.set(b, za);
  }

 private:
  BitVec x_, z_;
};

}  // namespace mbpurify
