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
#include <utility>
#include <vector>

#include "mbpurify/circuit.hpp"
#include "mbpurify/gf2.hpp"
#include "mbpurify/pauli.hpp"
#include "mbpurify/rng.hpp"

namespace mbpurify {

struct MeasureResult {
  bool outcome;     // 0 for +1 eigenvalue, 1 for -1
  bool was_random;  // false if the outcome was fixed by the stabilizer group
};

struct BellMeasureResult {
  bool x_outcome;  // X_a X_b eigenvalue bit
  bool z_outcome;  // Z_a Z_b eigenvalue bit
};

/// Stabilizer tableau with full Aaronson-Gottesman bookkeeping: n stabilizer
/// and n destabilizer generators, each a bit-packed PauliOperator.
/// Destabilizer i anticommutes with stabilizer i and commutes with every
/// other generator; that pairing is what makes deterministic measurement
/// outcomes an O(n^2) group-membership lookup.
class StabilizerTableau {
 public:
  /// |0...0>: stabilizers Z_i, destabilizers X_i.
  explicit StabilizerTableau(size_t n) : n_(n), consumed_(n, 0) {
    stab_.reserve(n);
    destab_.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      stab_.push_back(PauliOperator::single(n, i, PauliKind::Z));
      destab_.push_back(PauliOperator::single(n, i, PauliKind::X));
    }
  }

  static StabilizerTableau plus_states(size_t n) {
    StabilizerTableau t(n);
    for (size_t q = 0; q < n; ++q) t.apply_h(q);
    return t;
  }

  /// n_pairs Bell pairs |phi+> on qubits (2i, 2i+1).
  static StabilizerTableau bell_pairs(size_t n_pairs) {
    StabilizerTableau t(2 * n_pairs);
    for (size_t i = 0; i < n_pairs; ++i) {
      t.apply_h(2 * i);
      t.apply_cnot(2 * i, 2 * i + 1);
    }
    return t;
  }

  /// Graph state of a symmetric, zero-diagonal adjacency matrix:
  /// stabilizers K_j = X_j prod_{k in N(j)} Z_k, destabilizers Z_j.
  static StabilizerTableau from_graph(const BitMatrix& adjacency) {
    size_t n = adjacency.n_rows();
    if (adjacency.n_cols() != n) throw std::invalid_argument("adjacency must be square");
    for (size_t i = 0; i < n; ++i) {
      if (adjacency.get(i, i)) throw std::invalid_argument("adjacency has a self-loop");
      for (size_t j = i + 1; j < n; ++j) {
        if (adjacency.get(i, j) != adjacency.get(j, i)) {
          throw std::invalid_argument("adjacency is not symmetric");
        }
      }
    }
    StabilizerTableau t(n);
    for (size_t j = 0; j < n; ++j) {
      PauliOperator k = PauliOperator::single(n, j, PauliKind::X);
      for (size_t c = 0; c < n; ++c) {
        if (adjacency.get(j, c)) k *= PauliOperator::single(n, c, PauliKind::Z);
      }
      t.stab_[j] = std::move(k);
      t.destab_[j] = PauliOperator::single(n, j, PauliKind::Z);
    }
    t.validate();
    return t;
  }

  /// Rebuilds a full tableau from stabilizer generators alone via symplectic
  /// Gram-Schmidt. The returned stabilizer rows generate the same group (they
  /// may be products of the inputs); destabilizers are completed to satisfy
  /// the canonical pairing. Throws if the inputs do not describe a state
  /// (wrong count, dependent, mutually anticommuting, or sign-inconsistent).
  static StabilizerTableau from_stabilizers(std::vector<PauliOperator> stabs) {
    if (stabs.empty()) throw std::invalid_argument("no stabilizers given");
    size_t n = stabs[0].n_qubits();
    if (stabs.size() != n) throw std::invalid_argument("need exactly n generators");
    for (const auto& s : stabs) {
      if (s.n_qubits() != n) throw std::invalid_argument("stabilizer width mismatch");
      if (!s.is_hermitian()) throw std::invalid_argument("stabilizer with imaginary sign");
    }
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        if (!stabs[i].commutes_with(stabs[j])) {
          throw std::invalid_argument("stabilizers do not commute");
        }
      }
    }

    std::vector<PauliOperator> candidates;
    candidates.reserve(2 * n);
    for (size_t q = 0; q < n; ++q) candidates.push_back(PauliOperator::single(n, q, PauliKind::X));
    for (size_t q = 0; q < n; ++q) candidates.push_back(PauliOperator::single(n, q, PauliKind::Z));

    std::vector<PauliOperator> destabs;
    destabs.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      PauliOperator& u = stabs[i];
      if (u.is_identity_bits()) {
        throw std::invalid_argument("stabilizers dependent or sign-inconsistent");
      }
      size_t w_idx = candidates.size();
      for (size_t c = 0; c < candidates.size(); ++c) {
        if (!candidates[c].commutes_with(u)) {
          w_idx = c;
          break;
        }
      }
      if (w_idx == candidates.size()) {
        throw std::invalid_argument("stabilizers dependent or sign-inconsistent");
      }
      PauliOperator w = candidates[w_idx];
      candidates.erase(candidates.begin() + static_cast<long>(w_idx));
      // Make everything still unpaired commute with both u and w. Stabilizer
      // rows always commute with u, so their signs stay meaningful; candidate
      // phases are arbitrary and get renormalized (a product of anticommuting
      // Hermitian Paulis picks up a factor of i).
      auto fix = [&](PauliOperator& v, bool phase_free) {
        bool anti_u = !v.commutes_with(u);
        bool anti_w = !v.commutes_with(w);
        if (anti_w) v *= u;
        if (anti_u) v *= w;
        if (phase_free && (anti_u || anti_w)) v.drop_phase_to_positive();
      };
      for (size_t j = i + 1; j < n; ++j) fix(stabs[j], false);
      for (auto& c : candidates) fix(c, true);
      w.drop_phase_to_positive();
      destabs.push_back(std::move(w));
    }

    StabilizerTableau t(n);
    t.stab_ = std::move(stabs);
    t.destab_ = std::move(destabs);
    t.validate();
    return t;
  }

  /// Tensor product: a's qubits first, then b's.
  static StabilizerTableau tensor(const StabilizerTableau& a, const StabilizerTableau& b) {
    size_t n = a.n_ + b.n_;
    StabilizerTableau t(n);
    auto embed = [n](const PauliOperator& p, size_t offset) {
      PauliOperator out(n);
      for (size_t q = 0; q < p.n_qubits(); ++q) out.set_pauli(offset + q, p.pauli_at(q));
      if (p.sign_bit()) out.negate();
      return out;
    };
    for (size_t i = 0; i < a.n_; ++i) {
      t.stab_[i] = embed(a.stab_[i], 0);
      t.destab_[i] = embed(a.destab_[i], 0);
      t.consumed_[i] = a.consumed_[i];
    }
    for (size_t i = 0; i < b.n_; ++i) {
      t.stab_[a.n_ + i] = embed(b.stab_[i], a.n_);
      t.destab_[a.n_ + i] = embed(b.destab_[i], a.n_);
      t.consumed_[a.n_ + i] = b.consumed_[i];
    }
    return t;
  }

  size_t n_qubits() const { return n_; }
  const PauliOperator& stabilizer(size_t i) const { return stab_[i]; }
  const PauliOperator& destabilizer(size_t i) const { return destab_[i]; }
  const std::vector<PauliOperator>& stabilizers() const { return stab_; }

  bool consumed(size_t q) const { return consumed_[q] != 0; }
  void mark_consumed(size_t q) { consumed_[q] = 1; }
  size_t live_count() const {
    size_t c = 0;
    for (uint8_t f : consumed_) c += f == 0;
    return c;
  }

  // -- Clifford gates ------------------------------------------------------

  void apply_h(size_t q) { for_rows([&](PauliOperator& p) { p.conj_h(q); }); }
  void apply_s(size_t q) { for_rows([&](PauliOperator& p) { p.conj_s(q); }); }
  void apply_sdg(size_t q) { for_rows([&](PauliOperator& p) { p.conj_sdg(q); }); }
  void apply_x(size_t q) { for_rows([&](PauliOperator& p) { p.conj_x(q); }); }
  void apply_y(size_t q) { for_rows([&](PauliOperator& p) { p.conj_y(q); }); }
  void apply_z(size_t q) { for_rows([&](PauliOperator& p) { p.conj_z(q); }); }
  void apply_cnot(size_t c, size_t t) {
    if (c == t) throw std::invalid_argument("CNOT needs distinct qubits");
    for_rows([&](PauliOperator& p) { p.conj_cnot(c, t); });
  }
  void apply_cz(size_t a, size_t b) {
    if (a == b) throw std::invalid_argument("CZ needs distinct qubits");
    for_rows([&](PauliOperator& p) { p.conj_cz(a, b); });
  }
  void apply_swap(size_t a, size_t b) {
    for_rows([&](PauliOperator& p) { p.conj_swap(a, b); });
  }

  /// Applies the Pauli X^x Z^z on one qubit (sign bookkeeping only).
  void apply_pauli(size_t q, bool x, bool z) {
    if (q >= n_) throw std::out_of_range("qubit index out of range");
    if (x && z) {
      apply_y(q);
    } else if (x) {
      apply_x(q);
    } else if (z) {
      apply_z(q);
    }
  }

  void apply(const Gate& g, size_t offset = 0) {
    size_t a = g.a + offset, b = g.b + offset;
    if (a >= n_ || (g.is_two_qubit() && b >= n_)) {
      throw std::out_of_range("gate index out of range");
    }
    switch (g.kind) {
      case GateKind::H: apply_h(a); break;
      case GateKind::S: apply_s(a); break;
      case GateKind::Sdg: apply_sdg(a); break;
      case GateKind::X: apply_x(a); break;
      case GateKind::Y: apply_y(a); break;
      case GateKind::Z: apply_z(a); break;
      case GateKind::CNOT: apply_cnot(a, b); break;
      case GateKind::CZ: apply_cz(a, b); break;
      case GateKind::Swap: apply_swap(a, b); break;
    }
  }

  // -- Measurements --------------------------------------------------------

  /// Measures a Hermitian Pauli observable with +1 sign convention encoded in
  /// the operator itself (a -P observable is P with flipped sign).
  MeasureResult measure_pauli(const PauliOperator& obs, SplitRng& rng) {
    check_observable(obs, /*allow_consumed=*/false);
    return measure_impl(obs, /*forced=*/false, /*forced_bit=*/false, &rng);
  }

  /// Measurement that postselects the requested branch whenever the outcome
  /// is random. Returns the actual outcome, which for deterministic
  /// observables may differ from the request.
  MeasureResult measure_pauli_forced(const PauliOperator& obs, bool outcome) {
    check_observable(obs, /*allow_consumed=*/true);
    return measure_impl(obs, /*forced=*/true, outcome, nullptr);
  }

  /// Measures X_a X_b then Z_a Z_b and marks both qubits consumed. The
  /// byproduct Pauli on whatever was teleported is the caller's to track
  /// (see ResourceState::apply_byproduct_map).
  BellMeasureResult bell_measure(size_t a, size_t b, SplitRng& rng) {
    if (a == b) throw std::invalid_argument("Bell measurement needs distinct qubits");
    if (a >= n_ || b >= n_) throw std::out_of_range("qubit index out of range");
    if (consumed_[a] || consumed_[b]) throw std::invalid_argument("qubit already consumed");
    PauliOperator xx(n_), zz(n_);
    xx.set_pauli(a, PauliKind::X);
    xx.set_pauli(b, PauliKind::X);
    zz.set_pauli(a, PauliKind::Z);
    zz.set_pauli(b, PauliKind::Z);
    bool mx = measure_impl(xx, false, false, &rng).outcome;
    bool mz = measure_impl(zz, false, false, &rng).outcome;
    consumed_[a] = consumed_[b] = 1;
    return {mx, mz};
  }

  BellMeasureResult bell_measure_forced(size_t a, size_t b, bool x_outcome, bool z_outcome) {
    if (a == b) throw std::invalid_argument("Bell measurement needs distinct qubits");
    if (consumed_[a] || consumed_[b]) throw std::invalid_argument("qubit already consumed");
    PauliOperator xx(n_), zz(n_);
    xx.set_pauli(a, PauliKind::X);
    xx.set_pauli(b, PauliKind::X);
    zz.set_pauli(a, PauliKind::Z);
    zz.set_pauli(b, PauliKind::Z);
    bool mx = measure_impl(xx, true, x_outcome, nullptr).outcome;
    bool mz = measure_impl(zz, true, z_outcome, nullptr).outcome;
    consumed_[a] = consumed_[b] = 1;
    return {mx, mz};
  }

  // -- Invariant checking ---------------------------------------------------

  /// Throws std::logic_error if any tableau invariant is broken: Hermitian
  /// rows, mutually commuting stabilizers, canonical (anti)commutation
  /// pairing with destabilizers, and full rank over GF(2).
  void validate() const {
    for (size_t i = 0; i < n_; ++i) {
      if (stab_[i].n_qubits() != n_ || destab_[i].n_qubits() != n_) {
        throw std::logic_error("tableau row width mismatch");
      }
      if (!stab_[i].is_hermitian() || !destab_[i].is_hermitian()) {
        throw std::logic_error("tableau row is not Hermitian");
      }
    }
    for (size_t i = 0; i < n_; ++i) {
      for (size_t j = 0; j < n_; ++j) {
        if (!stab_[i].commutes_with(stab_[j])) {
          throw std::logic_error("stabilizers do not commute");
        }
        if (!destab_[i].commutes_with(destab_[j])) {
          throw std::logic_error("destabilizers do not commute");
        }
        bool anti = !destab_[i].commutes_with(stab_[j]);
        if (anti != (i == j)) throw std::logic_error("destabilizer pairing broken");
      }
    }
    BitMatrix m(n_, 2 * n_);
    for (size_t i = 0; i < n_; ++i) {
      for (size_t q = 0; q < n_; ++q) {
        m.set(i, q, stab_[i].x_bit(q));
        m.set(i, n_ + q, stab_[i].z_bit(q));
      }
    }
    if (m.rank() != n_) throw std::logic_error("stabilizers not independent");
  }

  /// True if the (Hermitian, signed) Pauli is in the stabilizer group.
  bool stabilizes(const PauliOperator& p) const {
    for (const auto& s : stab_) {
      if (!s.commutes_with(p)) return false;
    }
    PauliOperator acc = PauliOperator::identity(n_);
    for (size_t i = 0; i < n_; ++i) {
      if (!destab_[i].commutes_with(p)) acc *= stab_[i];
    }
    return acc.equal_bits(p) && acc.sign_bit() == p.sign_bit();
  }

 private:
  template <class Fn>
  void for_rows(Fn&& fn) {
    for (auto& p : stab_) fn(p);
    for (auto& p : destab_) fn(p);
  }

  void check_observable(const PauliOperator& obs, bool allow_consumed) const {
    if (obs.n_qubits() != n_) throw std::invalid_argument("observable width mismatch");
    if (!obs.is_hermitian()) throw std::invalid_argument("observable with imaginary sign");
    if (obs.is_identity_bits()) throw std::invalid_argument("cannot measure identity");
    if (!allow_consumed) {
      for (size_t q = 0; q < n_; ++q) {
        if (consumed_[q] && (obs.x_bit(q) || obs.z_bit(q))) {
          throw std::invalid_argument("observable touches consumed qubit");
        }
      }
    }
  }

  MeasureResult measure_impl(const PauliOperator& obs, bool forced, bool forced_bit,
                             SplitRng* rng) {
    size_t pivot = n_;
    for (size_t i = 0; i < n_; ++i) {
      if (!stab_[i].commutes_with(obs)) {
        pivot = i;
        break;
      }
    }
    if (pivot < n_) {
      PauliOperator old = stab_[pivot];
      for (size_t i = 0; i < n_; ++i) {
        if (i != pivot && !stab_[i].commutes_with(obs)) stab_[i] *= old;
        if (!destab_[i].commutes_with(obs)) destab_[i] *= old;
      }
      bool outcome = forced ? forced_bit : rng->bit();
      destab_[pivot] = std::move(old);
      stab_[pivot] = obs;
      if (outcome) stab_[pivot].negate();
      return {outcome, true};
    }
    // Deterministic: obs (up to sign) is a product of stabilizers selected by
    // the destabilizers that anticommute with it.
    PauliOperator acc = PauliOperator::identity(n_);
    for (size_t i = 0; i < n_; ++i) {
      if (!destab_[i].commutes_with(obs)) acc *= stab_[i];
    }
    if (!acc.equal_bits(obs)) throw std::logic_error("measurement group lookup failed");
    bool outcome = acc.sign_bit() != obs.sign_bit();
    return {outcome, false};
  }

  size_t n_;
  std::vector<PauliOperator> stab_;
  std::vector<PauliOperator> destab_;
  std::vector<uint8_t> consumed_;
};

}  // namespace mbpurify
