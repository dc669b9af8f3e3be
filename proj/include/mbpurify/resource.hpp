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

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbpurify/circuit.hpp"
#include "mbpurify/gf2.hpp"
#include "mbpurify/pauli.hpp"
#include "mbpurify/rng.hpp"
#include "mbpurify/tableau.hpp"

namespace mbpurify {

enum class Party : uint8_t { A, B };

enum class ParityType : uint8_t { Amplitude, Phase };

struct HashingRound {
  std::vector<uint32_t> subset;  // pairs whose bits feed the parity; excludes the target
  ParityType type;
  uint32_t target;  // pair that accumulates the parity and is then measured
};

/// N-pair, M-output hashing schedule: N-M parity rounds over random subsets
/// of the surviving pairs. Deterministic given the seed.
struct HashingPlan {
  uint32_t n_pairs = 0;
  uint32_t n_output = 0;
  uint64_t seed = 0;
  std::vector<HashingRound> rounds;

  uint32_t n_rounds() const { return n_pairs - n_output; }

  /// Pairs never chosen as a target, in ascending order. Output slot j of
  /// every runner refers to surviving_pairs()[j].
  std::vector<uint32_t> surviving_pairs() const {
    std::vector<uint8_t> alive(n_pairs, 1);
    for (const auto& r : rounds) alive[r.target] = 0;
    std::vector<uint32_t> out;
    for (uint32_t i = 0; i < n_pairs; ++i) {
      if (alive[i]) out.push_back(i);
    }
    return out;
  }
};

/// Draws the parity schedule: each round includes every surviving pair
/// independently with probability 1/2 (redrawn when that leaves no subset or
/// no target), picks a target among the remaining survivors, and draws the
/// parity type uniformly. The target is measured out, so it leaves the
/// surviving set.
inline HashingPlan make_hashing_plan(uint32_t n_pairs, uint32_t n_output, uint64_t seed) {
  if (n_output == 0 || n_output >= n_pairs) {
    throw std::invalid_argument("need 0 < M < N for a hashing plan");
  }
  HashingPlan plan;
  plan.n_pairs = n_pairs;
  plan.n_output = n_output;
  plan.seed = seed;
  SplitRng rng(seed, 0x706c616e);  // dedicated plan stream

  std::vector<uint32_t> surviving(n_pairs);
  for (uint32_t i = 0; i < n_pairs; ++i) surviving[i] = i;

  uint32_t n_rounds = n_pairs - n_output;
  plan.rounds.reserve(n_rounds);
  for (uint32_t r = 0; r < n_rounds; ++r) {
    HashingRound round;
    std::vector<uint32_t> rest;
    for (;;) {
      round.subset.clear();
      rest.clear();
      for (uint32_t pair : surviving) {
        if (rng.bit()) {
          round.subset.push_back(pair);
        } else {
          rest.push_back(pair);
        }
      }
      if (!round.subset.empty() && !rest.empty()) break;
    }
    round.target = rest[rng.below(rest.size())];
    round.type = rng.bit() ? ParityType::Phase : ParityType::Amplitude;
    plan.rounds.push_back(round);
    surviving.erase(std::find(surviving.begin(), surviving.end(), round.target));
  }
  return plan;
}

/// Translates the plan into one party's Clifford circuit over N qubits
/// (qubit i = this party's half of pair i). An amplitude round funnels the
/// subset's amplitude bits into the target with CNOTs and reads the target in
/// Z; a phase round reverses the CNOT direction (the Hadamard conjugate) and
/// reads the target in X. Both parties run the identical circuit, so the XOR
/// of their target outcomes is the bilateral parity bit.
inline CliffordCircuit plan_to_circuit(const HashingPlan& plan, Party /*party*/) {
  CliffordCircuit c(plan.n_pairs);
  for (const auto& round : plan.rounds) {
    if (round.type == ParityType::Amplitude) {
      for (uint32_t s : round.subset) c.add_gate(Gate::cnot(s, round.target));
      c.add_measurement(round.target, Basis::Z);
    } else {
      for (uint32_t s : round.subset) c.add_gate(Gate::cnot(round.target, s));
      c.add_measurement(round.target, Basis::X);
    }
  }
  return c;
}

struct DecodedReadIn {
  BitVec parity_bits;  // this party's contribution to each round's parity
  PauliFrame frame;    // byproduct Pauli on the output ports
};

/// Compact measurement-based resource for one party: the Jamiolkowski state
/// of the (outcome-normalized) protocol circuit on n_in + n_out qubits,
/// together with the GF(2) map that decodes Bell read-in outcomes into parity
/// bits and the output byproduct frame.
struct ResourceState {
  Party party = Party::A;
  uint64_t seed = 0;
  StabilizerTableau tableau{0};
  std::vector<uint32_t> input_ports;
  std::vector<uint32_t> output_ports;
  size_t n_rounds = 0;
  /// Rows: n_rounds parity flips, then n_out frame X bits, then n_out frame
  /// Z bits. Columns: per port i, bit 2i is the X_aX_b outcome and bit 2i+1
  /// the Z_aZ_b outcome of that port's read-in Bell measurement.
  BitMatrix byproduct_map;

  size_t n_in() const { return input_ports.size(); }
  size_t n_out() const { return output_ports.size(); }
  size_t qubit_count() const { return input_ports.size() + output_ports.size(); }

  DecodedReadIn apply_byproduct_map(const BitVec& outcome_bits) const {
    if (outcome_bits.size() != 2 * n_in()) {
      throw std::invalid_argument("outcome bit count mismatch");
    }
    BitVec mapped = byproduct_map.mul_vec(outcome_bits);
    DecodedReadIn out{BitVec(n_rounds), PauliFrame(n_out())};
    for (size_t r = 0; r < n_rounds; ++r) out.parity_bits.set(r, mapped.get(r));
    for (size_t j = 0; j < n_out(); ++j) {
      out.frame.set_x(j, mapped.get(n_rounds + j));
      out.frame.set_z(j, mapped.get(n_rounds + n_out() + j));
    }
    return out;
  }

  std::string serialize() const;
  static ResourceState deserialize(const std::string& text);
};

namespace detail {

/// Commutes a sign-free input byproduct through the circuit. Measurements
/// flip when the running frame anticommutes with the measured observable;
/// the measured qubit then drops out of the frame.
struct PropagationResult {
  BitVec measurement_flips;
  PauliFrame final_frame;
};

inline PropagationResult propagate_frame(const CliffordCircuit& c, PauliFrame frame) {
  size_t n_meas = c.measurements().size();
  PropagationResult out{BitVec(n_meas), PauliFrame(0)};
  size_t mi = 0;
  for (const auto& op : c.ops) {
    if (const Gate* g = std::get_if<Gate>(&op)) {
      switch (g->kind) {
        case GateKind::H: frame.conj_h(g->a); break;
        case GateKind::S:
        case GateKind::Sdg: frame.conj_s(g->a); break;
        case GateKind::X:
        case GateKind::Y:
        case GateKind::Z: break;
        case GateKind::CNOT: frame.conj_cnot(g->a, g->b); break;
        case GateKind::CZ: frame.conj_cz(g->a, g->b); break;
        case GateKind::Swap: frame.conj_swap(g->a, g->b); break;
      }
    } else {
      const auto& m = std::get<PauliMeasurement>(op);
      if (frame.anticommutes_with_single(m.qubit, basis_pauli(m.basis))) {
        out.measurement_flips.set(mi, true);
      }
      frame.clear_qubit(m.qubit);
      ++mi;
    }
  }
  out.final_frame = std::move(frame);
  return out;
}

/// Removes measured-out qubits from a prepared 2n-qubit tableau. Each dead
/// qubit holds a decoupled single-qubit stabilizer (its normalized
/// measurement observable); eliminating that generator from the other rows
/// leaves a stabilizer set supported on the live qubits only.
inline StabilizerTableau compact_dead_qubits(const StabilizerTableau& t,
                                             const std::vector<std::pair<size_t, PauliKind>>& dead,
                                             const std::vector<size_t>& live) {
  std::vector<PauliOperator> rows = t.stabilizers();
  std::vector<uint8_t> row_dead(rows.size(), 0);
  for (const auto& [q, basis] : dead) {
    PauliOperator pivot = PauliOperator::single(t.n_qubits(), q, basis);
    size_t pivot_row = rows.size();
    for (size_t i = 0; i < rows.size(); ++i) {
      if (!row_dead[i] && rows[i] == pivot) {
        pivot_row = i;
        break;
      }
    }
    if (pivot_row == rows.size()) {
      throw std::logic_error("dead qubit lacks its single-qubit stabilizer");
    }
    bool want_x = basis == PauliKind::X || basis == PauliKind::Y;
    bool want_z = basis == PauliKind::Z || basis == PauliKind::Y;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == pivot_row || row_dead[i]) continue;
      if ((want_x && rows[i].x_bit(q)) || (want_z && rows[i].z_bit(q))) rows[i] *= pivot;
    }
    row_dead[pivot_row] = 1;
  }

  std::vector<PauliOperator> live_rows;
  live_rows.reserve(live.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (row_dead[i]) continue;
    PauliOperator compacted(live.size());
    for (size_t k = 0; k < live.size(); ++k) compacted.set_pauli(k, rows[i].pauli_at(live[k]));
    if (rows[i].sign_bit()) compacted.negate();
    // Any residue on dead qubits here means the state did not factorize.
    for (const auto& [q, basis] : dead) {
      if (rows[i].x_bit(q) || rows[i].z_bit(q)) {
        throw std::logic_error("stabilizer still touches a dead qubit");
      }
    }
    live_rows.push_back(std::move(compacted));
  }
  if (live_rows.size() != live.size()) throw std::logic_error("live generator count mismatch");
  return StabilizerTableau::from_stabilizers(std::move(live_rows));
}

}  // namespace detail

/// Builds the resource state by applying the protocol circuit to halves of
/// n_in Bell pairs and normalizing every circuit measurement to the all-zero
/// reference outcome (the postselection branch is forced, so preparation is
/// deterministic). The result lives on n_in untouched halves plus the
/// circuit's surviving qubits: n_in + n_out in total. Other reference
/// outcomes never need rejection; read-in handles them through the byproduct
/// map.
inline ResourceState jamiolkowski_resource(const CliffordCircuit& circuit, Party party,
                                           uint64_t seed = 0) {
  size_t n_in = circuit.n_qubits;
  StabilizerTableau t(2 * n_in);
  for (size_t i = 0; i < n_in; ++i) {
    t.apply_h(i);
    t.apply_cnot(i, n_in + i);
  }

  std::vector<std::pair<size_t, PauliKind>> dead;
  for (const auto& op : circuit.ops) {
    if (const Gate* g = std::get_if<Gate>(&op)) {
      t.apply(*g, n_in);
    } else {
      const auto& m = std::get<PauliMeasurement>(op);
      size_t q = n_in + m.qubit;
      PauliKind basis = basis_pauli(m.basis);
      PauliOperator obs = PauliOperator::single(2 * n_in, q, basis);
      MeasureResult res = t.measure_pauli_forced(obs, false);
      if (res.outcome) {
        throw std::logic_error("circuit measurement is deterministically violated");
      }
      t.mark_consumed(q);
      dead.emplace_back(q, basis);
    }
  }

  std::vector<size_t> live;
  std::vector<uint32_t> output_ports;
  for (size_t q = 0; q < 2 * n_in; ++q) {
    if (!t.consumed(q)) live.push_back(q);
  }

  ResourceState res;
  res.party = party;
  res.seed = seed;
  res.tableau = detail::compact_dead_qubits(t, dead, live);
  res.n_rounds = dead.size();
  for (uint32_t i = 0; i < n_in; ++i) res.input_ports.push_back(i);
  for (size_t k = 0; k < live.size(); ++k) {
    if (live[k] >= n_in) res.output_ports.push_back(static_cast<uint32_t>(k));
  }

  // Column 2i: a set X_aX_b outcome bit teleports byproduct Z on circuit
  // input i; column 2i+1: a set Z_aZ_b bit teleports byproduct X.
  size_t n_out = res.output_ports.size();
  res.byproduct_map = BitMatrix(res.n_rounds + 2 * n_out, 2 * n_in);
  for (size_t i = 0; i < n_in; ++i) {
    for (int which = 0; which < 2; ++which) {
      PauliFrame seed_frame(n_in);
      if (which == 0) {
        seed_frame.set_z(i, true);  // from x_outcome bit
      } else {
        seed_frame.set_x(i, true);  // from z_outcome bit
      }
      detail::PropagationResult prop = detail::propagate_frame(circuit, seed_frame);
      size_t col = 2 * i + static_cast<size_t>(which);
      for (size_t r = 0; r < res.n_rounds; ++r) {
        res.byproduct_map.set(r, col, prop.measurement_flips.get(r));
      }
      // Map the surviving circuit qubits onto output slots in live order.
      size_t slot = 0;
      for (size_t k = 0; k < live.size(); ++k) {
        if (live[k] < n_in) continue;
        size_t cq = live[k] - n_in;
        res.byproduct_map.set(res.n_rounds + slot, col, prop.final_frame.x_bit(cq));
        res.byproduct_map.set(res.n_rounds + n_out + slot, col, prop.final_frame.z_bit(cq));
        ++slot;
      }
    }
  }
  return res;
}

struct ReadInResult {
  StabilizerTableau state{0};        // resource qubits first, then the consumed inputs
  std::vector<uint32_t> output_qubits;
  BitVec raw_bits;                   // interleaved (x, z) Bell outcome bits per port
  BitVec parity_bits;                // this party's decoded parity contributions
  PauliFrame frame;                  // byproduct on the output qubits
};

/// Consumes an n_in-qubit input register by Bell-measuring each input qubit
/// against its port, then decodes the outcome bits through the byproduct map.
inline ReadInResult read_in(const ResourceState& res, const StabilizerTableau& input,
                            SplitRng& rng) {
  size_t n_in = res.n_in();
  if (input.n_qubits() != n_in) throw std::invalid_argument("input port count mismatch");
  ReadInResult out;
  out.state = StabilizerTableau::tensor(res.tableau, input);
  size_t offset = res.tableau.n_qubits();
  out.raw_bits = BitVec(2 * n_in);
  for (size_t i = 0; i < n_in; ++i) {
    BellMeasureResult b = out.state.bell_measure(res.input_ports[i], offset + i, rng);
    out.raw_bits.set(2 * i, b.x_outcome);
    out.raw_bits.set(2 * i + 1, b.z_outcome);
  }
  DecodedReadIn dec = res.apply_byproduct_map(out.raw_bits);
  out.parity_bits = std::move(dec.parity_bits);
  out.frame = std::move(dec.frame);
  out.output_qubits = res.output_ports;
  return out;
}

// -- Serialization ----------------------------------------------------------

inline std::string ResourceState::serialize() const {
  std::ostringstream os;
  os << "mbpurify-resource 1\n";
  os << "party " << (party == Party::A ? 'A' : 'B') << "\n";
  os << "n_in " << n_in() << "\n";
  os << "n_out " << n_out() << "\n";
  os << "n_rounds " << n_rounds << "\n";
  os << "seed " << seed << "\n";
  size_t n = tableau.n_qubits();
  for (size_t i = 0; i < n; ++i) {
    const PauliOperator& s = tableau.stabilizer(i);
    os << "stab " << (s.sign_bit() ? 1 : 0) << " " << s.x_bits().to_hex() << " "
       << s.z_bits().to_hex() << "\n";
  }
  os << "bmap " << byproduct_map.n_rows() << " " << byproduct_map.n_cols() << "\n";
  for (size_t r = 0; r < byproduct_map.n_rows(); ++r) {
    os << "row " << byproduct_map.row(r).to_hex() << "\n";
  }
  os << "end\n";
  return os.str();
}

inline ResourceState ResourceState::deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string tok;
  int version = 0;
  is >> tok >> version;
  if (tok != "mbpurify-resource" || version != 1) {
    throw std::invalid_argument("unrecognized resource header");
  }
  ResourceState res;
  char party_c = 'A';
  size_t n_in = 0, n_out = 0;
  is >> tok >> party_c;
  if (tok != "party" || (party_c != 'A' && party_c != 'B')) {
    throw std::invalid_argument("bad party field");
  }
  res.party = party_c == 'A' ? Party::A : Party::B;
  is >> tok >> n_in;
  if (tok != "n_in") throw std::invalid_argument("bad n_in field");
  is >> tok >> n_out;
  if (tok != "n_out") throw std::invalid_argument("bad n_out field");
  is >> tok >> res.n_rounds;
  if (tok != "n_rounds") throw std::invalid_argument("bad n_rounds field");
  is >> tok >> res.seed;
  if (tok != "seed") throw std::invalid_argument("bad seed field");

  size_t n = n_in + n_out;
  std::vector<PauliOperator> stabs;
  stabs.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    int sign = 0;
    std::string xh, zh;
    is >> tok >> sign >> xh >> zh;
    if (tok != "stab") throw std::invalid_argument("bad stabilizer line");
    PauliOperator p(n);
    BitVec x = BitVec::from_hex(xh, n), z = BitVec::from_hex(zh, n);
    for (size_t q = 0; q < n; ++q) {
      bool xb = x.get(q), zb = z.get(q);
      p.set_pauli(q, xb && zb ? PauliKind::Y
                              : xb ? PauliKind::X
                                   : zb ? PauliKind::Z : PauliKind::I);
    }
    if (sign) p.negate();
    stabs.push_back(std::move(p));
  }
  res.tableau = StabilizerTableau::from_stabilizers(std::move(stabs));

  size_t rows = 0, cols = 0;
  is >> tok >> rows >> cols;
  if (tok != "bmap") throw std::invalid_argument("bad byproduct map header");
  if (rows != res.n_rounds + 2 * n_out || cols != 2 * n_in) {
    throw std::invalid_argument("byproduct map dimensions inconsistent with header");
  }
  res.byproduct_map = BitMatrix(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    std::string hex;
    is >> tok >> hex;
    if (tok != "row") throw std::invalid_argument("bad byproduct map row");
    res.byproduct_map.row(r) = BitVec::from_hex(hex, cols);
  }
  is >> tok;
  if (tok != "end") throw std::invalid_argument("missing end marker");

  for (uint32_t i = 0; i < n_in; ++i) res.input_ports.push_back(i);
  for (uint32_t i = 0; i < n_out; ++i) res.output_ports.push_back(static_cast<uint32_t>(n_in + i));
  return res;
}

}  // namespace mbpurify
