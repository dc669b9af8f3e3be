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

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "mbpurify/dense.hpp"
#include "mbpurify/pauli.hpp"
#include "mbpurify/rng.hpp"

namespace mbpurify {

/// Local depolarizing noise parameters: p for locally prepared resource
/// states, q for the incoming pairs to be purified.
struct NoiseParams {
  double p = 1.0;
  double q = 1.0;

  NoiseParams() = default;
  NoiseParams(double p_, double q_) : p(p_), q(q_) {
    if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0) {
      throw std::invalid_argument("noise parameters must lie in [0,1]");
    }
  }
};

inline void check_ldn_param(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("LDN parameter outside [0,1]");
}

/// Kraus-label distribution of D(p) over {I, X, Y, Z}:
/// P(I) = (1+3p)/4, P(X) = P(Y) = P(Z) = (1-p)/4.
inline std::array<double, 4> ldn_single_qubit_distribution(double p) {
  check_ldn_param(p);
  double e = (1.0 - p) / 4.0;
  return {p + e, e, e, e};
}

/// One Pauli draw from the single-qubit LDN label distribution.
inline PauliKind sample_ldn_single(double p, SplitRng& rng) {
  double e = (1.0 - p) / 4.0;
  double u = rng.uniform();
  if (u < p + e) return PauliKind::I;
  if (u < p + 2 * e) return PauliKind::X;
  if (u < p + 3 * e) return PauliKind::Y;
  return PauliKind::Z;
}

/// Monte Carlo unraveling of D(p) on the listed qubits: independent per-qubit
/// Pauli draws, identity elsewhere.
inline PauliOperator sample_ldn(double p, size_t n_qubits, std::span<const size_t> qubits,
                                SplitRng& rng) {
  check_ldn_param(p);
  PauliOperator out(n_qubits);
  for (size_t q : qubits) {
    if (q >= n_qubits) throw std::out_of_range("qubit index out of range");
    out.set_pauli(q, sample_ldn_single(p, rng));
  }
  return out;
}

/// LDN label flip on one particle of a Bell pair, expressed as (amplitude,
/// phase) bit flips of the pair's Bell-basis label: X flips the amplitude
/// bit, Z the phase bit, Y both.
inline std::pair<bool, bool> sample_ldn_label_flip(double p, SplitRng& rng) {
  switch (sample_ldn_single(p, rng)) {
    case PauliKind::I: return {false, false};
    case PauliKind::X: return {true, false};
    case PauliKind::Y: return {true, true};
    case PauliKind::Z: return {false, true};
  }
  return {false, false};
}

/// D(p) D(q) = D(pq).
inline double compose_ldn(double p, double q) {
  check_ldn_param(p);
  check_ldn_param(q);
  return p * q;
}

/// Leading-order fidelity of an n-particle state under per-particle LDN:
/// ((3p+1)/4)^n.
inline double fidelity_scaling(double p, size_t n) {
  check_ldn_param(p);
  return std::pow((3.0 * p + 1.0) / 4.0, static_cast<double>(n));
}

/// Werner fidelity of a Bell pair with D(q) applied to both particles
/// (exact): (3q^2+1)/4.
inline double werner_fidelity_exact(double q) {
  check_ldn_param(q);
  return (3.0 * q * q + 1.0) / 4.0;
}

/// Per-particle product form ((3q+1)/4)^2. This is the convention consistent
/// with the quoted Bell-pair threshold q_min ~ 0.8672; the exact two-sided
/// conversion above gives 0.8646. Both are exposed so reports can label which
/// convention produced a number.
inline double werner_fidelity_product(double q) {
  check_ldn_param(q);
  double f = (3.0 * q + 1.0) / 4.0;
  return f * f;
}

/// Inverse of werner_fidelity_exact on [1/4, 1].
inline double ldn_param_from_fidelity_exact(double fidelity) {
  if (fidelity < 0.25 || fidelity > 1.0) {
    throw std::invalid_argument("Werner fidelity outside [1/4, 1]");
  }
  return std::sqrt((4.0 * fidelity - 1.0) / 3.0);
}

/// Noise-exchange identity behind the threshold derivation: projecting onto a
/// Bell state makes LDN on particle 1 interchangeable with LDN on particle 2,
///   P_B D_1(rho) P_B = P_B D_2(rho) P_B.
/// Returns true iff both sides agree entrywise within tol. The input must be
/// a valid two-qubit density matrix.
inline bool verify_noise_exchange(double p, const DenseMatrix& rho, int bell_index,
                                  double tol = 1e-12) {
  check_ldn_param(p);
  if (rho.rows() != 4 || rho.cols() != 4) {
    throw std::invalid_argument("noise exchange needs a two-qubit density matrix");
  }
  dense_check_density(rho);
  if (bell_index < 0 || bell_index > 3) throw std::invalid_argument("Bell index out of range");
  bool a = bell_index & 1, b = (bell_index >> 1) & 1;
  DenseMatrix proj = dense_bell_projector(a, b);
  DenseMatrix lhs = proj * dense_apply_ldn(rho, 0, 2, p) * proj;
  DenseMatrix rhs = proj * dense_apply_ldn(rho, 1, 2, p) * proj;
  return (lhs - rhs).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace mbpurify
