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

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

#include "mbpurify/circuit.hpp"
#include "mbpurify/pauli.hpp"
#include "mbpurify/rng.hpp"
#include "mbpurify/tableau.hpp"

namespace mbpurify {

using Complex = std::complex<double>;
using DenseVector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;

/// Dense state vectors are limited to this many qubits; everything dense is
/// a test oracle, not a production path.
inline constexpr size_t kMaxDenseQubits = 12;

namespace detail {
inline constexpr Complex kPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

inline void check_dense_size(size_t n) {
  if (n > kMaxDenseQubits) throw std::invalid_argument("dense oracle limited to 12 qubits");
}
}  // namespace detail

/// Applies an n-qubit Pauli to a dense state: i^r X^x Z^z |e> =
/// i^r (-1)^{z.e} |e xor x>.
inline DenseVector dense_apply_pauli(const PauliOperator& p, const DenseVector& psi) {
  size_t n = p.n_qubits();
  detail::check_dense_size(n);
  uint64_t xm = n ? p.x_bits().words()[0] : 0;
  uint64_t zm = n ? p.z_bits().words()[0] : 0;
  Complex front = detail::kPhases[p.phase_exp()];
  DenseVector out(psi.size());
  for (Eigen::Index e = 0; e < psi.size(); ++e) {
    Complex amp = psi[e] * front;
    if (std::popcount(static_cast<uint64_t>(e) & zm) & 1) amp = -amp;
    out[static_cast<Eigen::Index>(static_cast<uint64_t>(e) ^ xm)] = amp;
  }
  return out;
}

inline DenseMatrix dense_pauli_matrix(const PauliOperator& p) {
  size_t n = p.n_qubits();
  detail::check_dense_size(n);
  Eigen::Index dim = Eigen::Index{1} << n;
  DenseMatrix m = DenseMatrix::Zero(dim, dim);
  uint64_t xm = n ? p.x_bits().words()[0] : 0;
  uint64_t zm = n ? p.z_bits().words()[0] : 0;
  Complex front = detail::kPhases[p.phase_exp()];
  for (Eigen::Index e = 0; e < dim; ++e) {
    Complex amp = front;
    if (std::popcount(static_cast<uint64_t>(e) & zm) & 1) amp = -amp;
    m(static_cast<Eigen::Index>(static_cast<uint64_t>(e) ^ xm), e) = amp;
  }
  return m;
}

/// Unit-norm dense state stabilized by every generator of the tableau.
/// Independent of the tableau's Clifford update machinery: it projects a
/// computational basis state with prod_i (I + S_i)/2.
inline DenseVector dense_oracle(const StabilizerTableau& t) {
  size_t n = t.n_qubits();
  detail::check_dense_size(n);
  Eigen::Index dim = Eigen::Index{1} << n;
  double tol = 0.5 / static_cast<double>(dim);
  for (Eigen::Index e0 = 0; e0 < dim; ++e0) {
    DenseVector psi = DenseVector::Zero(dim);
    psi[e0] = 1.0;
    for (size_t i = 0; i < n; ++i) {
      psi = 0.5 * (psi + dense_apply_pauli(t.stabilizer(i), psi));
    }
    double norm2 = psi.squaredNorm();
    if (norm2 > tol) return psi / std::sqrt(norm2);
  }
  throw std::logic_error("stabilizer projector annihilated every basis state");
}

inline void dense_apply_gate(DenseVector& psi, const Gate& g, size_t n) {
  detail::check_dense_size(n);
  auto bit = [](Eigen::Index e, size_t q) { return (e >> q) & 1; };
  Eigen::Index dim = psi.size();
  const Complex i1(0, 1);
  switch (g.kind) {
    case GateKind::H: {
      DenseVector out = DenseVector::Zero(dim);
      double s = 1.0 / std::sqrt(2.0);
      for (Eigen::Index e = 0; e < dim; ++e) {
        Eigen::Index f = e ^ (Eigen::Index{1} << g.a);
        if (bit(e, g.a) == 0) {
          out[e] += s * psi[e];
          out[f] += s * psi[e];
        } else {
          out[f] += s * psi[e];
          out[e] -= s * psi[e];
        }
      }
      psi = std::move(out);
      break;
    }
    case GateKind::S:
      for (Eigen::Index e = 0; e < dim; ++e) {
        if (bit(e, g.a)) psi[e] *= i1;
      }
      break;
    case GateKind::Sdg:
      for (Eigen::Index e = 0; e < dim; ++e) {
        if (bit(e, g.a)) psi[e] *= -i1;
      }
      break;
    case GateKind::X: {
      DenseVector out(dim);
      for (Eigen::Index e = 0; e < dim; ++e) out[e ^ (Eigen::Index{1} << g.a)] = psi[e];
      psi = std::move(out);
      break;
    }
    case GateKind::Y: {
      DenseVector out(dim);
      for (Eigen::Index e = 0; e < dim; ++e) {
        out[e ^ (Eigen::Index{1} << g.a)] = psi[e] * (bit(e, g.a) ? -i1 : i1);
      }
      psi = std::move(out);
      break;
    }
    case GateKind::Z:
      for (Eigen::Index e = 0; e < dim; ++e) {
        if (bit(e, g.a)) psi[e] = -psi[e];
      }
      break;
    case GateKind::CNOT: {
      DenseVector out(dim);
      for (Eigen::Index e = 0; e < dim; ++e) {
        out[bit(e, g.a) ? e ^ (Eigen::Index{1} << g.b) : e] = psi[e];
      }
      psi = std::move(out);
      break;
    }
    case GateKind::CZ:
      for (Eigen::Index e = 0; e < dim; ++e) {
        if (bit(e, g.a) && bit(e, g.b)) psi[e] = -psi[e];
      }
      break;
    case GateKind::Swap: {
      DenseVector out(dim);
      for (Eigen::Index e = 0; e < dim; ++e) {
        bool ba = bit(e, g.a), bb = bit(e, g.b);
        Eigen::Index f = e;
        if (ba != bb) f = e ^ (Eigen::Index{1} << g.a) ^ (Eigen::Index{1} << g.b);
        out[f] = psi[e];
      }
      psi = std::move(out);
      break;
    }
  }
}

/// Projects onto the (-1)^outcome eigenspace of a Hermitian Pauli and
/// renormalizes. Returns the Born probability of that branch.
inline double dense_project_pauli(DenseVector& psi, const PauliOperator& obs, bool outcome) {
  if (!obs.is_hermitian()) throw std::invalid_argument("observable with imaginary sign");
  DenseVector p_psi = dense_apply_pauli(obs, psi);
  DenseVector proj = 0.5 * (psi + (outcome ? -1.0 : 1.0) * p_psi);
  double prob = proj.squaredNorm();
  if (prob > 1e-12) {
    psi = proj / std::sqrt(prob);
  }
  return prob;
}

/// True when |<a|b>| = 1 up to tol, i.e. the states match up to global phase.
inline bool dense_equal_up_to_phase(const DenseVector& a, const DenseVector& b,
                                    double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  return std::abs(1.0 - std::abs(Complex(a.dot(b)))) < tol;
}

/// Bell state (I tensor X^a Z^b)|phi+> on two qubits; qubit 0 is the
/// low-order index bit.
inline DenseVector dense_bell_state(bool a, bool b) {
  DenseVector psi = DenseVector::Zero(4);
  double s = 1.0 / std::sqrt(2.0);
  // |e>_q0 |e ^ a>_q1 with phase (-1)^(b*e)
  psi[0 + ((a ? 1 : 0) << 1)] = s;
  psi[1 + ((a ? 0 : 1) << 1)] = b ? -s : s;
  return psi;
}

inline DenseMatrix dense_bell_projector(bool a, bool b) {
  DenseVector v = dense_bell_state(a, b);
  return v * v.adjoint();
}

inline DenseMatrix dense_single_qubit_pauli(int k) {
  DenseMatrix m(2, 2);
  const Complex i1(0, 1);
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -i1, i1, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("Pauli index out of range");
  }
  return m;
}

inline DenseMatrix dense_embed_1q(const DenseMatrix& op, size_t qubit, size_t n) {
  DenseMatrix out = DenseMatrix::Identity(1, 1);
  // Qubit 0 is the low-order index bit, so each new factor goes on the high
  // side of the running Kronecker product.
  for (size_t q = 0; q < n; ++q) {
    const DenseMatrix& factor = (q == qubit) ? op : DenseMatrix::Identity(2, 2);
    DenseMatrix next(out.rows() * 2, out.cols() * 2);
    next.block(0, 0, out.rows(), out.cols()) = factor(0, 0) * out;
    next.block(0, out.cols(), out.rows(), out.cols()) = factor(0, 1) * out;
    next.block(out.rows(), 0, out.rows(), out.cols()) = factor(1, 0) * out;
    next.block(out.rows(), out.cols(), out.rows(), out.cols()) = factor(1, 1) * out;
    out = std::move(next);
  }
  return out;
}

/// Local depolarizing channel D(p) on one qubit of an n-qubit density matrix:
/// D(p) rho = p rho + (1-p)/4 (rho + X rho X + Y rho Y + Z rho Z).
inline DenseMatrix dense_apply_ldn(const DenseMatrix& rho, size_t qubit, size_t n, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("LDN parameter outside [0,1]");
  DenseMatrix out = p * rho + ((1.0 - p) / 4.0) * rho;
  for (int k = 1; k <= 3; ++k) {
    DenseMatrix pk = dense_embed_1q(dense_single_qubit_pauli(k), qubit, n);
    out += ((1.0 - p) / 4.0) * (pk * rho * pk);
  }
  return out;
}

/// Column-vectorization superoperator of the single-qubit channel D(p):
/// vec(D(p) rho) = S(p) vec(rho), S(p) = p I + (1-p)/4 sum_P conj(P) kron P.
inline DenseMatrix dense_ldn_superop_1q(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("LDN parameter outside [0,1]");
  DenseMatrix s = DenseMatrix::Zero(4, 4);
  for (int k = 0; k <= 3; ++k) {
    DenseMatrix pk = dense_single_qubit_pauli(k);
    DenseMatrix kron(4, 4);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        kron.block(2 * i, 2 * j, 2, 2) = std::conj(pk(i, j)) * pk;
      }
    }
    double w = (k == 0) ? (p + (1.0 - p) / 4.0) : (1.0 - p) / 4.0;
    s += w * kron;
  }
  return s;
}

/// Random density matrix from the Ginibre ensemble (G G^dagger normalized).
inline DenseMatrix dense_random_density(size_t dim, SplitRng& rng) {
  auto gauss = [&rng]() {
    double u1 = rng.uniform(), u2 = rng.uniform();
    while (u1 <= 1e-300) u1 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  };
  DenseMatrix g(dim, dim);
  for (size_t i = 0; i < dim; ++i) {
    for (size_t j = 0; j < dim; ++j) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex(gauss(), gauss());
  }
  DenseMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

/// Validity check used before channel-identity comparisons: Hermitian,
/// unit trace, positive semidefinite (up to tol).
inline void dense_check_density(const DenseMatrix& rho, double tol = 1e-9) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix not square");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("density matrix not Hermitian");
  }
  if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) {
    throw std::invalid_argument("density matrix not positive semidefinite");
  }
}

}  // namespace mbpurify
