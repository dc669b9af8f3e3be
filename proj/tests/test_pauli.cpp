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

#include "mbpurify/pauli.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "mbpurify/dense.hpp"
#include "mbpurify/rng.hpp"

using namespace mbpurify;

TEST_CASE("single-qubit multiplication table matches dense matrices") {
  const char* names[] = {"I", "X", "Y", "Z"};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      PauliOperator pa = PauliOperator::from_string(names[a]);
      PauliOperator pb = PauliOperator::from_string(names[b]);
      DenseMatrix expected = dense_pauli_matrix(pa) * dense_pauli_matrix(pb);
      DenseMatrix got = dense_pauli_matrix(pa * pb);
      INFO(names[a] << " * " << names[b]);
      REQUIRE((expected - got).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("known product identities") {
  CHECK((PauliOperator::from_string("X") * PauliOperator::from_string("Z")).to_string() == "-iY");
  CHECK((PauliOperator::from_string("Z") * PauliOperator::from_string("X")).to_string() == "+iY");
  CHECK((PauliOperator::from_string("X") * PauliOperator::from_string("Y")).to_string() == "+iZ");
  CHECK((PauliOperator::from_string("Y") * PauliOperator::from_string("Y")).to_string() == "+I");
  CHECK((PauliOperator::from_string("-XX") * PauliOperator::from_string("XX")).to_string() ==
        "-II");
}

TEST_CASE("string round trip and sign handling") {
  for (const char* s : {"+XIZY", "-ZZ", "+iY", "-iXY", "+IIII"}) {
    CHECK(PauliOperator::from_string(s).to_string() == s);
  }
  CHECK(PauliOperator::from_string("Y").is_hermitian());
  CHECK(PauliOperator::from_string("-Y").sign_bit());
  CHECK_FALSE(PauliOperator::from_string("iY").is_hermitian());
  CHECK_THROWS_AS(PauliOperator::from_string("XQ"), std::invalid_argument);
}

TEST_CASE("commutation matches symplectic rule") {
  SplitRng rng(7, 0);
  for (int trial = 0; trial < 200; ++trial) {
    size_t n = 1 + rng.below(6);
    PauliOperator a(n), b(n);
    for (size_t q = 0; q < n; ++q) {
      a.set_pauli(q, static_cast<PauliKind>(rng.below(4)));
      b.set_pauli(q, static_cast<PauliKind>(rng.below(4)));
    }
    DenseMatrix ma = dense_pauli_matrix(a), mb = dense_pauli_matrix(b);
    bool dense_commute = ((ma * mb - mb * ma).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(a.commutes_with(b) == dense_commute);
  }
}

TEST_CASE("product of Hermitian Paulis keeps the phase convention consistent") {
  SplitRng rng(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    size_t n = 1 + rng.below(5);
    PauliOperator a(n), b(n);
    for (size_t q = 0; q < n; ++q) {
      a.set_pauli(q, static_cast<PauliKind>(rng.below(4)));
      b.set_pauli(q, static_cast<PauliKind>(rng.below(4)));
    }
    if (rng.bit()) a.negate();
    if (rng.bit()) b.negate();
    DenseMatrix expected = dense_pauli_matrix(a) * dense_pauli_matrix(b);
    REQUIRE((expected - dense_pauli_matrix(a * b)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("gate conjugations match dense conjugation") {
  SplitRng rng(13, 0);
  auto random_pauli = [&rng](size_t n) {
    PauliOperator p(n);
    for (size_t q = 0; q < n; ++q) p.set_pauli(q, static_cast<PauliKind>(rng.below(4)));
    if (rng.bit()) p.negate();
    return p;
  };
  size_t n = 3;
  auto dense_gate = [n](const Gate& g) {
    Eigen::Index dim = 1 << n;
    DenseMatrix u = DenseMatrix::Zero(dim, dim);
    for (Eigen::Index e = 0; e < dim; ++e) {
      DenseVector psi = DenseVector::Zero(dim);
      psi[e] = 1.0;
      dense_apply_gate(psi, g, n);
      u.col(e) = psi;
    }
    return u;
  };
  std::vector<Gate> gates = {Gate::h(0),       Gate::h(2),     Gate::s(1),     Gate::sdg(0),
                             Gate::x(1),       Gate::y(2),     Gate::z(0),     Gate::cnot(0, 1),
                             Gate::cnot(2, 0), Gate::cz(0, 2), Gate::cz(1, 0), Gate::swap(0, 2)};
  for (const Gate& g : gates) {
    DenseMatrix u = dense_gate(g);
    for (int trial = 0; trial < 40; ++trial) {
      PauliOperator p = random_pauli(n);
      PauliOperator q = p;
      switch (g.kind) {
        case GateKind::H: q.conj_h(g.a); break;
        case GateKind::S: q.conj_s(g.a); break;
        case GateKind::Sdg: q.conj_sdg(g.a); break;
        case GateKind::X: q.conj_x(g.a); break;
        case GateKind::Y: q.conj_y(g.a); break;
        case GateKind::Z: q.conj_z(g.a); break;
        case GateKind::CNOT: q.conj_cnot(g.a, g.b); break;
        case GateKind::CZ: q.conj_cz(g.a, g.b); break;
        case GateKind::Swap: q.conj_swap(g.a, g.b); break;
      }
      DenseMatrix expected = u * dense_pauli_matrix(p) * u.adjoint();
      REQUIRE((expected - dense_pauli_matrix(q)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("frame composition is XOR") {
  SplitRng rng(17, 0);
  for (int trial = 0; trial < 50; ++trial) {
    size_t n = 1 + rng.below(8);
    PauliFrame a(n), b(n);
    for (size_t q = 0; q < n; ++q) {
      a.set_x(q, rng.bit());
      a.set_z(q, rng.bit());
      b.set_x(q, rng.bit());
      b.set_z(q, rng.bit());
    }
    PauliFrame c = a;
    c ^= b;
    for (size_t q = 0; q < n; ++q) {
      CHECK(c.x_bit(q) == (a.x_bit(q) ^ b.x_bit(q)));
      CHECK(c.z_bit(q) == (a.z_bit(q) ^ b.z_bit(q)));
    }
    c ^= b;
    CHECK(c == a);
  }
}
