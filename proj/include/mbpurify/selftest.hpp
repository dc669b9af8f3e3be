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

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mbpurify/analytics.hpp"
#include "mbpurify/dense.hpp"
#include "mbpurify/engine.hpp"
#include "mbpurify/noise.hpp"
#include "mbpurify/resource.hpp"
#include "mbpurify/tableau.hpp"

namespace mbpurify {

/// Reduced-size invariant suites runnable from the CLI (`selftest`). These
/// re-check every module's documented invariants against the independent
/// dense/GF(2) oracles, so a miscompiled or corrupted build fails loudly.
struct SuiteResult {
  std::string name;
  bool passed = true;
  double seconds = 0.0;
  std::vector<std::string> failures;
};

class SuiteCheck {
 public:
  void check(bool cond, const std::string& msg) {
    if (!cond) failures.push_back(msg);
  }
  void near(double got, double expect, double tol, const std::string& msg) {
    if (!(std::abs(got - expect) <= tol)) {
      std::ostringstream os;
      os << msg << ": got " << got << ", expected " << expect << " +- " << tol;
      failures.push_back(os.str());
    }
  }
  std::vector<std::string> failures;
};

namespace selftest_detail {

inline Gate random_gate(size_t n, SplitRng& rng) {
  switch (n > 1 ? rng.below(4) : rng.below(2)) {
    case 0: return Gate::h(static_cast<uint32_t>(rng.below(n)));
    case 1: return Gate::s(static_cast<uint32_t>(rng.below(n)));
    case 2: {
      uint32_t a = static_cast<uint32_t>(rng.below(n));
      uint32_t b = static_cast<uint32_t>(rng.below(n - 1));
      if (b >= a) ++b;
      return Gate::cnot(a, b);
    }
    default: {
      uint32_t a = static_cast<uint32_t>(rng.below(n));
      uint32_t b = static_cast<uint32_t>(rng.below(n - 1));
      if (b >= a) ++b;
      return Gate::cz(a, b);
    }
  }
}

template <class Fn>
SuiteResult timed(const std::string& name, Fn&& body) {
  SuiteResult res;
  res.name = name;
  auto t0 = std::chrono::steady_clock::now();
  SuiteCheck c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  res.failures = std::move(c.failures);
  res.passed = res.failures.empty();
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace selftest_detail

/// Checks any claimed LDN label distribution against the dense channel; used
/// with ldn_single_qubit_distribution in the shipped suite and with corrupted
/// closures in the negative-control test.
inline void check_ldn_distribution_against_dense(
    const std::function<std::array<double, 4>(double)>& dist_fn, SuiteCheck& c) {
  for (double p : {0.0, 0.3, 0.8, 0.97, 1.0}) {
    std::array<double, 4> d = dist_fn(p);
    double sum = d[0] + d[1] + d[2] + d[3];
    c.near(sum, 1.0, 1e-12, "LDN label distribution must sum to 1");
    // The channel built from the claimed labels must equal D(p) on a dense
    // density matrix.
    SplitRng rng(41, static_cast<uint64_t>(p * 1e6));
    DenseMatrix rho = dense_random_density(2, rng);
    DenseMatrix via_labels = DenseMatrix::Zero(2, 2);
    for (int k = 0; k < 4; ++k) {
      DenseMatrix pk = dense_single_qubit_pauli(k);
      via_labels += d[k] * (pk * rho * pk);
    }
    DenseMatrix direct = dense_apply_ldn(rho, 0, 1, p);
    c.check((via_labels - direct).cwiseAbs().maxCoeff() < 1e-12,
            "LDN label distribution disagrees with the dense channel");
  }
}

inline SuiteResult selftest_pauli_core(uint64_t seed) {
  using selftest_detail::random_gate;
  return selftest_detail::timed("pauli_core", [seed](SuiteCheck& c) {
    // Tableau invariants and dense agreement through random circuits with
    // interleaved measurements.
    SplitRng rng(seed, 1);
    for (int trial = 0; trial < 12; ++trial) {
      size_t n = 2 + rng.below(4);
      StabilizerTableau t(n);
      DenseVector psi = DenseVector::Zero(Eigen::Index{1} << n);
      psi[0] = 1.0;
      for (int step = 0; step < 20; ++step) {
        if (rng.below(4) == 0) {
          PauliOperator obs(n);
          while (obs.is_identity_bits()) {
            for (size_t q = 0; q < n; ++q) obs.set_pauli(q, static_cast<PauliKind>(rng.below(4)));
          }
          MeasureResult r = t.measure_pauli(obs, rng);
          double prob = dense_project_pauli(psi, obs, r.outcome);
          c.near(prob, r.was_random ? 0.5 : 1.0, 1e-9, "measurement branch probability");
        } else {
          Gate g = random_gate(n, rng);
          t.apply(g);
          dense_apply_gate(psi, g, n);
        }
        try {
          t.validate();
        } catch (const std::exception& e) {
          c.check(false, std::string("tableau invariant broken: ") + e.what());
          return;
        }
        c.check(dense_equal_up_to_phase(dense_oracle(t), psi),
                "tableau state diverged from dense simulation");
      }
    }
    // Teleportation byproduct rule for all four outcomes.
    for (int bx = 0; bx < 2; ++bx) {
      for (int bz = 0; bz < 2; ++bz) {
        StabilizerTableau t(3);
        SplitRng trng(seed, 50 + bx * 2 + bz);
        for (int g = 0; g < 6; ++g) t.apply(random_gate(1, trng));
        StabilizerTableau single(1);
        {
          // Rebuild the same single-qubit state for reference.
          SplitRng srng(seed, 50 + bx * 2 + bz);
          for (int g = 0; g < 6; ++g) single.apply(random_gate(1, srng));
        }
        t.apply_h(1);
        t.apply_cnot(1, 2);
        BellMeasureResult r = t.bell_measure_forced(0, 1, bx, bz);
        StabilizerTableau expect = single;
        expect.apply_pauli(0, r.z_outcome, r.x_outcome);
        PauliOperator s = expect.stabilizer(0);
        PauliOperator embedded(3);
        embedded.set_pauli(2, s.pauli_at(0));
        if (s.sign_bit()) embedded.negate();
        c.check(t.stabilizes(embedded), "teleportation byproduct X^bz Z^bx violated");
      }
    }
    // Born statistics at reduced size: X on |0> is a fair coin.
    size_t ones = 0;
    const size_t trials = 4000;
    for (size_t s = 0; s < trials; ++s) {
      StabilizerTableau t(1);
      SplitRng mrng(seed, 1000 + s);
      ones += t.measure_pauli(PauliOperator::from_string("X"), mrng).outcome;
    }
    double sigma = std::sqrt(0.25 * trials);
    c.check(std::abs(static_cast<double>(ones) - 0.5 * trials) < 5 * sigma,
            "X measurement on |0> deviates from a fair coin by more than 5 sigma");
  });
}

inline SuiteResult selftest_noise(uint64_t seed) {
  return selftest_detail::timed("noise", [seed](SuiteCheck& c) {
    check_ldn_distribution_against_dense(
        [](double p) { return ldn_single_qubit_distribution(p); }, c);

    // Composition law on dense superoperators, exact to machine precision.
    SplitRng rng(seed, 2);
    for (int trial = 0; trial < 20; ++trial) {
      double p = rng.uniform(), q = rng.uniform();
      DenseMatrix lhs = dense_ldn_superop_1q(p) * dense_ldn_superop_1q(q);
      DenseMatrix rhs = dense_ldn_superop_1q(compose_ldn(p, q));
      c.check((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12,
              "D(p) D(q) != D(pq) on dense superoperators");
    }

    // Noise exchange across Bell projections.
    for (int trial = 0; trial < 25; ++trial) {
      double p = rng.uniform();
      DenseMatrix rho = dense_random_density(4, rng);
      for (int bell = 0; bell < 4; ++bell) {
        c.check(verify_noise_exchange(p, rho, bell),
                "noise exchange identity violated on a random density matrix");
      }
    }

    // Two-sided LDN(q) sampling on |phi+> reproduces the Werner fidelity
    // (3q^2+1)/4 within a 5 sigma binomial band.
    double q = 0.9;
    const size_t samples = 20000;
    size_t kept = 0;
    SplitRng srng(seed, 3);
    for (size_t s = 0; s < samples; ++s) {
      auto [a1, b1] = sample_ldn_label_flip(q, srng);
      auto [a2, b2] = sample_ldn_label_flip(q, srng);
      if (a1 == a2 && b1 == b2) ++kept;
    }
    double expect = werner_fidelity_exact(q);
    double sigma = std::sqrt(expect * (1 - expect) * samples);
    c.check(std::abs(static_cast<double>(kept) - expect * samples) < 5 * sigma,
            "sampled two-sided LDN disagrees with the Werner fidelity (3q^2+1)/4");

    c.near(fidelity_scaling(1.0, 17), 1.0, 1e-15, "fidelity_scaling at p=1");
    c.near(fidelity_scaling(0.9, 0), 1.0, 1e-15, "fidelity_scaling at n=0");
  });
}

inline SuiteResult selftest_resource(uint64_t seed) {
  return selftest_detail::timed("resource", [seed](SuiteCheck& c) {
    // Plan shape, determinism, and subset sizing.
    HashingPlan plan = make_hashing_plan(16, 4, seed);
    HashingPlan plan2 = make_hashing_plan(16, 4, seed);
    c.check(plan.rounds.size() == 12, "plan must have N - M rounds");
    bool same = plan.rounds.size() == plan2.rounds.size();
    for (size_t r = 0; same && r < plan.rounds.size(); ++r) {
      same = plan.rounds[r].subset == plan2.rounds[r].subset &&
             plan.rounds[r].target == plan2.rounds[r].target &&
             plan.rounds[r].type == plan2.rounds[r].type;
    }
    c.check(same, "plans with equal seeds must be identical");

    double subset_ratio = 0.0;
    size_t count = 0;
    for (uint64_t s = 0; s < 100; ++s) {
      HashingPlan p = make_hashing_plan(12, 3, seed * 1000 + s);
      size_t surviving = 12;
      for (const auto& round : p.rounds) {
        subset_ratio += static_cast<double>(round.subset.size()) / surviving;
        ++count;
        --surviving;
      }
    }
    subset_ratio /= static_cast<double>(count);
    c.near(subset_ratio, 0.5, 0.05, "mean subset size should be about half the survivors");

    // Resource size N + M for a grid of shapes.
    for (auto [n, m] : {std::pair<uint32_t, uint32_t>{2, 1}, {4, 2}, {6, 3}, {8, 2}}) {
      HashingPlan p = make_hashing_plan(n, m, seed + n + m);
      ResourceState res = jamiolkowski_resource(plan_to_circuit(p, Party::A), Party::A);
      c.check(res.qubit_count() == n + m, "resource must hold exactly N + M qubits");
      c.check(res.tableau.n_qubits() == n + m, "resource tableau width mismatch");
    }

    // Measurement-based vs gate-based parity transcripts on planted strings.
    SplitRng rng(seed, 4);
    for (uint64_t s = 0; s < 60; ++s) {
      uint32_t n = 3 + s % 6;
      uint32_t m = 1 + s % (n - 1);
      HashingPlan p = make_hashing_plan(n, m, seed + 17 * s);
      ParityModel model = ParityModel::from_plan(p);
      std::vector<uint8_t> labels(n);
      for (auto& l : labels) l = static_cast<uint8_t>(rng.below(4));
      FullTableauRun full = run_full_tableau(p, labels, rng);
      BitVec bits = labels_to_bits(labels);
      c.check(full.transcript == model.transcript_of(bits),
              "tableau read-in transcript differs from the classical parity model");
      for (size_t j = 0; j < full.output_labels.size(); ++j) {
        c.check(full.output_labels[j] == model.output_label(j, bits),
                "tableau output label differs from the classical model");
      }
    }

    // Byproduct map linearity.
    HashingPlan p = make_hashing_plan(6, 2, seed + 5);
    ResourceState res = jamiolkowski_resource(plan_to_circuit(p, Party::A), Party::A);
    SplitRng brng(seed, 6);
    for (int trial = 0; trial < 30; ++trial) {
      BitVec o1(2 * res.n_in()), o2(2 * res.n_in());
      for (size_t i = 0; i < o1.size(); ++i) {
        o1.set(i, brng.bit());
        o2.set(i, brng.bit());
      }
      BitVec o12 = o1;
      o12 ^= o2;
      DecodedReadIn d1 = res.apply_byproduct_map(o1);
      DecodedReadIn d2 = res.apply_byproduct_map(o2);
      DecodedReadIn d12 = res.apply_byproduct_map(o12);
      BitVec parity_sum = d1.parity_bits;
      parity_sum ^= d2.parity_bits;
      PauliFrame frame_sum = d1.frame;
      frame_sum ^= d2.frame;
      c.check(d12.parity_bits == parity_sum, "byproduct map parity bits are not linear");
      c.check(d12.frame == frame_sum, "byproduct map frame is not linear");
    }

    // Serialization round trip preserves the stabilizer group and the map.
    std::string text = res.serialize();
    ResourceState back = ResourceState::deserialize(text);
    c.check(back.byproduct_map == res.byproduct_map, "byproduct map changed in round trip");
    c.check(back.qubit_count() == res.qubit_count(), "qubit count changed in round trip");
    bool group_ok = true;
    for (size_t i = 0; i < res.tableau.n_qubits(); ++i) {
      group_ok = group_ok && back.tableau.stabilizes(res.tableau.stabilizer(i)) &&
                 res.tableau.stabilizes(back.tableau.stabilizer(i));
    }
    c.check(group_ok, "stabilizer group changed in serialization round trip");
  });
}

inline SuiteResult selftest_engine(uint64_t seed) {
  return selftest_detail::timed("engine", [seed](SuiteCheck& c) {
    // Noiseless gate-based transcripts equal the symbolic parity model.
    SplitRng rng(seed, 7);
    for (uint64_t s = 0; s < 40; ++s) {
      HashingPlan plan = make_hashing_plan(12, 3, seed + s);
      ParityModel model = ParityModel::from_plan(plan);
      BellDiagonalEnsemble ens = sample_ensemble(BellDiagonalDistribution::werner(0.85), 12, rng);
      PurificationOutcome out = run_gate_based(plan, ens, 1.0, rng, &model);
      c.check(out.transcript == model.transcript_of(labels_to_bits(ens.labels)),
              "noiseless gate-based transcript disagrees with the parity model");
    }

    // Exhaustive decoding recovers planted strings in the noiseless protocol.
    size_t decoded = 0, trials = 40;
    HashingPlan plan = make_hashing_plan(12, 2, seed + 3);
    ParityModel model = ParityModel::from_plan(plan);
    for (size_t t = 0; t < trials; ++t) {
      SplitRng trng(seed, 100 + t);
      BellDiagonalEnsemble ens =
          sample_ensemble(BellDiagonalDistribution::werner(0.95), 12, trng);
      PurificationOutcome out = run_gate_based(plan, ens, 1.0, trng, &model);
      decoded += out.decoded;
      if (out.decoded) {
        c.check(out.good_fraction() == 1.0,
                "decoded trial must leave perfect outputs in the noiseless run");
      }
    }
    c.check(decoded >= trials / 2, "exhaustive decoder fails too often at N=12, F=0.95");

    // Perfect parameters give perfect results in the measurement-based path.
    SplitRng prng(seed, 8);
    HashingPlan small = make_hashing_plan(8, 2, seed + 4);
    PurificationOutcome perfect = run_measurement_based(small, 1.0, 1.0, prng);
    c.check(perfect.decoded, "p=q=1 must decode");
    c.check(perfect.good_fraction() == 1.0, "p=q=1 must give perfect outputs");

    // safe_output_count pins.
    c.check(safe_output_count(1024, 0.95) == 547, "safe_output_count(1024, F=0.95) != 547");
    c.check(safe_output_count(100, 1.0, 0.1) == 90, "safe_output_count at F=1");
    bool threw = false;
    try {
      safe_output_count(100, 0.81, 0.0);
    } catch (const std::domain_error&) {
      threw = true;
    }
    c.check(threw, "S(W) >= 1 must be rejected");
  });
}

inline SuiteResult selftest_analytics(uint64_t seed) {
  return selftest_detail::timed("analytics", [seed](SuiteCheck& c) {
    c.near(binary_entropy(0.5, 0.5), 1.0, 1e-12, "S(1/2,1/2)");
    c.near(binary_entropy(1.0, 0.0), 0.0, 1e-12, "S(1,0)");
    c.near(werner_entropy(1.0), 0.0, 1e-12, "S(W(1))");
    c.near(werner_entropy(0.25), 2.0, 1e-12, "S(W(1/4))");
    c.near(f_min_hashing(), 0.8107, 2e-4, "hashing threshold F_min");
    c.near(q_min_bell(Convention::PaperProduct), 0.8672, 5e-4, "q_min (product form)");
    c.near(q_min_bell(Convention::Exact), 0.8646, 5e-4, "q_min (exact form)");
    c.near(q_min_cluster(ClusterDim::One), 0.9204, 1e-3, "q_min 1D cluster");
    c.near(q_min_cluster(ClusterDim::Two), 0.9515, 1e-3, "q_min 2D cluster");
    c.near(p_min_from_qmin("bell", Convention::PaperProduct, 0.8672).tolerable_noise, 0.069,
           1e-3, "tolerable noise, Bell pairs");

    // The 1D coefficient collapses to 6 e (pt + e)^2.
    SplitRng rng(seed, 9);
    for (int t = 0; t < 1000; ++t) {
      double q = rng.uniform();
      double pt = p_tilde(q), e = (1.0 - pt) / 3.0;
      c.near(a1_1d(q), 6.0 * e * (pt + e) * (pt + e), 1e-12, "a1_1d algebraic identity");
    }

    // Monotonicity of the coefficients and yields.
    double prev1 = a1_1d(0.8), prev2 = a1_2d(0.8);
    double prev_yield = cluster_yield(0.8, ClusterDim::One).raw;
    for (double q = 0.805; q <= 1.0 + 1e-12; q += 0.005) {
      double v1 = a1_1d(q), v2 = a1_2d(q);
      c.check(v1 < prev1 && v2 < prev2, "a1 coefficients must decrease in q on [0.8, 1]");
      double y = cluster_yield(q, ClusterDim::One).raw;
      c.check(y > prev_yield, "raw 1D yield must increase in q");
      prev1 = v1;
      prev2 = v2;
      prev_yield = y;
    }
    c.near(a1_1d(1.0), 0.0, 1e-15, "a1_1d(1)");
    c.near(a1_2d(1.0), 0.0, 1e-15, "a1_2d(1)");

    // Feasibility boundary: just above p_min a feasible q exists, just below
    // none does (scan over a 10^4-point grid).
    double q_min = q_min_bell(Convention::PaperProduct);
    double p_min = std::sqrt(q_min);
    auto any_feasible = [&](double p) {
      for (int i = 0; i <= 10000; ++i) {
        double q = static_cast<double>(i) / 10000.0;
        if (feasibility(p, q, q_min)) return true;
      }
      return false;
    };
    c.check(any_feasible(p_min + 1e-3), "no feasible q just above p_min");
    c.check(!any_feasible(p_min - 1e-3), "feasible q found below p_min");
  });
}

inline std::vector<SuiteResult> run_all_selftests(uint64_t seed) {
  return {selftest_pauli_core(seed), selftest_noise(seed), selftest_resource(seed),
          selftest_engine(seed), selftest_analytics(seed)};
}

}  // namespace mbpurify
