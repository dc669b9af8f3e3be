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
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mbpurify/analytics.hpp"
#include "mbpurify/gf2.hpp"
#include "mbpurify/noise.hpp"
#include "mbpurify/resource.hpp"
#include "mbpurify/rng.hpp"
#include "mbpurify/tableau.hpp"

namespace mbpurify {

/// i.i.d. per-pair distribution over the four Bell states, indexed by the
/// 2-bit error label a + 2b where the pair's state is (I x X^a Z^b)|phi+>.
/// a is the amplitude (bit-flip) error, b the phase error.
struct BellDiagonalDistribution {
  std::array<double, 4> lambda;

  BellDiagonalDistribution() : lambda{1.0, 0.0, 0.0, 0.0} {}

  explicit BellDiagonalDistribution(const std::array<double, 4>& l) : lambda(l) {
    double sum = 0.0;
    for (double v : lambda) {
      if (v < 0.0) throw std::invalid_argument("negative Bell-diagonal weight");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
  }

  static BellDiagonalDistribution werner(double fidelity) {
    if (fidelity < 0.0 || fidelity > 1.0) throw std::invalid_argument("fidelity outside [0,1]");
    double w = (1.0 - fidelity) / 3.0;
    return BellDiagonalDistribution({fidelity, w, w, w});
  }

  double fidelity() const { return lambda[0]; }

  /// Shannon entropy in bits; equals S(W) for a Werner distribution.
  double entropy_bits() const {
    double s = 0.0;
    for (double v : lambda) {
      if (v > 0.0) s -= v * std::log2(v);
    }
    return s;
  }

  uint8_t sample_label(SplitRng& rng) const {
    double u = rng.uniform();
    double acc = 0.0;
    for (uint8_t k = 0; k < 3; ++k) {
      acc += lambda[k];
      if (u < acc) return k;
    }
    return 3;
  }
};

struct BellDiagonalEnsemble {
  uint32_t n_pairs = 0;
  BellDiagonalDistribution distribution;
  std::vector<uint8_t> labels;  // a | (b << 1) per pair
};

inline BellDiagonalEnsemble sample_ensemble(const BellDiagonalDistribution& dist,
                                            uint32_t n_pairs, SplitRng& rng) {
  BellDiagonalEnsemble e;
  e.n_pairs = n_pairs;
  e.distribution = dist;
  e.labels.resize(n_pairs);
  for (uint32_t i = 0; i < n_pairs; ++i) e.labels[i] = dist.sample_label(rng);
  return e;
}

inline BitVec labels_to_bits(const std::vector<uint8_t>& labels) {
  BitVec e(2 * labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    e.set(2 * i, labels[i] & 1);
    e.set(2 * i + 1, (labels[i] >> 1) & 1);
  }
  return e;
}

/// Symbolic GF(2) model of a plan: each revealed parity bit and each output
/// pair's final error bits as linear functionals of the initial 2N error
/// bits (column 2i = amplitude of pair i, 2i+1 = phase of pair i).
///
/// Derived by propagating basis rows through the bilateral-CNOT update rules
/// (a_t ^= a_c, b_c ^= b_t), so it is an independent route to the same
/// parities the bit-level runners compute by direct evolution.
struct ParityModel {
  uint32_t n_pairs = 0;
  uint32_t n_output = 0;
  BitMatrix parity_rows;        // (N-M) x 2N
  BitMatrix output_amp_rows;    // M x 2N
  BitMatrix output_phase_rows;  // M x 2N
  std::vector<uint32_t> output_pair_ids;

  static ParityModel from_plan(const HashingPlan& plan) {
    uint32_t n = plan.n_pairs;
    ParityModel m;
    m.n_pairs = n;
    m.n_output = plan.n_output;
    std::vector<BitVec> amp(n), phase(n);
    for (uint32_t i = 0; i < n; ++i) {
      amp[i] = BitVec(2 * n);
      amp[i].set(2 * i, true);
      phase[i] = BitVec(2 * n);
      phase[i].set(2 * i + 1, true);
    }
    m.parity_rows = BitMatrix(0, 2 * n);
    for (const auto& round : plan.rounds) {
      uint32_t t = round.target;
      if (round.type == ParityType::Amplitude) {
        for (uint32_t s : round.subset) {
          amp[t] ^= amp[s];
          phase[s] ^= phase[t];
        }
        m.parity_rows.append_row(amp[t]);
      } else {
        for (uint32_t s : round.subset) {
          amp[s] ^= amp[t];
          phase[t] ^= phase[s];
        }
        m.parity_rows.append_row(phase[t]);
      }
    }
    m.output_pair_ids = plan.surviving_pairs();
    m.output_amp_rows = BitMatrix(0, 2 * n);
    m.output_phase_rows = BitMatrix(0, 2 * n);
    for (uint32_t o : m.output_pair_ids) {
      m.output_amp_rows.append_row(amp[o]);
      m.output_phase_rows.append_row(phase[o]);
    }
    return m;
  }

  uint32_t n_rounds() const { return n_pairs - n_output; }

  BitVec transcript_of(const BitVec& error_bits) const {
    return parity_rows.mul_vec(error_bits);
  }

  bool consistent(const BitVec& error_bits, const BitVec& transcript) const {
    for (size_t r = 0; r < parity_rows.n_rows(); ++r) {
      if (parity_rows.row(r).dot(error_bits) != transcript.get(r)) return false;
    }
    return true;
  }

  uint8_t output_label(size_t slot, const BitVec& error_bits) const {
    uint8_t a = output_amp_rows.row(slot).dot(error_bits) ? 1 : 0;
    uint8_t b = output_phase_rows.row(slot).dot(error_bits) ? 1 : 0;
    return a | (b << 1);
  }
};

// -- Maximum-likelihood decoding ---------------------------------------------

enum class DecodeStatus : uint8_t {
  Decoded,        // unique maximum-likelihood consistent string found
  Ambiguous,      // several consistent strings tie at maximal likelihood
  NoCandidate,    // nothing in the cutoff set matches the transcript
  GenieSuccess,   // large-N scoring: truth consistent, no sampled impostor
  GenieFailure,   // large-N scoring: truth inconsistent or impostor found
};

struct DecodeResult {
  DecodeStatus status;
  BitVec string;  // populated for Decoded
  double log_prob = 0.0;
};

inline std::array<double, 4> label_log_probs(const BellDiagonalDistribution& dist) {
  std::array<double, 4> lp{};
  for (int k = 0; k < 4; ++k) {
    lp[k] = dist.lambda[k] > 0.0 ? std::log(dist.lambda[k])
                                 : -std::numeric_limits<double>::infinity();
  }
  return lp;
}

inline double string_log_prob(const BitVec& e, const std::array<double, 4>& lp) {
  size_t n = e.size() / 2;
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    int label = (e.get(2 * i) ? 1 : 0) | (e.get(2 * i + 1) ? 2 : 0);
    s += lp[label];
  }
  return s;
}

/// Exhaustive maximum-likelihood search over every error string whose prior
/// probability is at least cutoff times the most likely string's. Returns the
/// unique ML consistent string, or Ambiguous / NoCandidate. Intended for
/// N <= 20; throws when the cutoff set would be unreasonably large.
inline DecodeResult decode_ml(const BitVec& transcript, const ParityModel& model,
                              const BellDiagonalDistribution& dist, double cutoff = 1e-6) {
  if (transcript.size() != model.n_rounds()) {
    throw std::invalid_argument("transcript length must equal the round count");
  }
  if (cutoff <= 0.0 || cutoff > 1.0) throw std::invalid_argument("cutoff outside (0,1]");
  size_t n = model.n_pairs;
  std::array<double, 4> lp = label_log_probs(dist);
  double lp0 = lp[0];
  if (!(lp0 > -std::numeric_limits<double>::infinity())) {
    throw std::invalid_argument("identity label needs nonzero prior");
  }
  double max_err = std::max({lp[1], lp[2], lp[3]});
  double log_cutoff = std::log(cutoff);

  size_t k_max = 0;
  if (max_err > -std::numeric_limits<double>::infinity()) {
    double per_error = max_err - lp0;  // negative for F > 1/4
    k_max = per_error < 0.0 ? std::min<size_t>(n, static_cast<size_t>(log_cutoff / per_error))
                            : n;
  }

  double budget = 0.0;
  {
    double total = 0.0, binom = 1.0;
    for (size_t k = 0; k <= k_max; ++k) {
      total += binom;
      binom *= 3.0 * static_cast<double>(n - k) / static_cast<double>(k + 1);
    }
    budget = total;
  }
  if (budget > 2e7) {
    throw std::invalid_argument("cutoff set too large for exhaustive decoding");
  }

  double floor_logp = log_cutoff + static_cast<double>(n) * lp0;
  DecodeResult best{DecodeStatus::NoCandidate, BitVec(2 * n),
                    -std::numeric_limits<double>::infinity()};
  bool tie = false;

  BitVec cand(2 * n);
  std::vector<size_t> pos(k_max ? k_max : 1);
  std::vector<int> label(k_max ? k_max : 1);

  auto consider = [&](size_t k) {
    double logp = static_cast<double>(n - k) * lp0;
    for (size_t j = 0; j < k; ++j) logp += lp[label[j]];
    if (logp < floor_logp - 1e-12 || !std::isfinite(logp)) return;
    if (!model.consistent(cand, transcript)) return;
    if (logp > best.log_prob + 1e-9) {
      best.status = DecodeStatus::Decoded;
      best.string = cand;
      best.log_prob = logp;
      tie = false;
    } else if (logp > best.log_prob - 1e-9) {
      tie = true;
    }
  };

  // k = 0: the all-identity string.
  consider(0);
  for (size_t k = 1; k <= k_max; ++k) {
    for (size_t j = 0; j < k; ++j) pos[j] = j;
    for (;;) {
      for (size_t j = 0; j < k; ++j) label[j] = 1;
      for (size_t j = 0; j < k; ++j) {
        cand.set(2 * pos[j], true);    // label 1 = amplitude error
        cand.set(2 * pos[j] + 1, false);
      }
      for (;;) {
        consider(k);
        size_t j = 0;
        while (j < k) {
          if (label[j] < 3) {
            ++label[j];
            cand.set(2 * pos[j], label[j] & 1);
            cand.set(2 * pos[j] + 1, (label[j] >> 1) & 1);
            break;
          }
          label[j] = 1;
          cand.set(2 * pos[j], true);
          cand.set(2 * pos[j] + 1, false);
          ++j;
        }
        if (j == k) break;
      }
      for (size_t j = 0; j < k; ++j) {
        cand.set(2 * pos[j], false);
        cand.set(2 * pos[j] + 1, false);
      }
      // next position combination
      size_t j = k;
      while (j-- > 0) {
        if (pos[j] + (k - j) < n) {
          ++pos[j];
          for (size_t l = j + 1; l < k; ++l) pos[l] = pos[l - 1] + 1;
          break;
        }
        if (j == 0) {
          j = k + 1;  // signal done
          break;
        }
      }
      if (j == k + 1) break;
    }
  }

  if (best.status == DecodeStatus::Decoded && tie) {
    return {DecodeStatus::Ambiguous, BitVec(2 * n), best.log_prob};
  }
  return best;
}

inline DecodeResult decode_ml(const BitVec& transcript, const HashingPlan& plan,
                              const BellDiagonalDistribution& dist, double cutoff = 1e-6) {
  return decode_ml(transcript, ParityModel::from_plan(plan), dist, cutoff);
}

/// Large-N genie-aided scoring: success means the true string reproduces the
/// transcript and none of n_impostors fresh prior draws is both consistent
/// with the transcript and at least as likely as the truth.
inline bool genie_sampled_success(const ParityModel& model, const BitVec& transcript,
                                  const BitVec& truth, const BellDiagonalDistribution& dist,
                                  size_t n_impostors, SplitRng& rng) {
  if (!model.consistent(truth, transcript)) return false;
  std::array<double, 4> lp = label_log_probs(dist);
  double truth_logp = string_log_prob(truth, lp);
  size_t n = model.n_pairs;
  BitVec imp(2 * n);
  for (size_t t = 0; t < n_impostors; ++t) {
    double logp = 0.0;
    bool same = true;
    for (size_t i = 0; i < n; ++i) {
      uint8_t label = dist.sample_label(rng);
      logp += lp[label];
      bool a = label & 1, b = (label >> 1) & 1;
      imp.set(2 * i, a);
      imp.set(2 * i + 1, b);
      if (a != truth.get(2 * i) || b != truth.get(2 * i + 1)) same = false;
    }
    if (same) continue;
    if (logp + 1e-12 < truth_logp) continue;
    if (model.consistent(imp, transcript)) return false;
  }
  return true;
}

/// log2 of the number of strings with at most k non-identity labels,
/// sum_{j<=k} C(N,j) 3^j, evaluated stably in log space.
inline double log2_strings_within_weight(size_t n, size_t k) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  terms.reserve(k + 1);
  for (size_t j = 0; j <= k && j <= n; ++j) {
    double lg = (std::lgamma(static_cast<double>(n) + 1.0) -
                 std::lgamma(static_cast<double>(j) + 1.0) -
                 std::lgamma(static_cast<double>(n - j) + 1.0)) /
                    std::log(2.0) +
                static_cast<double>(j) * std::log2(3.0);
    terms.push_back(lg);
    best = std::max(best, lg);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp2(t - best);
  return best + std::log2(sum);
}

/// Expected-impostor-count form of the genie criterion: success when the
/// truth is consistent and the at-least-as-likely candidate set (strings of
/// no greater error weight) is smaller than half the 2^(N-M) syndrome space,
/// so the expected number of confusable strings is below 1/2. Unlike the
/// sampled criterion this resolves the capacity transition at large N; the
/// sampled test cannot see impostor sets rarer than ~1/n_impostors.
inline bool genie_counting_success(const ParityModel& model, const BitVec& transcript,
                                   const BitVec& truth) {
  if (!model.consistent(truth, transcript)) return false;
  size_t k = 0;
  for (size_t i = 0; i < model.n_pairs; ++i) {
    if (truth.get(2 * i) || truth.get(2 * i + 1)) ++k;
  }
  double lhs = log2_strings_within_weight(model.n_pairs, k);
  return lhs <= static_cast<double>(model.n_rounds()) - 1.0;
}

/// Number of output pairs to attempt at finite N: floor(N (1 - S - delta)),
/// at least 1. Throws when S >= 1 - delta (nothing distillable at this
/// margin).
inline uint32_t safe_output_count(uint32_t n_pairs, const BellDiagonalDistribution& dist,
                                  double delta = 0.1) {
  double s = dist.entropy_bits();
  if (s >= 1.0 - delta) {
    throw std::domain_error("below hashing threshold: S(W) >= 1 - delta");
  }
  double m = std::floor(static_cast<double>(n_pairs) * (1.0 - s - delta));
  return m < 1.0 ? 1u : static_cast<uint32_t>(m);
}

inline uint32_t safe_output_count(uint32_t n_pairs, double fidelity, double delta = 0.1) {
  return safe_output_count(n_pairs, BellDiagonalDistribution::werner(fidelity), delta);
}

// -- Protocol runners --------------------------------------------------------

struct PurificationOutcome {
  bool decoded = false;            // decoder pinned the true string
  DecodeStatus status = DecodeStatus::NoCandidate;
  uint32_t surviving_outputs = 0;  // = M
  BitVec transcript;
  /// Post-correction success per output pair, using the decoder's string
  /// (all false when decoding failed). Output noise, when modeled, is
  /// already applied.
  std::vector<bool> output_good;
  /// Same, but corrected with the true string regardless of decoding; this
  /// isolates the physical residual error rate from decoder failures.
  std::vector<bool> genie_good;

  double good_fraction() const {
    if (output_good.empty()) return 0.0;
    double c = 0.0;
    for (bool g : output_good) c += g ? 1.0 : 0.0;
    return c / static_cast<double>(output_good.size());
  }
  double genie_good_fraction() const {
    if (genie_good.empty()) return 0.0;
    double c = 0.0;
    for (bool g : genie_good) c += g ? 1.0 : 0.0;
    return c / static_cast<double>(genie_good.size());
  }
};

struct EngineOptions {
  double cutoff = 1e-6;        // exhaustive decoder likelihood cutoff
  size_t impostor_draws = 10000;
  size_t exhaustive_limit = 20;  // largest N decoded exhaustively
  bool counting_criterion = false;  // use expected-count genie scoring
};

namespace detail {

struct ClassicalRun {
  std::vector<uint8_t> amp, phase;  // evolved per-pair error bits
  BitVec transcript;
};

/// Direct bit-level evolution of the plan. gate_noise < 1 injects an LDN
/// label flip on all four particles touched by each bilateral CNOT.
inline ClassicalRun run_classical(const HashingPlan& plan, const std::vector<uint8_t>& labels,
                                  double gate_noise, SplitRng& rng) {
  uint32_t n = plan.n_pairs;
  ClassicalRun run;
  run.amp.resize(n);
  run.phase.resize(n);
  for (uint32_t i = 0; i < n; ++i) {
    run.amp[i] = labels[i] & 1;
    run.phase[i] = (labels[i] >> 1) & 1;
  }
  run.transcript = BitVec(plan.n_rounds());
  bool noisy = gate_noise < 1.0;
  size_t round_idx = 0;
  for (const auto& round : plan.rounds) {
    uint32_t t = round.target;
    for (uint32_t s : round.subset) {
      if (round.type == ParityType::Amplitude) {
        run.amp[t] ^= run.amp[s];
        run.phase[s] ^= run.phase[t];
      } else {
        run.amp[s] ^= run.amp[t];
        run.phase[t] ^= run.phase[s];
      }
      if (noisy) {
        for (uint32_t pair : {s, t}) {
          for (int particle = 0; particle < 2; ++particle) {
            auto [fa, fb] = sample_ldn_label_flip(gate_noise, rng);
            run.amp[pair] ^= fa ? 1 : 0;
            run.phase[pair] ^= fb ? 1 : 0;
          }
        }
      }
    }
    bool parity = round.type == ParityType::Amplitude ? run.amp[t] : run.phase[t];
    run.transcript.set(round_idx++, parity);
  }
  return run;
}

struct DecodeOutcome {
  bool success = false;
  DecodeStatus status = DecodeStatus::NoCandidate;
  bool have_string = false;
  BitVec string;
};

inline DecodeOutcome run_decoder(const ParityModel& model, const BitVec& transcript,
                                 const BitVec& truth, const BellDiagonalDistribution& dist,
                                 const EngineOptions& opts, SplitRng& rng) {
  DecodeOutcome out;
  if (model.n_pairs <= opts.exhaustive_limit) {
    DecodeResult res = decode_ml(transcript, model, dist, opts.cutoff);
    out.status = res.status;
    if (res.status == DecodeStatus::Decoded) {
      out.have_string = true;
      out.string = res.string;
      out.success = res.string == truth;
    }
    return out;
  }
  bool ok = opts.counting_criterion
                ? genie_counting_success(model, transcript, truth)
                : genie_sampled_success(model, transcript, truth, dist, opts.impostor_draws, rng);
  out.status = ok ? DecodeStatus::GenieSuccess : DecodeStatus::GenieFailure;
  out.success = ok;
  if (ok) {
    out.have_string = true;
    out.string = truth;
  }
  return out;
}

}  // namespace detail

/// Gate-based execution on the classical Bell-label representation:
/// bilateral CNOTs with LDN(gate_noise) on every touched particle after each
/// two-qubit gate, ideal parity readout, then maximum-likelihood decoding
/// against the noiseless parity model.
inline PurificationOutcome run_gate_based(const HashingPlan& plan,
                                          const BellDiagonalEnsemble& ensemble,
                                          double gate_noise, SplitRng& rng,
                                          const ParityModel* model_ptr = nullptr,
                                          const EngineOptions& opts = {}) {
  if (ensemble.n_pairs != plan.n_pairs) throw std::invalid_argument("ensemble size mismatch");
  check_ldn_param(gate_noise);
  ParityModel local;
  if (!model_ptr) {
    local = ParityModel::from_plan(plan);
    model_ptr = &local;
  }
  const ParityModel& model = *model_ptr;

  detail::ClassicalRun run = detail::run_classical(plan, ensemble.labels, gate_noise, rng);
  BitVec truth = labels_to_bits(ensemble.labels);
  detail::DecodeOutcome dec =
      detail::run_decoder(model, run.transcript, truth, ensemble.distribution, opts, rng);

  PurificationOutcome out;
  out.decoded = dec.success;
  out.status = dec.status;
  out.surviving_outputs = plan.n_output;
  out.transcript = run.transcript;
  out.output_good.assign(plan.n_output, false);
  out.genie_good.assign(plan.n_output, false);
  for (size_t j = 0; j < model.output_pair_ids.size(); ++j) {
    uint32_t o = model.output_pair_ids[j];
    uint8_t actual = static_cast<uint8_t>(run.amp[o] | (run.phase[o] << 1));
    out.genie_good[j] = actual == model.output_label(j, truth);
    if (dec.have_string) {
      out.output_good[j] = actual == model.output_label(j, dec.string);
    }
  }
  return out;
}

/// Measurement-based execution in the equivalent-noise picture: the resource
/// noise p is exchanged onto the incoming pairs (per-particle parameter pq),
/// the noiseless protocol runs on the classical representation (validated
/// against the full tableau read-in path at small N), and LDN(p) hits each
/// output particle in the final step.
inline PurificationOutcome run_measurement_based(const HashingPlan& plan, double p, double q,
                                                 SplitRng& rng,
                                                 const ParityModel* model_ptr = nullptr,
                                                 const EngineOptions& opts = {}) {
  check_ldn_param(p);
  check_ldn_param(q);
  ParityModel local;
  if (!model_ptr) {
    local = ParityModel::from_plan(plan);
    model_ptr = &local;
  }
  const ParityModel& model = *model_ptr;

  double effective = compose_ldn(p, q);
  BellDiagonalDistribution dist =
      BellDiagonalDistribution::werner(werner_fidelity_exact(effective));
  BellDiagonalEnsemble ensemble = sample_ensemble(dist, plan.n_pairs, rng);

  detail::ClassicalRun run = detail::run_classical(plan, ensemble.labels, 1.0, rng);
  BitVec truth = labels_to_bits(ensemble.labels);
  detail::DecodeOutcome dec = detail::run_decoder(model, run.transcript, truth, dist, opts, rng);

  PurificationOutcome out;
  out.decoded = dec.success;
  out.status = dec.status;
  out.surviving_outputs = plan.n_output;
  out.transcript = run.transcript;
  out.output_good.assign(plan.n_output, false);
  out.genie_good.assign(plan.n_output, false);
  for (size_t j = 0; j < model.output_pair_ids.size(); ++j) {
    uint32_t o = model.output_pair_ids[j];
    uint8_t actual = static_cast<uint8_t>(run.amp[o] | (run.phase[o] << 1));
    uint8_t residual_genie = actual ^ model.output_label(j, truth);
    uint8_t residual_dec =
        dec.have_string ? static_cast<uint8_t>(actual ^ model.output_label(j, dec.string)) : 0;
    // Output-port noise: LDN(p) on both particles of the output pair.
    uint8_t flip = 0;
    for (int particle = 0; particle < 2; ++particle) {
      auto [fa, fb] = sample_ldn_label_flip(p, rng);
      flip ^= static_cast<uint8_t>((fa ? 1 : 0) | (fb ? 2 : 0));
    }
    out.genie_good[j] = (residual_genie ^ flip) == 0;
    if (dec.have_string) out.output_good[j] = (residual_dec ^ flip) == 0;
  }
  return out;
}

// -- Full two-party tableau reference ----------------------------------------

struct FullTableauRun {
  BitVec transcript;
  std::vector<uint8_t> output_labels;  // after byproduct-frame correction
};

/// Physics-level reference for the classical paths: builds both parties'
/// Jamiolkowski resources, plants the error string on real Bell pairs in one
/// joint tableau, reads everything in with Bell measurements, decodes parity
/// bits through the byproduct maps, and measures the corrected output pairs.
/// Slow; meant for N <= 8 cross-checks.
inline FullTableauRun run_full_tableau(const HashingPlan& plan,
                                       const std::vector<uint8_t>& labels, SplitRng& rng) {
  if (labels.size() != plan.n_pairs) throw std::invalid_argument("label count mismatch");
  CliffordCircuit circ = plan_to_circuit(plan, Party::A);
  ResourceState res_a = jamiolkowski_resource(circ, Party::A, plan.seed);
  ResourceState res_b = jamiolkowski_resource(circ, Party::B, plan.seed);
  size_t nr = res_a.qubit_count();
  size_t n = plan.n_pairs;

  StabilizerTableau joint = StabilizerTableau::tensor(
      StabilizerTableau::tensor(res_a.tableau, res_b.tableau), StabilizerTableau::bell_pairs(n));
  size_t base = 2 * nr;
  for (size_t i = 0; i < n; ++i) {
    joint.apply_pauli(base + 2 * i + 1, labels[i] & 1, (labels[i] >> 1) & 1);
  }

  BitVec bits_a(2 * n), bits_b(2 * n);
  for (size_t i = 0; i < n; ++i) {
    BellMeasureResult r = joint.bell_measure(res_a.input_ports[i], base + 2 * i, rng);
    bits_a.set(2 * i, r.x_outcome);
    bits_a.set(2 * i + 1, r.z_outcome);
  }
  for (size_t i = 0; i < n; ++i) {
    BellMeasureResult r = joint.bell_measure(nr + res_b.input_ports[i], base + 2 * i + 1, rng);
    bits_b.set(2 * i, r.x_outcome);
    bits_b.set(2 * i + 1, r.z_outcome);
  }

  DecodedReadIn dec_a = res_a.apply_byproduct_map(bits_a);
  DecodedReadIn dec_b = res_b.apply_byproduct_map(bits_b);

  FullTableauRun out;
  out.transcript = dec_a.parity_bits;
  out.transcript ^= dec_b.parity_bits;

  size_t n_out = res_a.n_out();
  out.output_labels.resize(n_out);
  for (size_t j = 0; j < n_out; ++j) {
    size_t qa = res_a.output_ports[j];
    size_t qb = nr + res_b.output_ports[j];
    joint.apply_pauli(qa, dec_a.frame.x_bit(j), dec_a.frame.z_bit(j));
    joint.apply_pauli(qb, dec_b.frame.x_bit(j), dec_b.frame.z_bit(j));
    PauliOperator zz(joint.n_qubits()), xx(joint.n_qubits());
    zz.set_pauli(qa, PauliKind::Z);
    zz.set_pauli(qb, PauliKind::Z);
    xx.set_pauli(qa, PauliKind::X);
    xx.set_pauli(qb, PauliKind::X);
    MeasureResult mz = joint.measure_pauli(zz, rng);
    MeasureResult mx = joint.measure_pauli(xx, rng);
    if (mz.was_random || mx.was_random) {
      throw std::logic_error("corrected output pair is not in a Bell state");
    }
    out.output_labels[j] =
        static_cast<uint8_t>((mz.outcome ? 1 : 0) | ((mx.outcome ? 1 : 0) << 1));
  }
  return out;
}

// -- Parallel trial driver ----------------------------------------------------

/// Default worker count; the MBPURIFY_THREADS environment variable overrides.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("MBPURIFY_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) return 1;
  return std::min(hw, 16u);
}

/// Runs fn(trial_id) for every trial, in parallel, and returns results
/// ordered by trial id. Each trial derives everything from its id (its own
/// rng stream included), so reports fold deterministically no matter how the
/// work was scheduled.
template <class Fn>
auto run_trials(size_t n_trials, Fn&& fn, unsigned threads = 0)
    -> std::vector<decltype(fn(size_t{0}))> {
  using Result = decltype(fn(size_t{0}));
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<size_t>(threads, n_trials ? n_trials : 1));
  std::vector<Result> results(n_trials);
  if (threads <= 1) {
    for (size_t i = 0; i < n_trials; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n_trials) return;
        results[i] = fn(i);
      }
    });
  }
  for (auto& t : workers) t.join();
  return results;
}

}  // namespace mbpurify
