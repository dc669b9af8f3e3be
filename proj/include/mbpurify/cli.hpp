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

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include <json.hpp>

#include "mbpurify/analytics.hpp"
#include "mbpurify/engine.hpp"
#include "mbpurify/report.hpp"
#include "mbpurify/selftest.hpp"

namespace mbpurify::cli {

// Exit codes: 0 success, 1 selftest failure, 2 usage error, 3 infeasible
// parameters.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSelftestFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;

struct RunConfig {
  std::string command;
  std::string target = "all";               // bell | cluster1d | cluster2d | all
  std::string format = "json";              // json | csv
  std::string convention = "paper_product";  // paper_product | exact
  std::string output_path;                  // empty: stdout
  std::string mode = "mb";                  // mb | gate
  uint32_t n_pairs = 1024;
  uint32_t n_output = 0;  // 0: derive from delta
  double delta = 0.1;
  double fidelity = -1.0;  // input Werner fidelity; <0 means unset
  double q = -1.0;         // input LDN parameter; <0 means unset
  double p = 1.0;          // resource LDN parameter
  double gate_noise = 0.995;
  double q_from = 0.85;
  double q_to = 1.0;
  uint32_t steps = 16;
  uint32_t trials = 200;
  uint64_t seed = 0;
  double cutoff = 1e-6;
  unsigned threads = 0;
};

inline Convention parse_convention(const std::string& s) {
  if (s == "paper_product") return Convention::PaperProduct;
  if (s == "exact") return Convention::Exact;
  throw std::invalid_argument("unknown convention: " + s);
}

inline int cmd_thresholds(const RunConfig& cfg, std::ostream& os) {
  std::vector<ThresholdReport> reports;
  for (const ThresholdReport& r : all_threshold_reports()) {
    if (cfg.target == "all" || cfg.target == r.target) reports.push_back(r);
  }
  if (reports.empty()) return kExitUsage;
  if (cfg.format == "csv") {
    os << "target,convention,q_min,p_min,tolerable_noise\n";
    for (const auto& r : reports) {
      os << r.target << "," << convention_name(r.convention) << "," << format_sig10(r.q_min)
         << "," << format_sig10(r.p_min) << "," << format_sig10(r.tolerable_noise) << "\n";
    }
  } else {
    nlohmann::json out;
    out["thresholds"] = nlohmann::json::array();
    for (const auto& r : reports) {
      nlohmann::json item;
      item["target"] = r.target;
      item["convention"] = convention_name(r.convention);
      item["q_min"] = round_sig10(r.q_min);
      item["p_min"] = round_sig10(r.p_min);
      item["tolerable_noise"] = round_sig10(r.tolerable_noise);
      out["thresholds"].push_back(item);
    }
    os << out.dump(2) << "\n";
  }
  return kExitOk;
}

inline int cmd_yield_curve(const RunConfig& cfg, std::ostream& os) {
  if (!(cfg.q_from < cfg.q_to) || cfg.steps < 2) return kExitUsage;
  Convention conv = parse_convention(cfg.convention);
  os << "q,raw_yield,clamped_yield\n";
  for (uint32_t i = 0; i < cfg.steps; ++i) {
    double q = cfg.q_from +
               (cfg.q_to - cfg.q_from) * static_cast<double>(i) / (cfg.steps - 1);
    YieldValue y;
    if (cfg.target == "bell") {
      y = bell_yield(q, conv);
    } else if (cfg.target == "cluster1d") {
      y = cluster_yield(q, ClusterDim::One);
    } else if (cfg.target == "cluster2d") {
      y = cluster_yield(q, ClusterDim::Two);
    } else {
      return kExitUsage;
    }
    os << format_sig10(q) << "," << format_sig10(y.raw) << "," << format_sig10(y.clamped)
       << "\n";
  }
  return kExitOk;
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& os) {
  Convention conv = parse_convention(cfg.convention);
  if (cfg.q >= 0.0 && cfg.fidelity >= 0.0) return kExitUsage;
  double q = 1.0;
  if (cfg.q >= 0.0) {
    q = cfg.q;
  } else if (cfg.fidelity >= 0.0) {
    // Invert the chosen q -> F convention for the incoming pairs.
    if (conv == Convention::Exact) {
      q = ldn_param_from_fidelity_exact(cfg.fidelity);
    } else {
      if (cfg.fidelity < 0.0 || cfg.fidelity > 1.0) return kExitUsage;
      q = (4.0 * std::sqrt(cfg.fidelity) - 1.0) / 3.0;
    }
  }
  if (q < 0.0 || q > 1.0 || cfg.p < 0.0 || cfg.p > 1.0) return kExitUsage;
  if (cfg.n_pairs < 2 || cfg.trials == 0) return kExitUsage;
  if (cfg.mode != "mb" && cfg.mode != "gate") return kExitUsage;

  double effective = compose_ldn(cfg.p, q);
  double f_eff = werner_fidelity_exact(effective);
  BellDiagonalDistribution dist = BellDiagonalDistribution::werner(f_eff);

  nlohmann::json config_echo;
  config_echo["N"] = cfg.n_pairs;
  config_echo["convention"] = cfg.convention;
  config_echo["cutoff"] = round_sig10(cfg.cutoff);
  config_echo["delta"] = round_sig10(cfg.delta);
  config_echo["mode"] = cfg.mode;
  config_echo["p"] = round_sig10(cfg.p);
  config_echo["q"] = round_sig10(q);
  config_echo["seed"] = cfg.seed;
  config_echo["trials"] = cfg.trials;
  if (cfg.mode == "gate") config_echo["gate_noise"] = round_sig10(cfg.gate_noise);

  uint32_t m = cfg.n_output;
  if (m == 0) {
    try {
      m = safe_output_count(cfg.n_pairs, dist, cfg.delta);
    } catch (const std::domain_error&) {
      nlohmann::json err;
      err["config"] = config_echo;
      err["error"] = "below hashing threshold";
      err["entropy"] = round_sig10(dist.entropy_bits());
      err["fidelity_effective"] = round_sig10(f_eff);
      os << err.dump(2) << "\n";
      return kExitInfeasible;
    }
  }
  if (m >= cfg.n_pairs) return kExitUsage;
  config_echo["M"] = m;

  HashingPlan plan = make_hashing_plan(cfg.n_pairs, m, cfg.seed);
  ParityModel model = ParityModel::from_plan(plan);
  EngineOptions opts;
  opts.cutoff = cfg.cutoff;

  struct TrialStats {
    bool decoded = false;
    double good = 0.0;
  };
  auto outcomes = run_trials(
      cfg.trials,
      [&](size_t trial) {
        SplitRng rng(cfg.seed, trial + 1);
        PurificationOutcome out =
            cfg.mode == "mb"
                ? run_measurement_based(plan, cfg.p, q, rng, &model, opts)
                : run_gate_based(plan,
                                 sample_ensemble(BellDiagonalDistribution::werner(f_eff),
                                                 cfg.n_pairs, rng),
                                 cfg.gate_noise, rng, &model, opts);
        return TrialStats{out.decoded, out.good_fraction()};
      },
      cfg.threads);

  size_t decoded_trials = 0;
  double fid_sum = 0.0;
  for (const TrialStats& t : outcomes) {
    if (t.decoded) {
      ++decoded_trials;
      fid_sum += t.good;
    }
  }
  double success_rate = static_cast<double>(decoded_trials) / cfg.trials;
  double mean_fidelity = decoded_trials ? fid_sum / static_cast<double>(decoded_trials) : 0.0;

  nlohmann::json out;
  out["config"] = config_echo;
  out["decode_success_rate"] = round_sig10(success_rate);
  out["decoded_trials"] = decoded_trials;
  out["mean_output_fidelity"] = round_sig10(mean_fidelity);
  out["predicted_output_fidelity"] = round_sig10(werner_fidelity_exact(cfg.p));
  out["trials"] = cfg.trials;
  out["yield_asymptotic"] = round_sig10(1.0 - dist.entropy_bits());
  out["yield_empirical"] =
      round_sig10(success_rate * static_cast<double>(m) / static_cast<double>(cfg.n_pairs));
  os << out.dump(2) << "\n";
  return kExitOk;
}

inline int cmd_selftest(const RunConfig& cfg, std::ostream& os) {
  std::vector<SuiteResult> results = run_all_selftests(cfg.seed);
  bool all_ok = true;
  for (const SuiteResult& r : results) {
    os << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << " (" << std::fixed
       << std::setprecision(2) << r.seconds << " s)\n";
    os.unsetf(std::ios::floatfield);
    for (const std::string& f : r.failures) os << "       " << f << "\n";
    all_ok = all_ok && r.passed;
  }
  os << (all_ok ? "selftest: all suites passed\n" : "selftest: FAILURES above\n");
  return all_ok ? kExitOk : kExitSelftestFailure;
}

}  // namespace mbpurify::cli
