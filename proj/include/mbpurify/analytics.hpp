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
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbpurify {

inline double log2_safe(double x) { return std::log2(x); }

/// Binary entropy S(a0, a1) = -a0 log2 a0 - a1 log2 a1 with 0 log 0 = 0.
/// The two weights must be nonnegative and sum to 1 within 1e-12.
inline double binary_entropy(double a0, double a1) {
  if (a0 < 0.0 || a1 < 0.0) throw std::invalid_argument("negative entropy weight");
  if (std::abs(a0 + a1 - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
  double s = 0.0;
  if (a0 > 0.0) s -= a0 * log2_safe(a0);
  if (a1 > 0.0) s -= a1 * log2_safe(a1);
  return s;
}

/// Von Neumann entropy of a Werner state of fidelity F:
/// S = -F log2 F - (1-F) log2((1-F)/3), for F in [1/4, 1].
inline double werner_entropy(double fidelity) {
  if (fidelity < 0.25 || fidelity > 1.0) {
    throw std::invalid_argument("Werner fidelity outside [1/4, 1]");
  }
  double s = 0.0;
  if (fidelity > 0.0) s -= fidelity * log2_safe(fidelity);
  double rest = 1.0 - fidelity;
  if (rest > 0.0) s -= rest * log2_safe(rest / 3.0);
  return s;
}

/// Bisection with absolute tolerance on the argument. Requires a sign change
/// on [lo, hi].
inline double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-8, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw std::invalid_argument("bisection bracket has no sign change");
  }
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Minimal Werner fidelity the hashing protocol can purify: the root of
/// S(W) = 1 (yield 1 - S(W) hits zero), about 0.8107.
inline double f_min_hashing() {
  return bisect_root([](double f) { return werner_entropy(f) - 1.0; }, 0.2500001, 1.0);
}

/// q -> F conversion conventions for two-sided LDN on a Bell pair.
/// PaperProduct is the per-particle product form ((3q+1)/4)^2, consistent
/// with the quoted q_min ~ 0.8672; Exact is (3q^2+1)/4, which gives 0.8646.
enum class Convention : uint8_t { PaperProduct, Exact };

inline const char* convention_name(Convention c) {
  return c == Convention::PaperProduct ? "paper_product" : "exact";
}

/// Minimal LDN parameter of the incoming Bell pairs for hashing to work.
inline double q_min_bell(Convention convention) {
  double f_min = f_min_hashing();
  if (convention == Convention::PaperProduct) {
    // ((3q+1)/4)^2 = F_min
    return (4.0 * std::sqrt(f_min) - 1.0) / 3.0;
  }
  // (3q^2+1)/4 = F_min
  return std::sqrt((4.0 * f_min - 1.0) / 3.0);
}

/// Both purification feasibility conditions: pq > q_min and p > q.
inline bool feasibility(double p, double q, double q_min) {
  return p * q > q_min && p > q;
}

struct ThresholdReport {
  std::string target;      // bell | cluster1d | cluster2d
  Convention convention;
  double q_min;
  double p_min;            // sqrt(q_min)
  double tolerable_noise;  // 1 - p_min
};

inline ThresholdReport p_min_from_qmin(const std::string& target, Convention convention,
                                       double q_min) {
  if (q_min <= 0.0 || q_min > 1.0) throw std::invalid_argument("q_min outside (0,1]");
  double p_min = std::sqrt(q_min);
  return {target, convention, q_min, p_min, 1.0 - p_min};
}

inline double p_tilde(double q) { return (3.0 * q + 1.0) / 4.0; }

enum class ClusterDim : uint8_t { One, Two };

/// Probability that LDN with parameter q flips a given graph-basis index of
/// the 1D cluster state (vertex plus its two neighbors), written exactly as
/// the closed-form sum over error patterns.
inline double a1_1d(double q) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("q outside [0,1]");
  double pt = p_tilde(q);
  double e = (1.0 - pt) / 3.0;
  return 2.0 * e * (pt * pt + 2.0 * pt * e + e * e) + (pt + e) * (4.0 * e * (pt + e));
}

/// 2D cluster version (vertex plus its four neighbors).
inline double a1_2d(double q) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("q outside [0,1]");
  double pt = p_tilde(q);
  double e = (1.0 - pt) / 3.0;
  double pt2 = pt * pt, pt3 = pt2 * pt, pt4 = pt2 * pt2;
  double e2 = e * e, e3 = e2 * e, e4 = e2 * e2;
  double bracket1 = pt4 + 4.0 * pt3 * e + 4.0 * pt * e3 + 6.0 * pt2 * e2 + e4 +
                    24.0 * e2 * (2.0 * e * pt + pt2 + e2) + 16.0 * e4;
  double bracket2 = 8.0 * e * (3.0 * e * pt2 + 3.0 * e2 * pt + pt3 + e3) +
                    32.0 * (pt + e) * e3;
  return 2.0 * e * bracket1 + (pt + e) * bracket2;
}

inline double a1_cluster(double q, ClusterDim dim) {
  return dim == ClusterDim::One ? a1_1d(q) : a1_2d(q);
}

struct ClusterCoefficients {
  double q;
  double p_tilde;
  double a0;
  double a1;
  ClusterDim dimension;
};

inline ClusterCoefficients cluster_coefficients(double q, ClusterDim dim) {
  double a1 = a1_cluster(q, dim);
  return {q, p_tilde(q), 1.0 - a1, a1, dim};
}

struct YieldValue {
  double raw;      // may be negative below threshold
  double clamped;  // max(raw, 0)
};

/// Hashing yield of a translation-invariant cluster state under LDN(q):
/// D = 1 - 2 S(a0, a1). Periodic boundary conditions make the per-vertex
/// entropies equal, so the two color-class maxima collapse to one value.
inline YieldValue cluster_yield(double q, ClusterDim dim) {
  double a1 = a1_cluster(q, dim);
  double raw = 1.0 - 2.0 * binary_entropy(1.0 - a1, a1);
  return {raw, raw > 0.0 ? raw : 0.0};
}

/// Bell-pair yield 1 - S(W) at the Werner fidelity the chosen convention
/// assigns to LDN(q). Throws std::invalid_argument when the conversion lands
/// below F = 1/4 (possible for small q in the product convention).
inline YieldValue bell_yield(double q, Convention convention) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("q outside [0,1]");
  double f;
  if (convention == Convention::PaperProduct) {
    double t = p_tilde(q);
    f = t * t;
  } else {
    f = (3.0 * q * q + 1.0) / 4.0;
  }
  if (f < 0.25) throw std::invalid_argument("fidelity below 1/4 for this q and convention");
  double raw = 1.0 - werner_entropy(f);
  return {raw, raw > 0.0 ? raw : 0.0};
}

/// Threshold LDN parameter where the cluster yield changes sign.
inline double q_min_cluster(ClusterDim dim) {
  return bisect_root([dim](double q) { return cluster_yield(q, dim).raw; }, 0.8, 1.0);
}

inline std::vector<ThresholdReport> all_threshold_reports() {
  std::vector<ThresholdReport> out;
  out.push_back(p_min_from_qmin("bell", Convention::PaperProduct,
                                q_min_bell(Convention::PaperProduct)));
  out.push_back(p_min_from_qmin("bell", Convention::Exact, q_min_bell(Convention::Exact)));
  double q1 = q_min_cluster(ClusterDim::One);
  double q2 = q_min_cluster(ClusterDim::Two);
  out.push_back(p_min_from_qmin("cluster1d", Convention::PaperProduct, q1));
  out.push_back(p_min_from_qmin("cluster2d", Convention::PaperProduct, q2));
  return out;
}

}  // namespace mbpurify
