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

namespace mbpurify {

/// Counter-based splittable random stream keyed by (master seed, stream id).
///
/// Output word i is mix64(key + i * gamma), so a stream is a pure function of
/// its key and counter. Distinct stream ids give statistically independent
/// sequences, which lets Monte Carlo trials run in parallel while staying
/// bit-reproducible: trial t always uses stream t regardless of scheduling.
class SplitRng {
 public:
  SplitRng() : SplitRng(0, 0) {}

  SplitRng(uint64_t master_seed, uint64_t stream)
      : key_(mix64(master_seed ^ kGamma) ^ mix64(stream + kStreamSalt)),
        counter_(0) {}

  uint64_t next() { return mix64(key_ + ++counter_ * kGamma); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bit() { return (next() >> 63) != 0; }

  /// Uniform integer in [0, n); n must be positive. Rejection sampling keeps
  /// the draw exactly uniform.
  uint64_t below(uint64_t n) {
    uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

 private:
  static constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ull;
  static constexpr uint64_t kStreamSalt = 0xd1b54a32d192ed03ull;

  static uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  uint64_t key_;
  uint64_t counter_;
};

}  // namespace mbpurify
