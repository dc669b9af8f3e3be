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

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbpurify {

/// Bit vector over GF(2), packed 64 bits per machine word.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  size_t size() const { return n_; }

  bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  void set(size_t i, bool v) {
    uint64_t mask = uint64_t{1} << (i & 63);
    if (v) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }

  void flip(size_t i) { words_[i >> 6] ^= uint64_t{1} << (i & 63); }

  BitVec& operator^=(const BitVec& o) {
    if (o.n_ != n_) throw std::invalid_argument("BitVec size mismatch");
    for (size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    return *this;
  }

  /// GF(2) inner product: parity of the AND of the two vectors.
  bool dot(const BitVec& o) const {
    if (o.n_ != n_) throw std::invalid_argument("BitVec size mismatch");
    uint64_t acc = 0;
    for (size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & o.words_[w];
    return std::popcount(acc) & 1;
  }

  size_t popcount() const {
    size_t c = 0;
    for (uint64_t w : words_) c += std::popcount(w);
    return c;
  }

  bool any() const {
    for (uint64_t w : words_) {
      if (w) return true;
    }
    return false;
  }

  void clear() {
    for (uint64_t& w : words_) w = 0;
  }

  bool operator==(const BitVec& o) const = default;

  const std::vector<uint64_t>& words() const { return words_; }
  std::vector<uint64_t>& words() { return words_; }

  /// Hex encoding, 4 bits per character, lowest-index bits first.
  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    size_t n_nibbles = (n_ + 3) / 4;
    s.reserve(n_nibbles);
    for (size_t k = 0; k < n_nibbles; ++k) {
      unsigned nib = 0;
      for (size_t b = 0; b < 4; ++b) {
        size_t i = 4 * k + b;
        if (i < n_ && get(i)) nib |= 1u << b;
      }
      s.push_back(digits[nib]);
    }
    return s;
  }

  static BitVec from_hex(const std::string& s, size_t n) {
    BitVec v(n);
    size_t n_nibbles = (n + 3) / 4;
    if (s.size() != n_nibbles) throw std::invalid_argument("hex length mismatch");
    for (size_t k = 0; k < n_nibbles; ++k) {
      char c = s[k];
      unsigned nib;
      if (c >= '0' && c <= '9') {
        nib = static_cast<unsigned>(c - '0');
      } else if (c >= 'a' && c <= 'f') {
        nib = static_cast<unsigned>(c - 'a') + 10;
      } else if (c >= 'A' && c <= 'F') {
        nib = static_cast<unsigned>(c - 'A') + 10;
      } else {
        throw std::invalid_argument("invalid hex character");
      }
      for (size_t b = 0; b < 4; ++b) {
        size_t i = 4 * k + b;
        if (i < n) {
          v.set(i, (nib >> b) & 1);
        } else if ((nib >> b) & 1) {
          throw std::invalid_argument("hex has bits past vector end");
        }
      }
    }
    return v;
  }

 private:
  size_t n_ = 0;
  std::vector<uint64_t> words_;
};

/// Dense GF(2) matrix stored as a list of BitVec rows.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(size_t rows, size_t cols) : cols_(cols), rows_(rows, BitVec(cols)) {}

  size_t n_rows() const { return rows_.size(); }
  size_t n_cols() const { return cols_; }

  bool get(size_t r, size_t c) const { return rows_[r].get(c); }
  void set(size_t r, size_t c, bool v) { rows_[r].set(c, v); }

  const BitVec& row(size_t r) const { return rows_[r]; }
  BitVec& row(size_t r) { return rows_[r]; }

  void append_row(BitVec v) {
    if (rows_.empty() && cols_ == 0) cols_ = v.size();
    if (v.size() != cols_) throw std::invalid_argument("row width mismatch");
    rows_.push_back(std::move(v));
  }

  bool operator==(const BitMatrix& o) const = default;

  BitVec mul_vec(const BitVec& x) const {
    BitVec y(rows_.size());
    for (size_t r = 0; r < rows_.size(); ++r) y.set(r, rows_[r].dot(x));
    return y;
  }

  /// In-place reduced row echelon form; returns the pivot columns.
  std::vector<size_t> rref() {
    std::vector<size_t> pivots;
    size_t r = 0;
    for (size_t c = 0; c < cols_ && r < rows_.size(); ++c) {
      size_t pivot = r;
      while (pivot < rows_.size() && !rows_[pivot].get(c)) ++pivot;
      if (pivot == rows_.size()) continue;
      std::swap(rows_[r], rows_[pivot]);
      for (size_t i = 0; i < rows_.size(); ++i) {
        if (i != r && rows_[i].get(c)) rows_[i] ^= rows_[r];
      }
      pivots.push_back(c);
      ++r;
    }
    return pivots;
  }

  size_t rank() const {
    BitMatrix copy = *this;
    return copy.rref().size();
  }

  /// Basis of the right null space {x : Ax = 0}.
  std::vector<BitVec> null_space() const {
    BitMatrix red = *this;
    std::vector<size_t> pivots = red.rref();
    std::vector<bool> is_pivot(cols_, false);
    for (size_t c : pivots) is_pivot[c] = true;
    std::vector<BitVec> basis;
    for (size_t c = 0; c < cols_; ++c) {
      if (is_pivot[c]) continue;
      BitVec v(cols_);
      v.set(c, true);
      for (size_t r = 0; r < pivots.size(); ++r) {
        if (red.rows_[r].get(c)) v.set(pivots[r], true);
      }
      basis.push_back(std::move(v));
    }
    return basis;
  }

  /// One solution of Ax = b, or nullopt if inconsistent.
  std::optional<BitVec> solve(const BitVec& b) const {
    if (b.size() != rows_.size()) throw std::invalid_argument("rhs size mismatch");
    BitMatrix aug(rows_.size(), cols_ + 1);
    for (size_t r = 0; r < rows_.size(); ++r) {
      aug.rows_[r] = BitVec(cols_ + 1);
      for (size_t c = 0; c < cols_; ++c) aug.rows_[r].set(c, rows_[r].get(c));
      aug.rows_[r].set(cols_, b.get(r));
    }
    std::vector<size_t> pivots = aug.rref();
    if (!pivots.empty() && pivots.back() == cols_) return std::nullopt;
    BitVec x(cols_);
    for (size_t r = 0; r < pivots.size(); ++r) x.set(pivots[r], aug.rows_[r].get(cols_));
    return x;
  }

 private:
  size_t cols_ = 0;
  std::vector<BitVec> rows_;
};

}  // namespace mbpurify
