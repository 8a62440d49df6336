// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace augrank {

/// Neumaier's variant of Kahan summation. Unlike plain Kahan it stays exact
/// when an addend is larger in magnitude than the running sum.
class CompensatedSum {
 public:
  void add(double value) noexcept {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double value) noexcept {
    add(value);
    return *this;
  }

  [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

[[nodiscard]] inline double compensated_sum(std::span<const double> values) noexcept {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

/// Sum of a sequence split into fixed-size chunks: each chunk is summed with
/// compensation from zero, then the chunk totals are combined in index order.
/// Because the chunk boundaries depend only on the element index, a parallel
/// evaluation (chunk totals reduced with `combine`) produces the same bits as
/// feeding values one by one.
class ChunkedSum {
 public:
  static constexpr std::size_t kChunkSize = 4096;

  void add(double value) {
    current_.add(value);
    if (++in_chunk_ == kChunkSize) {
      totals_.push_back(current_.value());
      current_ = {};
      in_chunk_ = 0;
    }
  }

  [[nodiscard]] double value() const {
    CompensatedSum acc;
    for (double t : totals_) acc.add(t);
    if (in_chunk_ > 0) acc.add(current_.value());
    return acc.value();
  }

  /// Final reduction over chunk totals computed elsewhere, in chunk order.
  [[nodiscard]] static double combine(std::span<const double> chunk_totals) noexcept {
    return compensated_sum(chunk_totals);
  }

 private:
  std::vector<double> totals_;
  CompensatedSum current_;
  std::size_t in_chunk_ = 0;
};

}  // namespace augrank
