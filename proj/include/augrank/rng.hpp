// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#pragma once

/**
 * @file rng.hpp
 * @brief Counter-based random streams.
 *
 * Every random decision in augrank comes from a Philox4x64-10 stream
 * (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3", SC'11).
 * A stream is addressed by (global seed, sample id, replica, domain), so any
 * sample can be regenerated independently of the others and in any order.
 * Distributions are implemented here rather than taken from <random>, whose
 * algorithms are implementation-defined.
 */

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace augrank::rng {

/// Recorded in every report. Bump the version when any draw sequence changes.
inline constexpr std::string_view kAlgorithmId = "philox4x64-10/augrank-v1";

using Counter = std::array<std::uint64_t, 4>;
using Key = std::array<std::uint64_t, 2>;

/// One Philox4x64 block with 10 rounds.
[[nodiscard]] Counter philox4x64_10(Counter counter, Key key) noexcept;

/// Independent purposes that must never share a stream.
enum class Domain : std::uint64_t {
  Augment = 1,
  Synthetic = 2,
  Subsample = 3,
  Test = 4,
};

class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(Key key, Counter counter) noexcept : key_(key), counter_(counter) {}

  [[nodiscard]] static constexpr result_type min() noexcept { return 0; }
  [[nodiscard]] static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  [[nodiscard]] double uniform01() noexcept;
  /// Uniform on [lo, hi).
  [[nodiscard]] double uniform(double lo, double hi) noexcept;
  /// Uniform integer in [0, bound); bound must be positive. Lemire's method.
  [[nodiscard]] std::uint64_t uniform_int(std::uint64_t bound) noexcept;
  /// Standard normal via Box-Muller, one draw pair per call.
  [[nodiscard]] double normal() noexcept;
  /// Gamma(shape, 1) via Marsaglia-Tsang.
  [[nodiscard]] double gamma(double shape) noexcept;
  [[nodiscard]] double beta(double a, double b) noexcept;
  [[nodiscard]] bool bernoulli(double p) noexcept { return uniform01() < p; }

  [[nodiscard]] const Key& key() const noexcept { return key_; }
  [[nodiscard]] const Counter& counter() const noexcept { return counter_; }

  friend bool operator==(const Stream& a, const Stream& b) noexcept {
    return a.key_ == b.key_ && a.counter_ == b.counter_ && a.used_ == b.used_;
  }

 private:
  Key key_;
  Counter counter_;
  Counter block_{};
  unsigned used_ = 4;
};

/// Stream for one (sample, replica) pair. Distinct triples give distinct
/// Philox inputs, and Philox is a bijection per key, so streams never alias.
[[nodiscard]] Stream seed_for(std::uint64_t global_seed, std::uint64_t sample_id,
                              std::uint64_t replica_index,
                              Domain domain = Domain::Augment) noexcept;

}  // namespace augrank::rng
