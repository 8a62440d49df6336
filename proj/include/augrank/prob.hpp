// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#pragma once

/**
 * @file prob.hpp
 * @brief Probability vectors, label weight vectors and KL divergence.
 *
 * All divergences are in nats. The q side of a KL divergence is clamped
 * below at kProbFloor so that predictions rounded to zero in a text dump
 * still give a finite divergence against a one-hot target.
 */

#include <cstddef>
#include <span>
#include <vector>

namespace augrank {

/// Lower clamp applied to the reference distribution in `kl_divergence`.
inline constexpr double kProbFloor = 1e-12;

/// Allowed deviation of a raw input sum from 1 at construction.
inline constexpr double kConstructionTolerance = 1e-6;

/// Maximum deviation of a normalized vector's sum from 1.
inline constexpr double kNormalizedTolerance = 1e-12;

/// A teacher's softmax output over C classes. Entries are non-negative and
/// renormalized on construction.
class ProbVector {
 public:
  ProbVector() = default;

  /// Accepts values whose sum is within kConstructionTolerance of 1.
  explicit ProbVector(std::vector<double> values);

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const ProbVector&, const ProbVector&) = default;

 private:
  struct Trusted {};
  ProbVector(std::vector<double> values, Trusted) : values_(std::move(values)) {}
  friend ProbVector normalize(std::span<const double> v);

  std::vector<double> values_;
};

/// Ground-truth label mass over C classes: one-hot, or mixed by batch
/// augmentations.
class LabelWeights {
 public:
  LabelWeights() = default;
  explicit LabelWeights(std::vector<double> weights);

  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return weights_[i]; }

  /// True iff exactly one entry equals 1.
  [[nodiscard]] bool is_one_hot() const noexcept { return one_hot_class_ >= 0; }

  /// Class index of a one-hot label; only meaningful when is_one_hot().
  [[nodiscard]] std::size_t one_hot_class() const noexcept {
    return static_cast<std::size_t>(one_hot_class_);
  }

  friend bool operator==(const LabelWeights& a, const LabelWeights& b) {
    return a.weights_ == b.weights_;
  }

 private:
  std::vector<double> weights_;
  long one_hot_class_ = -1;
};

/// Scales non-negative finite values so they sum to 1. The result is a fixed
/// point of normalization, so normalize(normalize(v).values()) is bitwise
/// equal to normalize(v).
[[nodiscard]] ProbVector normalize(std::span<const double> v);

/// KL(p || q) in nats with q clamped below at kProbFloor. Terms with p_c = 0
/// contribute 0. Tiny negative results from rounding are clamped to 0.
[[nodiscard]] double kl_divergence(std::span<const double> p, std::span<const double> q);

[[nodiscard]] inline double kl_divergence(const ProbVector& p, const ProbVector& q) {
  return kl_divergence(p.values(), q.values());
}
[[nodiscard]] inline double kl_divergence(const LabelWeights& p, const ProbVector& q) {
  return kl_divergence(p.weights(), q.values());
}

[[nodiscard]] LabelWeights one_hot(std::size_t class_index, std::size_t num_classes);

}  // namespace augrank
