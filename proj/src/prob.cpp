// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#include "augrank/prob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "augrank/compensated_sum.hpp"
#include "augrank/error.hpp"

namespace augrank {

namespace {

constexpr double kFixedPointBand = 8 * std::numeric_limits<double>::epsilon();

void check_entries(std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw Error(ErrorKind::NonFinite, "entry " + std::to_string(i) + " is not finite");
    }
    if (v[i] < 0.0) {
      throw Error(ErrorKind::NegativeEntry, "entry " + std::to_string(i) + " is negative");
    }
  }
}

void check_unit_mass(std::span<const double> v, const char* what) {
  const double s = compensated_sum(v);
  if (std::abs(s - 1.0) > kConstructionTolerance) {
    throw Error(ErrorKind::NotNormalized,
                std::string(what) + " sums to " + std::to_string(s) + ", expected 1");
  }
}

}  // namespace

ProbVector normalize(std::span<const double> v) {
  check_entries(v);
  std::vector<double> out(v.begin(), v.end());
  if (std::none_of(out.begin(), out.end(), [](double x) { return x > 0.0; })) {
    throw Error(ErrorKind::AllZero, "cannot normalize an all-zero vector");
  }
  // A vector whose sum is within a few ulps of 1 is left as is. One division
  // always lands inside that band (each quotient is off by at most half an
  // ulp relative), so the output is a fixed point and normalize is bitwise
  // idempotent. Extra rounds only matter for subnormal inputs.
  for (int round = 0; round < 4; ++round) {
    const double s = compensated_sum(out);
    if (std::abs(s - 1.0) <= kFixedPointBand) break;
    for (double& x : out) x /= s;
  }
  return ProbVector(std::move(out), ProbVector::Trusted{});
}

ProbVector::ProbVector(std::vector<double> values) {
  check_entries(values);
  check_unit_mass(values, "probability vector");
  *this = normalize(values);
}

LabelWeights::LabelWeights(std::vector<double> weights) {
  check_entries(weights);
  check_unit_mass(weights, "label weights");
  const ProbVector normalized = normalize(weights);
  weights_.assign(normalized.values().begin(), normalized.values().end());
  long hot = -1;
  int ones = 0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] == 1.0) {
      ++ones;
      hot = static_cast<long>(i);
    }
  }
  one_hot_class_ = ones == 1 ? hot : -1;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw Error(ErrorKind::LengthMismatch, "KL operands have lengths " +
                                               std::to_string(p.size()) + " and " +
                                               std::to_string(q.size()));
  }
  CompensatedSum acc;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (p[c] == 0.0) continue;
    const double qc = std::max(q[c], kProbFloor);
    acc.add(p[c] * std::log(p[c] / qc));
  }
  return std::max(acc.value(), 0.0);
}

LabelWeights one_hot(std::size_t class_index, std::size_t num_classes) {
  if (class_index >= num_classes) {
    throw Error(ErrorKind::IndexOutOfRange, "class " + std::to_string(class_index) +
                                                " outside [0, " + std::to_string(num_classes) +
                                                ")");
  }
  std::vector<double> w(num_classes, 0.0);
  w[class_index] = 1.0;
  return LabelWeights(std::move(w));
}

}  // namespace augrank
