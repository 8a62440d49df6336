// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#pragma once

/**
 * @file metrics.hpp
 * @brief Teacher-prediction statistics used to score an augmentation.
 *
 * Given the teacher's predictions on an augmented dataset:
 *
 *   Z_j     = sum_k w_jk P_k                   raw class prototype
 *   Q_j     = Z_j / |Z_j|_1                    normalized prototype
 *   CMI     = 1/N sum_i KL(P_i || Q_{y_i})     one-hot labels
 *   GCMI    = 1/N sum_i KL(P_i || sum_j w_ij Q_j)
 *   DEV     = 1/C sum_y KL(1_y || Q_y) = 1/C sum_y -ln Q_y[y]
 *   M       = DEV - CMI                        lower is better
 *
 * The variance baseline is the variance of the teacher's probability mass on
 * the ground-truth label, either within each source image's replicas or
 * across the whole dataset.
 *
 * All sums are compensated and reduced in record order over fixed-size
 * chunks, so single-threaded, multi-threaded and streaming evaluations give
 * identical bits.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "augrank/compensated_sum.hpp"
#include "augrank/prob.hpp"

namespace augrank {

using RecordId = std::uint64_t;

struct PredictionRecord {
  RecordId id = 0;
  LabelWeights labels;
  ProbVector probs;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

/// Teacher predictions over one augmented dataset. Non-empty, ids unique,
/// every record of length num_classes.
class PredictionSet {
 public:
  PredictionSet(std::size_t num_classes, std::vector<PredictionRecord> records);

  [[nodiscard]] std::size_t num_classes() const noexcept { return num_classes_; }
  [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
  [[nodiscard]] const std::vector<PredictionRecord>& records() const noexcept { return records_; }
  [[nodiscard]] bool all_one_hot() const noexcept;

  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;

 private:
  std::size_t num_classes_;
  std::vector<PredictionRecord> records_;
};

struct ClassPrototypes {
  std::vector<std::vector<double>> raw;
  /// Default-constructed (size 0) for empty classes.
  std::vector<ProbVector> normalized;
  std::vector<double> mass;
  std::vector<std::size_t> empty_classes;

  [[nodiscard]] std::size_t num_classes() const noexcept { return raw.size(); }
  [[nodiscard]] bool is_empty(std::size_t j) const noexcept { return mass[j] == 0.0; }
};

/// Single-pass accumulator for the raw prototypes Z_j.
class PrototypeAccumulator {
 public:
  explicit PrototypeAccumulator(std::size_t num_classes);

  void add(const PredictionRecord& record);
  [[nodiscard]] ClassPrototypes finish() const;

 private:
  std::size_t num_classes_;
  std::vector<CompensatedSum> entries_;  // row-major C x C
};

enum class EmptyClassPolicy { Strict, Tolerant };
enum class LabelMode { OneHot, Mixed };
enum class VarianceMode { Dataset, PerImage };

[[nodiscard]] std::string_view to_string(EmptyClassPolicy policy) noexcept;
[[nodiscard]] std::string_view to_string(LabelMode mode) noexcept;
[[nodiscard]] std::string_view to_string(VarianceMode mode) noexcept;

/// Partition of record ids by source image, used by the variance baseline.
class ReplicaGroups {
 public:
  /// Explicit groups. Every group must be non-empty and no id may repeat.
  static ReplicaGroups from_groups(const std::vector<std::vector<RecordId>>& groups);
  /// Records id / replicas share a group, matching the id layout produced by
  /// the augmentation pipeline.
  static ReplicaGroups by_replica_count(std::uint32_t replicas);

  /// Group key of a record, or nullopt when the id belongs to no group.
  [[nodiscard]] std::optional<std::uint64_t> key_of(RecordId id) const;
  /// Number of explicit groups, or nullopt for the divisor form.
  [[nodiscard]] std::optional<std::size_t> explicit_count() const noexcept;

 private:
  std::unordered_map<RecordId, std::uint64_t> membership_;
  std::size_t explicit_groups_ = 0;
  std::uint32_t divisor_ = 0;
};

struct MetricReport {
  std::string da_name;
  std::size_t n = 0;
  std::size_t num_classes = 0;
  double cmi = 0.0;
  double dev = 0.0;
  double m = 0.0;
  double variance_baseline = 0.0;
  LabelMode mode = LabelMode::OneHot;
  VarianceMode variance_mode = VarianceMode::Dataset;
  bool empty_class_policy_applied = false;
  std::uint64_t seed = 0;
  std::uint32_t replicas = 1;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

struct MetricOptions {
  EmptyClassPolicy empty_class_policy = EmptyClassPolicy::Strict;
  /// Threads for the per-record KL terms; 0 picks the hardware concurrency.
  unsigned workers = 1;
  /// Replica grouping for the variance baseline; dataset-wide when null.
  const ReplicaGroups* groups = nullptr;
};

[[nodiscard]] ClassPrototypes compute_class_prototypes(const PredictionSet& preds);

/// Requires one-hot labels (MixedLabels otherwise).
[[nodiscard]] double cmi_emp(const PredictionSet& preds, const ClassPrototypes& protos);

[[nodiscard]] double gcmi_emp(const PredictionSet& preds, const ClassPrototypes& protos);

[[nodiscard]] double dev(const ClassPrototypes& protos,
                         EmptyClassPolicy policy = EmptyClassPolicy::Strict);

[[nodiscard]] double variance_baseline(const PredictionSet& preds,
                                       const ReplicaGroups* groups = nullptr);

/// Prototypes, CMI or GCMI (chosen by label mode), DEV, M and the variance
/// baseline in one call. da_name, seed and replicas are left for the caller.
[[nodiscard]] MetricReport metric_m(const PredictionSet& preds, const MetricOptions& options = {});

/// A source that can be read from the beginning any number of times and
/// yields the same records each time.
class PredictionStream {
 public:
  virtual ~PredictionStream() = default;
  [[nodiscard]] virtual std::size_t num_classes() const = 0;
  virtual void rewind() = 0;
  [[nodiscard]] virtual std::optional<PredictionRecord> next() = 0;
};

class VectorPredictionStream final : public PredictionStream {
 public:
  explicit VectorPredictionStream(const PredictionSet& preds) : preds_(&preds) {}

  [[nodiscard]] std::size_t num_classes() const override { return preds_->num_classes(); }
  void rewind() override { pos_ = 0; }
  [[nodiscard]] std::optional<PredictionRecord> next() override;

 private:
  const PredictionSet* preds_;
  std::size_t pos_ = 0;
};

/// Keeps each record independently with probability `fraction`, decided by a
/// stream keyed on (seed, id). Decisions do not depend on order, so the
/// filtered stream replays exactly.
class SubsampledStream final : public PredictionStream {
 public:
  SubsampledStream(PredictionStream& inner, double fraction, std::uint64_t seed);

  [[nodiscard]] std::size_t num_classes() const override { return inner_->num_classes(); }
  void rewind() override { inner_->rewind(); }
  [[nodiscard]] std::optional<PredictionRecord> next() override;

 private:
  PredictionStream* inner_;
  double fraction_;
  std::uint64_t seed_;
};

/// Pass 1 accumulates the prototypes and group means; pass 2 accumulates the
/// KL and variance terms. Equal to metric_m on the materialized records.
/// Throws ReplayMismatch when the second pass differs in count or ids.
[[nodiscard]] MetricReport two_pass_stream(PredictionStream& source,
                                           const MetricOptions& options = {});

/// Uniform sample without replacement of floor(fraction * N) records, in
/// original order with original ids. Deterministic given seed.
[[nodiscard]] PredictionSet subsample(const PredictionSet& preds, double fraction,
                                      std::uint64_t seed);

}  // namespace augrank
