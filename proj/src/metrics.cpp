// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#include "augrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <unordered_set>

#include "augrank/error.hpp"
#include "augrank/rng.hpp"

namespace augrank {

// ---------------------------------------------------------------------------
// PredictionSet

namespace {

void check_record_shape(const PredictionRecord& r, std::size_t num_classes) {
  if (r.labels.size() != num_classes || r.probs.size() != num_classes) {
    throw Error(ErrorKind::InvalidPredictionSet,
                "record " + std::to_string(r.id) + " has " + std::to_string(r.labels.size()) +
                    " label weights and " + std::to_string(r.probs.size()) +
                    " probabilities, expected " + std::to_string(num_classes));
  }
}

}  // namespace

PredictionSet::PredictionSet(std::size_t num_classes, std::vector<PredictionRecord> records)
    : num_classes_(num_classes), records_(std::move(records)) {
  if (num_classes_ == 0) throw Error(ErrorKind::InvalidPredictionSet, "zero classes");
  if (records_.empty()) throw Error(ErrorKind::InvalidPredictionSet, "no records");
  std::unordered_set<RecordId> seen;
  seen.reserve(records_.size());
  for (const auto& r : records_) {
    check_record_shape(r, num_classes_);
    if (!seen.insert(r.id).second) {
      throw Error(ErrorKind::InvalidPredictionSet, "duplicate id " + std::to_string(r.id));
    }
  }
}

bool PredictionSet::all_one_hot() const noexcept {
  return std::all_of(records_.begin(), records_.end(),
                     [](const PredictionRecord& r) { return r.labels.is_one_hot(); });
}

// ---------------------------------------------------------------------------
// Prototypes

PrototypeAccumulator::PrototypeAccumulator(std::size_t num_classes)
    : num_classes_(num_classes), entries_(num_classes * num_classes) {}

void PrototypeAccumulator::add(const PredictionRecord& record) {
  const auto w = record.labels.weights();
  const auto p = record.probs.values();
  for (std::size_t j = 0; j < num_classes_; ++j) {
    if (w[j] == 0.0) continue;
    CompensatedSum* row = &entries_[j * num_classes_];
    for (std::size_t c = 0; c < num_classes_; ++c) row[c].add(w[j] * p[c]);
  }
}

ClassPrototypes PrototypeAccumulator::finish() const {
  ClassPrototypes out;
  out.raw.resize(num_classes_);
  out.normalized.resize(num_classes_);
  out.mass.resize(num_classes_);
  for (std::size_t j = 0; j < num_classes_; ++j) {
    auto& row = out.raw[j];
    row.resize(num_classes_);
    for (std::size_t c = 0; c < num_classes_; ++c) row[c] = entries_[j * num_classes_ + c].value();
    out.mass[j] = compensated_sum(row);
    if (out.mass[j] == 0.0) {
      out.empty_classes.push_back(j);
    } else {
      out.normalized[j] = normalize(row);
    }
  }
  return out;
}

ClassPrototypes compute_class_prototypes(const PredictionSet& preds) {
  PrototypeAccumulator acc(preds.num_classes());
  for (const auto& r : preds.records()) acc.add(r);
  return acc.finish();
}

// ---------------------------------------------------------------------------
// Per-record terms

namespace {

void require_class(const ClassPrototypes& protos, std::size_t j, RecordId id) {
  if (protos.is_empty(j)) {
    throw Error(ErrorKind::EmptyClass, "record " + std::to_string(id) +
                                           " carries label mass on empty class " +
                                           std::to_string(j));
  }
}

double record_divergence(const PredictionRecord& r, const ClassPrototypes& protos,
                         LabelMode mode) {
  if (mode == LabelMode::OneHot) {
    const std::size_t y = r.labels.one_hot_class();
    require_class(protos, y, r.id);
    return kl_divergence(r.probs, protos.normalized[y]);
  }
  const std::size_t num_classes = protos.num_classes();
  std::vector<double> target(num_classes, 0.0);
  const auto w = r.labels.weights();
  for (std::size_t j = 0; j < num_classes; ++j) {
    if (w[j] == 0.0) continue;
    require_class(protos, j, r.id);
    const auto q = protos.normalized[j].values();
    for (std::size_t c = 0; c < num_classes; ++c) target[c] += w[j] * q[c];
  }
  return kl_divergence(r.probs, normalize(target));
}

double true_class_mass(const PredictionRecord& r) {
  CompensatedSum s;
  const auto w = r.labels.weights();
  const auto p = r.probs.values();
  for (std::size_t c = 0; c < w.size(); ++c) {
    if (w[c] != 0.0) s.add(w[c] * p[c]);
  }
  return s.value();
}

/// Assigns dense group indices in order of first appearance.
class GroupIndex {
 public:
  explicit GroupIndex(const ReplicaGroups* groups) : groups_(groups) {}

  std::size_t assign(RecordId id) {
    if (groups_ == nullptr) {
      if (sums_.empty()) sums_.emplace_back();
      return 0;
    }
    const auto key = groups_->key_of(id);
    if (!key) {
      throw Error(ErrorKind::GroupCoverage, "record " + std::to_string(id) + " is in no group");
    }
    const auto [it, inserted] = dense_.try_emplace(*key, dense_.size());
    if (inserted) sums_.emplace_back();
    return it->second;
  }

  [[nodiscard]] std::size_t lookup(RecordId id) const {
    if (groups_ == nullptr) return 0;
    const auto key = groups_->key_of(id);
    const auto it = key ? dense_.find(*key) : dense_.end();
    if (it == dense_.end()) {
      throw Error(ErrorKind::ReplayMismatch, "record " + std::to_string(id) + " not seen in pass 1");
    }
    return it->second;
  }

  void check_coverage() const {
    if (groups_ == nullptr) return;
    if (const auto expected = groups_->explicit_count(); expected && *expected != dense_.size()) {
      throw Error(ErrorKind::GroupCoverage, std::to_string(*expected - dense_.size()) +
                                                " group(s) contain no record of the set");
    }
  }

  // Values are accumulated relative to the group's first value, so a
  // constant group has variance exactly 0.
  struct Sums {
    double shift = 0.0;
    CompensatedSum total;
    std::size_t count = 0;
  };
  std::vector<Sums> sums_;

 private:
  const ReplicaGroups* groups_;
  std::unordered_map<std::uint64_t, std::size_t> dense_;
};

/// State shared by the in-memory and the streaming evaluation.
class TwoPassState {
 public:
  TwoPassState(std::size_t num_classes, const MetricOptions& options)
      : num_classes_(num_classes), options_(options), protos_acc_(num_classes),
        groups_(options.groups) {}

  void pass_one(const PredictionRecord& r) {
    check_record_shape(r, num_classes_);
    if (!seen_.insert(r.id).second) {
      throw Error(ErrorKind::InvalidPredictionSet, "duplicate id " + std::to_string(r.id));
    }
    ids_.push_back(r.id);
    all_one_hot_ = all_one_hot_ && r.labels.is_one_hot();
    protos_acc_.add(r);
    auto& g = groups_.sums_[groups_.assign(r.id)];
    const double t = true_class_mass(r);
    if (g.count == 0) g.shift = t;
    g.total.add(t - g.shift);
    ++g.count;
  }

  void end_pass_one() {
    if (ids_.empty()) throw Error(ErrorKind::EmptyResult, "no records");
    groups_.check_coverage();
    protos_ = protos_acc_.finish();
    if (options_.empty_class_policy == EmptyClassPolicy::Strict && !protos_.empty_classes.empty()) {
      throw Error(ErrorKind::EmptyClass,
                  std::to_string(protos_.empty_classes.size()) +
                      " class(es) carry no label mass, first is " +
                      std::to_string(protos_.empty_classes.front()));
    }
    mode_ = all_one_hot_ ? LabelMode::OneHot : LabelMode::Mixed;
    means_.reserve(groups_.sums_.size());
    for (const auto& g : groups_.sums_) {
      means_.push_back(g.total.value() / static_cast<double>(g.count));
    }
    squares_.assign(means_.size(), CompensatedSum{});
  }

  [[nodiscard]] double divergence(const PredictionRecord& r) const {
    return record_divergence(r, protos_, mode_);
  }

  void variance_term(const PredictionRecord& r) {
    const std::size_t g = groups_.lookup(r.id);
    const double d = (true_class_mass(r) - groups_.sums_[g].shift) - means_[g];
    squares_[g].add(d * d);
  }

  [[nodiscard]] const std::vector<RecordId>& ids() const noexcept { return ids_; }

  [[nodiscard]] MetricReport finish(double divergence_sum) const {
    MetricReport out;
    out.n = ids_.size();
    out.num_classes = num_classes_;
    out.mode = mode_;
    out.cmi = divergence_sum / static_cast<double>(out.n);
    out.dev = dev(protos_, options_.empty_class_policy);
    out.m = out.dev - out.cmi;
    out.empty_class_policy_applied = options_.empty_class_policy == EmptyClassPolicy::Tolerant &&
                                     !protos_.empty_classes.empty();
    CompensatedSum var;
    for (std::size_t g = 0; g < means_.size(); ++g) {
      var.add(squares_[g].value() / static_cast<double>(groups_.sums_[g].count));
    }
    out.variance_baseline = var.value() / static_cast<double>(means_.size());
    out.variance_mode = options_.groups ? VarianceMode::PerImage : VarianceMode::Dataset;
    return out;
  }

 private:
  std::size_t num_classes_;
  MetricOptions options_;
  PrototypeAccumulator protos_acc_;
  GroupIndex groups_;
  std::unordered_set<RecordId> seen_;
  std::vector<RecordId> ids_;
  bool all_one_hot_ = true;

  ClassPrototypes protos_;
  LabelMode mode_ = LabelMode::OneHot;
  std::vector<double> means_;
  std::vector<CompensatedSum> squares_;
};

/// Chunked compensated sum of term(i) for i in [0, n), evaluated on up to
/// `workers` threads. Bitwise equal to feeding the terms into a ChunkedSum.
template <typename Term>
double chunked_sum_parallel(std::size_t n, unsigned workers, const Term& term) {
  const std::size_t chunk = ChunkedSum::kChunkSize;
  const std::size_t num_chunks = (n + chunk - 1) / chunk;
  std::vector<double> totals(num_chunks, 0.0);
  std::vector<std::exception_ptr> errors(num_chunks);

  auto run = [&](std::size_t first_chunk, std::size_t stride) {
    for (std::size_t c = first_chunk; c < num_chunks; c += stride) {
      try {
        CompensatedSum s;
        const std::size_t end = std::min(n, (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < end; ++i) s.add(term(i));
        totals[c] = s.value();
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };

  const std::size_t threads = std::min<std::size_t>(std::max(1U, workers), num_chunks);
  if (threads <= 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(run, t, threads);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return ChunkedSum::combine(totals);
}

double mean_divergence(const PredictionSet& preds, const ClassPrototypes& protos, LabelMode mode) {
  ChunkedSum sum;
  for (const auto& r : preds.records()) sum.add(record_divergence(r, protos, mode));
  return sum.value() / static_cast<double>(preds.size());
}

}  // namespace

double cmi_emp(const PredictionSet& preds, const ClassPrototypes& protos) {
  for (const auto& r : preds.records()) {
    if (!r.labels.is_one_hot()) {
      throw Error(ErrorKind::MixedLabels,
                  "record " + std::to_string(r.id) + " has mixed labels; use gcmi_emp");
    }
  }
  return mean_divergence(preds, protos, LabelMode::OneHot);
}

double gcmi_emp(const PredictionSet& preds, const ClassPrototypes& protos) {
  return mean_divergence(preds, protos, LabelMode::Mixed);
}

double dev(const ClassPrototypes& protos, EmptyClassPolicy policy) {
  CompensatedSum sum;
  std::size_t used = 0;
  for (std::size_t y = 0; y < protos.num_classes(); ++y) {
    if (protos.is_empty(y)) {
      if (policy == EmptyClassPolicy::Strict) {
        throw Error(ErrorKind::EmptyClass, "class " + std::to_string(y) + " has no label mass");
      }
      continue;
    }
    sum.add(kl_divergence(one_hot(y, protos.num_classes()), protos.normalized[y]));
    ++used;
  }
  if (used == 0) throw Error(ErrorKind::EmptyClass, "every class is empty");
  return sum.value() / static_cast<double>(used);
}

double variance_baseline(const PredictionSet& preds, const ReplicaGroups* groups) {
  MetricOptions options;
  options.empty_class_policy = EmptyClassPolicy::Tolerant;
  options.groups = groups;
  TwoPassState state(preds.num_classes(), options);
  for (const auto& r : preds.records()) state.pass_one(r);
  state.end_pass_one();
  for (const auto& r : preds.records()) state.variance_term(r);
  return state.finish(0.0).variance_baseline;
}

MetricReport metric_m(const PredictionSet& preds, const MetricOptions& options) {
  TwoPassState state(preds.num_classes(), options);
  const auto& records = preds.records();
  for (const auto& r : records) state.pass_one(r);
  state.end_pass_one();

  const unsigned workers =
      options.workers == 0 ? std::max(1U, std::thread::hardware_concurrency()) : options.workers;
  const double divergence_sum = chunked_sum_parallel(
      records.size(), workers, [&](std::size_t i) { return state.divergence(records[i]); });
  for (const auto& r : records) state.variance_term(r);
  return state.finish(divergence_sum);
}

MetricReport two_pass_stream(PredictionStream& source, const MetricOptions& options) {
  TwoPassState state(source.num_classes(), options);
  source.rewind();
  while (auto r = source.next()) state.pass_one(*r);
  state.end_pass_one();

  const auto& ids = state.ids();
  ChunkedSum divergence_sum;
  std::size_t index = 0;
  source.rewind();
  while (auto r = source.next()) {
    if (index >= ids.size() || r->id != ids[index]) {
      throw Error(ErrorKind::ReplayMismatch,
                  "pass 2 record " + std::to_string(index) + " has id " + std::to_string(r->id) +
                      (index < ids.size() ? ", pass 1 had " + std::to_string(ids[index])
                                          : std::string(", beyond pass 1 count")));
    }
    divergence_sum.add(state.divergence(*r));
    state.variance_term(*r);
    ++index;
  }
  if (index != ids.size()) {
    throw Error(ErrorKind::ReplayMismatch, "pass 2 yielded " + std::to_string(index) +
                                               " records, pass 1 yielded " +
                                               std::to_string(ids.size()));
  }
  return state.finish(divergence_sum.value());
}

// ---------------------------------------------------------------------------
// Grouping

ReplicaGroups ReplicaGroups::from_groups(const std::vector<std::vector<RecordId>>& groups) {
  if (groups.empty()) throw Error(ErrorKind::GroupCoverage, "no groups given");
  ReplicaGroups out;
  out.explicit_groups_ = groups.size();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) {
      throw Error(ErrorKind::GroupCoverage, "group " + std::to_string(g) + " is empty");
    }
    for (RecordId id : groups[g]) {
      if (!out.membership_.try_emplace(id, g).second) {
        throw Error(ErrorKind::GroupCoverage,
                    "record " + std::to_string(id) + " appears in more than one group");
      }
    }
  }
  return out;
}

ReplicaGroups ReplicaGroups::by_replica_count(std::uint32_t replicas) {
  if (replicas == 0) throw Error(ErrorKind::InvalidArgument, "replicas must be positive");
  ReplicaGroups out;
  out.divisor_ = replicas;
  return out;
}

std::optional<std::uint64_t> ReplicaGroups::key_of(RecordId id) const {
  if (divisor_ != 0) return id / divisor_;
  const auto it = membership_.find(id);
  if (it == membership_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> ReplicaGroups::explicit_count() const noexcept {
  if (divisor_ != 0) return std::nullopt;
  return explicit_groups_;
}

// ---------------------------------------------------------------------------
// Streams and sampling

std::optional<PredictionRecord> VectorPredictionStream::next() {
  if (pos_ >= preds_->size()) return std::nullopt;
  return preds_->records()[pos_++];
}

SubsampledStream::SubsampledStream(PredictionStream& inner, double fraction, std::uint64_t seed)
    : inner_(&inner), fraction_(fraction), seed_(seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "subsample fraction must be in (0, 1]");
  }
}

std::optional<PredictionRecord> SubsampledStream::next() {
  while (auto r = inner_->next()) {
    if (fraction_ >= 1.0) return r;
    auto stream = rng::seed_for(seed_, r->id, 0, rng::Domain::Subsample);
    if (stream.uniform01() < fraction_) return r;
  }
  return std::nullopt;
}

PredictionSet subsample(const PredictionSet& preds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "subsample fraction must be in (0, 1]");
  }
  const std::size_t total = preds.size();
  const auto wanted = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total)));
  if (wanted == 0) {
    throw Error(ErrorKind::EmptyResult, "fraction " + std::to_string(fraction) + " of " +
                                            std::to_string(total) + " records selects none");
  }
  // Selection sampling (Knuth, TAOCP vol. 2, Algorithm S).
  auto stream = rng::seed_for(seed, 0, 0, rng::Domain::Subsample);
  std::vector<PredictionRecord> kept;
  kept.reserve(wanted);
  for (std::size_t i = 0; i < total && kept.size() < wanted; ++i) {
    const double remaining = static_cast<double>(total - i);
    if (remaining * stream.uniform01() < static_cast<double>(wanted - kept.size())) {
      kept.push_back(preds.records()[i]);
    }
  }
  return PredictionSet(preds.num_classes(), std::move(kept));
}

// ---------------------------------------------------------------------------

std::string_view to_string(EmptyClassPolicy policy) noexcept {
  return policy == EmptyClassPolicy::Strict ? "strict" : "tolerant";
}

std::string_view to_string(LabelMode mode) noexcept {
  return mode == LabelMode::OneHot ? "one-hot" : "mixed";
}

std::string_view to_string(VarianceMode mode) noexcept {
  return mode == VarianceMode::Dataset ? "dataset" : "per-image";
}

}  // namespace augrank
