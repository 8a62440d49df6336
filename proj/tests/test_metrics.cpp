// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "augrank/error.hpp"
#include "augrank/metrics.hpp"
#include "augrank/synthetic.hpp"
#include "oracle.hpp"

using namespace augrank;
using oracle::Rec;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

std::vector<Rec> two_by_two() {
  return {{0, {1, 0}, {0.8, 0.2}},
          {1, {1, 0}, {0.6, 0.4}},
          {2, {0, 1}, {0.3, 0.7}},
          {3, {0, 1}, {0.1, 0.9}}};
}

void check_reports_close(const MetricReport& a, const MetricReport& b, double tol) {
  CHECK(a.n == b.n);
  CHECK(std::abs(a.cmi - b.cmi) <= tol);
  CHECK(std::abs(a.dev - b.dev) <= tol);
  CHECK(std::abs(a.m - b.m) <= tol);
  CHECK(std::abs(a.variance_baseline - b.variance_baseline) <= tol);
}

// Replays its records on the first pass only.
class BrokenReplay final : public PredictionStream {
 public:
  explicit BrokenReplay(const PredictionSet& s) : set_(s) {}
  std::size_t num_classes() const override { return set_.num_classes(); }
  void rewind() override {
    pos_ = 0;
    ++rewinds_;
  }
  std::optional<PredictionRecord> next() override {
    if (rewinds_ > 1 || pos_ >= set_.size()) return std::nullopt;
    return set_.records()[pos_++];
  }

 private:
  const PredictionSet& set_;
  std::size_t pos_ = 0;
  int rewinds_ = 0;
};

}  // namespace

TEST_CASE("prototype examples") {
  const auto set = oracle::to_set(two_by_two(), 2);
  const auto p = compute_class_prototypes(set);
  CHECK(p.normalized[0][0] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(p.normalized[0][1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(p.mass[0] == 2.0);
  CHECK(p.empty_classes.empty());

  const auto one = oracle::to_set({{0, {0.7, 0.3}, {0.4, 0.6}}}, 2);
  const auto q = compute_class_prototypes(one);
  CHECK(q.raw[0][0] == doctest::Approx(0.28));
  CHECK(q.raw[1][1] == doctest::Approx(0.18));
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(std::abs(q.normalized[0][k] - q.normalized[1][k]) <= 1e-15);
    CHECK(std::abs(q.normalized[0][k] - (k ? 0.6 : 0.4)) <= 1e-15);
  }

  std::vector<Rec> same;
  for (std::uint64_t i = 0; i < 5; ++i) same.push_back({i, {1, 0, 0}, {0.2, 0.5, 0.3}});
  const auto r = compute_class_prototypes(oracle::to_set(same, 3));
  CHECK(r.mass[0] == 5.0);
  CHECK(std::abs(r.normalized[0][1] - 0.5) <= 1e-15);
  CHECK(r.empty_classes == std::vector<std::size_t>{1, 2});
}

TEST_CASE("two-by-two metric values against the per-term oracle") {
  const auto recs = two_by_two();
  const auto set = oracle::to_set(recs, 2);
  const auto rep = metric_m(set);
  // Independent per-term evaluation.
  const double cmi = static_cast<double>(
      (oracle::kl({0.8, 0.2}, {0.7, 0.3}) + oracle::kl({0.6, 0.4}, {0.7, 0.3}) +
       oracle::kl({0.3, 0.7}, {0.2, 0.8}) + oracle::kl({0.1, 0.9}, {0.2, 0.8})) /
      4.0L);
  const double dv = 0.5 * (-std::log(0.7) - std::log(0.8));
  CHECK(std::abs(rep.cmi - cmi) <= 1e-12);
  CHECK(std::abs(rep.dev - dv) <= 1e-12);
  CHECK(std::abs(rep.m - (dv - cmi)) <= 1e-12);
  CHECK(rep.cmi == doctest::Approx(0.028293).epsilon(2e-5));
  CHECK(rep.dev == doctest::Approx(0.289909).epsilon(2e-6));
  CHECK(rep.m == doctest::Approx(0.261616).epsilon(2e-6));
  CHECK(rep.mode == LabelMode::OneHot);
}

TEST_CASE("perfect predictor scores zero") {
  std::vector<Rec> recs;
  for (std::uint64_t i = 0; i < 30; ++i) {
    const auto h = oracle::one_hot(i % 3, 3);
    recs.push_back({i, h, h});
  }
  const auto rep = metric_m(oracle::to_set(recs, 3));
  CHECK(rep.cmi == 0.0);
  CHECK(rep.dev == 0.0);
  CHECK(rep.m == 0.0);
}

TEST_CASE("uniform predictions") {
  std::vector<Rec> recs;
  for (std::uint64_t i = 0; i < 40; ++i) recs.push_back({i, oracle::one_hot(i % 4, 4), {0.25, 0.25, 0.25, 0.25}});
  const auto set = oracle::to_set(recs, 4);
  const auto rep = metric_m(set);
  CHECK(rep.cmi == 0.0);
  CHECK(rep.dev == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(rep.m == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(gcmi_emp(set, compute_class_prototypes(set)) == 0.0);
}

TEST_CASE("N = 1 gives zero divergence") {
  const auto set = oracle::to_set({{0, {1, 0}, {0.3, 0.7}}}, 2);
  const auto p = compute_class_prototypes(set);
  CHECK(cmi_emp(set, p) == 0.0);
}

TEST_CASE("dev examples") {
  ClassPrototypes p;
  p.raw = {{0.7, 0.3}, {0.2, 0.8}};
  p.normalized = {ProbVector({0.7, 0.3}), ProbVector({0.2, 0.8})};
  p.mass = {1.0, 1.0};
  CHECK(dev(p) == doctest::Approx(0.289909).epsilon(2e-6));
}

TEST_CASE("GCMI for a single mixed record against hand-built prototypes") {
  // C = 2, N = 3 with prototypes computed by the oracle.
  std::vector<Rec> recs{{0, {1, 0}, {0.9, 0.1}}, {1, {0, 1}, {0.2, 0.8}}, {2, {0.7, 0.3}, {0.5, 0.5}}};
  const auto set = oracle::to_set(recs, 2);
  const auto protos = compute_class_prototypes(set);
  CHECK(std::abs(gcmi_emp(set, protos) - static_cast<double>(oracle::gcmi(recs, 2))) <= 1e-12);
  CHECK(kind_of([&] { (void)cmi_emp(set, protos); }) == ErrorKind::MixedLabels);
  const auto rep = metric_m(set);
  CHECK(rep.mode == LabelMode::Mixed);
}

TEST_CASE("metric_m matches the oracle on random sets") {
  std::mt19937_64 g(2024);
  for (int t = 0; t < 300; ++t) {
    const std::size_t C = 2 + t % 9;
    const std::size_t n = C + (t * 7) % 150;
    const auto recs = t % 2 ? oracle::random_one_hot(g, C, n) : oracle::random_mixed(g, C, n);
    const auto set = oracle::to_set(recs, C);
    const auto lib = oracle::from_set(set);
    const auto rep = metric_m(set);
    CHECK(std::abs(rep.cmi - static_cast<double>(oracle::gcmi(lib, C))) <= 1e-12);
    CHECK(std::abs(rep.dev - static_cast<double>(oracle::dev(lib, C))) <= 1e-12);
    CHECK(std::abs(rep.variance_baseline - static_cast<double>(oracle::variance(lib))) <= 1e-12);
    CHECK(rep.m == rep.dev - rep.cmi);
  }
}

TEST_CASE("gcmi reduces to cmi on one-hot labels") {
  std::mt19937_64 g(9);
  for (int t = 0; t < 200; ++t) {
    const std::size_t C = 2 + t % 9;
    const auto set = oracle::to_set(oracle::random_one_hot(g, C, 1 + t % 200), C);
    const auto p = compute_class_prototypes(set);
    CHECK(std::abs(gcmi_emp(set, p) - cmi_emp(set, p)) <= 1e-9);
  }
}

TEST_CASE("permutation and duplication invariance") {
  std::mt19937_64 g(77);
  const std::size_t C = 5;
  auto recs = oracle::random_mixed(g, C, 300);
  const auto base = metric_m(oracle::to_set(recs, C));

  auto shuffled = recs;
  std::shuffle(shuffled.begin(), shuffled.end(), g);
  check_reports_close(metric_m(oracle::to_set(shuffled, C)), base, 1e-12);

  auto doubled = recs;
  for (auto r : recs) {
    r.id += 1000;
    doubled.push_back(r);
  }
  const auto d = metric_m(oracle::to_set(doubled, C));
  CHECK(std::abs(d.cmi - base.cmi) <= 1e-9);
  CHECK(std::abs(d.dev - base.dev) <= 1e-9);
  CHECK(std::abs(d.m - base.m) <= 1e-9);
}

TEST_CASE("empty classes") {
  const auto set = oracle::to_set({{0, {1, 0, 0}, {0.6, 0.2, 0.2}}, {1, {0, 1, 0}, {0.1, 0.8, 0.1}}}, 3);
  CHECK(kind_of([&] { (void)metric_m(set); }) == ErrorKind::EmptyClass);
  MetricOptions tolerant;
  tolerant.empty_class_policy = EmptyClassPolicy::Tolerant;
  const auto rep = metric_m(set, tolerant);
  CHECK(rep.empty_class_policy_applied);
  CHECK(rep.dev == doctest::Approx(0.5 * (-std::log(0.6) - std::log(0.8))));
}

TEST_CASE("variance baseline") {
  const auto two = oracle::to_set({{0, {1, 0}, {0.8, 0.2}}, {1, {1, 0}, {0.6, 0.4}}}, 2);
  CHECK(variance_baseline(two) == doctest::Approx(0.01).epsilon(1e-12));

  const auto singles = ReplicaGroups::from_groups({{0}, {1}});
  CHECK(variance_baseline(two, &singles) == 0.0);

  std::vector<Rec> same;
  for (std::uint64_t i = 0; i < 6; ++i) same.push_back({i, {0, 1}, {0.3, 0.7}});
  CHECK(variance_baseline(oracle::to_set(same, 2)) == 0.0);

  std::mt19937_64 g(3);
  const auto recs = oracle::random_mixed(g, 4, 400);
  const auto set = oracle::to_set(recs, 4);
  const auto groups = ReplicaGroups::by_replica_count(4);
  CHECK(std::abs(variance_baseline(set, &groups) -
                 static_cast<double>(oracle::variance(oracle::from_set(set), 4))) <= 1e-12);
  MetricOptions o;
  o.groups = &groups;
  CHECK(metric_m(set, o).variance_mode == VarianceMode::PerImage);
}

TEST_CASE("group coverage errors") {
  CHECK(kind_of([] { (void)ReplicaGroups::from_groups({}); }) == ErrorKind::GroupCoverage);
  CHECK(kind_of([] { (void)ReplicaGroups::from_groups({{0}, {}}); }) == ErrorKind::GroupCoverage);
  CHECK(kind_of([] { (void)ReplicaGroups::from_groups({{0, 1}, {1}}); }) == ErrorKind::GroupCoverage);
  const auto partial = ReplicaGroups::from_groups({{0}});
  const auto set = oracle::to_set({{0, {1, 0}, {0.8, 0.2}}, {1, {1, 0}, {0.6, 0.4}}}, 2);
  CHECK(kind_of([&] { (void)variance_baseline(set, &partial); }) == ErrorKind::GroupCoverage);
}

TEST_CASE("prediction set validation") {
  CHECK(kind_of([] { PredictionSet(2, {}); }) == ErrorKind::InvalidPredictionSet);
  CHECK(kind_of([] {
          (void)oracle::to_set({{0, {1, 0}, {0.5, 0.5}}, {0, {0, 1}, {0.5, 0.5}}}, 2);
        }) == ErrorKind::InvalidPredictionSet);
  CHECK(kind_of([] { (void)oracle::to_set({{0, {1, 0, 0}, {0.5, 0.5, 0}}}, 2); }) ==
        ErrorKind::InvalidPredictionSet);
}

TEST_CASE("two-pass streaming equals in-memory") {
  std::mt19937_64 g(31);
  for (int t = 0; t < 20; ++t) {
    const std::size_t C = 2 + t % 7;
    const auto set = oracle::to_set(oracle::random_mixed(g, C, C + 997 * t), C);
    VectorPredictionStream s(set);
    CHECK(two_pass_stream(s) == metric_m(set));
  }
}

TEST_CASE("two-pass replay mismatch") {
  std::mt19937_64 g(1);
  const auto set = oracle::to_set(oracle::random_one_hot(g, 3, 20), 3);
  BrokenReplay s(set);
  CHECK(kind_of([&] { (void)two_pass_stream(s); }) == ErrorKind::ReplayMismatch);
}

TEST_CASE("parallel evaluation is bitwise identical") {
  std::mt19937_64 g(8);
  const auto set = oracle::to_set(oracle::random_mixed(g, 10, 20'000), 10);
  MetricOptions one, many;
  many.workers = 8;
  CHECK(metric_m(set, one) == metric_m(set, many));
  VectorPredictionStream s(set);
  CHECK(two_pass_stream(s, many) == metric_m(set, one));
}

TEST_CASE("subsample") {
  std::mt19937_64 g(4);
  const auto set = oracle::to_set(oracle::random_one_hot(g, 3, 500), 3);
  CHECK(subsample(set, 1.0, 9) == set);
  const auto a = subsample(set, 0.5, 9), b = subsample(set, 0.5, 9);
  CHECK(a == b);
  CHECK(a.size() == 250);
  CHECK(subsample(set, 0.5, 10) != a);
  CHECK(std::is_sorted(a.records().begin(), a.records().end(),
                       [](const auto& x, const auto& y) { return x.id < y.id; }));
  CHECK(kind_of([&] { (void)subsample(set, 0.001, 1); }) == ErrorKind::EmptyResult);
  CHECK(kind_of([&] { (void)subsample(set, 0.0, 1); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { (void)subsample(set, 1.5, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("half subsample of a 50k teacher set stays near the full metric") {
  // Noisy synthetic teacher over 50,000 images; compare M on a 50% subsample.
  synth::DatasetOptions o;
  o.num_classes = 10;
  o.per_class = 5000;
  o.noise_std = 60;
  o.width = 4;
  o.height = 4;
  o.seed = 12;
  const auto ds = synth::make_synthetic_dataset(o);
  const auto teacher = synth::SyntheticTeacher::with_default_palette(10, 10.0);
  std::vector<PredictionRecord> recs;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    recs.push_back({i, one_hot(ds.label(i), 10), teacher.predict(ds.image(i))});
  }
  const PredictionSet set(10, std::move(recs));
  const auto full = metric_m(set);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto half = metric_m(subsample(set, 0.5, seed));
    worst = std::max(worst, std::abs(half.m - full.m));
  }
  MESSAGE("max |M_half - M_full| over 5 seeds: " << worst);
  CHECK(worst <= 0.02);
}

TEST_CASE("subsampled stream keeps the same records on replay") {
  std::mt19937_64 g(6);
  const auto set = oracle::to_set(oracle::random_one_hot(g, 4, 4000), 4);
  VectorPredictionStream inner(set);
  SubsampledStream s(inner, 0.3, 77);
  std::vector<RecordId> first, second;
  s.rewind();
  while (auto r = s.next()) first.push_back(r->id);
  s.rewind();
  while (auto r = s.next()) second.push_back(r->id);
  CHECK(first == second);
  CHECK(static_cast<double>(first.size()) == doctest::Approx(1200).epsilon(0.1));
  CHECK_NOTHROW((void)two_pass_stream(s));
}
