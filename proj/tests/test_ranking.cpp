// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "augrank/error.hpp"
#include "augrank/ranking.hpp"
#include "oracle.hpp"

using namespace augrank;

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

MetricReport report(std::string name, double m, std::size_t C = 4) {
  MetricReport r;
  r.da_name = std::move(name);
  r.num_classes = C;
  r.n = 10;
  r.dev = m + 1.0;
  r.cmi = 1.0;
  r.m = r.dev - r.cmi;
  return r;
}

}  // namespace

TEST_CASE("rank_das orders ascending by m") {
  CHECK(rank_das({report("only", 0.4)}).selected == "only");
  const auto r = rank_das({report("a", 0.3), report("b", 0.1), report("c", 0.2)});
  CHECK(r.entries[0].da_name == "b");
  CHECK(r.entries[1].da_name == "c");
  CHECK(r.entries[2].da_name == "a");
  CHECK(r.entries[2].rank == 3);
  CHECK(r.selected == "b");
  const auto t = rank_das({report("zeta", 0.5), report("alpha", 0.5)});
  CHECK(t.selected == "alpha");
}

TEST_CASE("rank_das errors") {
  CHECK(kind_of([] { (void)rank_das({report("a", 1), report("a", 2)}); }) == ErrorKind::DuplicateName);
  CHECK(kind_of([] { (void)rank_das({report("a", 1), report("b", 2, 10)}); }) ==
        ErrorKind::ClassCountMismatch);
  CHECK(kind_of([] { (void)rank_das({}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("spearman closed forms") {
  const std::vector<double> a{1, 2, 3}, b{3, 2, 1};
  CHECK(spearman(a, b) == -1.0);
  CHECK(spearman(a, a) == 1.0);

  // Tie-free n = 7 with sum of squared rank differences 80.
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7}, y{2, 6, 7, 5, 4, 3, 1};
  double d2 = 0;
  for (std::size_t i = 0; i < 7; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  REQUIRE(d2 == 80);
  CHECK(std::abs(spearman(x, y) - (1.0 - 480.0 / 336.0)) <= 1e-12);
  CHECK(spearman(x, y) == doctest::Approx(-0.429).epsilon(1e-3));
}

TEST_CASE("fractional ranks and ties") {
  const std::vector<double> xs{1, 1, 2}, ys{1, 2, 3};
  const auto r = fractional_ranks(xs);
  CHECK(r == std::vector<double>{1.5, 1.5, 3});
  CHECK(std::abs(spearman(xs, ys) - static_cast<double>(oracle::spearman(xs, ys))) <= 1e-12);

  std::mt19937_64 g(17);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 2 + t % 15;
    std::vector<double> p(n), q(n);
    for (auto& v : p) v = static_cast<double>(g() % 5);
    for (auto& v : q) v = static_cast<double>(g() % 4);
    if (std::all_of(p.begin(), p.end(), [&](double v) { return v == p[0]; }) ||
        std::all_of(q.begin(), q.end(), [&](double v) { return v == q[0]; })) {
      CHECK(kind_of([&] { (void)spearman(p, q); }) == ErrorKind::DegenerateInput);
      continue;
    }
    CHECK(std::abs(spearman(p, q) - static_cast<double>(oracle::spearman(p, q))) <= 1e-12);
  }
}

TEST_CASE("spearman errors") {
  const std::vector<double> a{1, 2}, b{1, 2, 3}, one{1}, c{5, 5};
  CHECK(kind_of([&] { (void)spearman(a, b); }) == ErrorKind::LengthMismatch);
  CHECK(kind_of([&] { (void)spearman(one, one); }) == ErrorKind::DegenerateInput);
  CHECK(kind_of([&] { (void)spearman(a, c); }) == ErrorKind::DegenerateInput);
  const std::vector<double> n{1, std::nan("")};
  CHECK(kind_of([&] { (void)spearman(a, n); }) == ErrorKind::NonFinite);
}

TEST_CASE("evaluate_ranking against accuracies") {
  std::vector<MetricReport> reps;
  for (int i = 0; i < 7; ++i) reps.push_back(report("da" + std::to_string(i), 0.1 * i));
  std::map<std::string, double> anti, mono;
  for (int i = 0; i < 7; ++i) {
    anti["da" + std::to_string(i)] = 90.0 - i;
    mono["da" + std::to_string(i)] = 80.0 + i;
  }
  CHECK(*evaluate_ranking(reps, anti).spearman_vs_accuracy == -1.0);
  CHECK(*evaluate_ranking(reps, mono).spearman_vs_accuracy == 1.0);

  // Injected ordering checked against the oracle.
  std::map<std::string, double> mixed{{"da0", 70}, {"da1", 74}, {"da2", 71}, {"da3", 73},
                                      {"da4", 72}, {"da5", 76}, {"da6", 75}};
  std::vector<double> ms, accs;
  for (const auto& r : reps) {
    ms.push_back(r.m);
    accs.push_back(mixed[r.da_name]);
  }
  const auto ev = evaluate_ranking(reps, mixed, "acc.csv");
  CHECK(std::abs(*ev.spearman_vs_accuracy - static_cast<double>(oracle::spearman(ms, accs))) <= 1e-12);
  CHECK(*ev.accuracy_source == "acc.csv");

  mixed.erase("da3");
  CHECK(kind_of([&] { (void)evaluate_ranking(reps, mixed); }) == ErrorKind::MissingAccuracy);
}
