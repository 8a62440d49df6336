// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#include "augrank/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "augrank/error.hpp"

namespace augrank {

RankingReport rank_das(std::vector<MetricReport> reports) {
  if (reports.empty()) throw Error(ErrorKind::InvalidArgument, "nothing to rank");
  std::set<std::string> names;
  for (const auto& r : reports) {
    if (!names.insert(r.da_name).second) {
      throw Error(ErrorKind::DuplicateName, "augmentation '" + r.da_name + "' listed twice");
    }
    if (r.num_classes != reports.front().num_classes) {
      throw Error(ErrorKind::ClassCountMismatch,
                  "'" + r.da_name + "' has " + std::to_string(r.num_classes) + " classes, '" +
                      reports.front().da_name + "' has " +
                      std::to_string(reports.front().num_classes));
    }
  }
  std::sort(reports.begin(), reports.end(), [](const MetricReport& a, const MetricReport& b) {
    if (a.m != b.m) return a.m < b.m;
    return a.da_name < b.da_name;
  });

  RankingReport out;
  out.entries.reserve(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out.entries.push_back({reports[i].da_name, std::move(reports[i]), i + 1});
  }
  out.selected = out.entries.front().da_name;
  return out;
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share the mean 1-based rank.
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = shared;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorKind::LengthMismatch, "spearman inputs of lengths " +
                                               std::to_string(xs.size()) + " and " +
                                               std::to_string(ys.size()));
  }
  if (xs.size() < 2) throw Error(ErrorKind::DegenerateInput, "spearman needs n >= 2");
  for (auto v : {xs, ys}) {
    if (std::any_of(v.begin(), v.end(), [](double x) { return !std::isfinite(x); })) {
      throw Error(ErrorKind::NonFinite, "spearman input is not finite");
    }
  }
  const auto rx = fractional_ranks(xs);
  const auto ry = fractional_ranks(ys);
  // Both rank vectors have mean (n + 1) / 2.
  const double mean = (static_cast<double>(xs.size()) + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::DegenerateInput, "spearman input is constant");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

void attach_accuracies(RankingReport& ranking, const std::map<std::string, double>& accuracies,
                       std::optional<std::string> accuracy_source) {
  std::vector<double> metric, accuracy;
  for (const auto& e : ranking.entries) {
    const auto it = accuracies.find(e.da_name);
    if (it == accuracies.end()) {
      throw Error(ErrorKind::MissingAccuracy, "no accuracy for '" + e.da_name + "'");
    }
    metric.push_back(e.report.m);
    accuracy.push_back(it->second);
  }
  ranking.spearman_vs_accuracy = spearman(metric, accuracy);
  ranking.accuracy_source = std::move(accuracy_source);
}

RankingReport evaluate_ranking(std::vector<MetricReport> reports,
                               const std::map<std::string, double>& accuracies,
                               std::optional<std::string> accuracy_source) {
  RankingReport out = rank_das(std::move(reports));
  attach_accuracies(out, accuracies, std::move(accuracy_source));
  return out;
}

}  // namespace augrank
