// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "augrank/metrics.hpp"

namespace augrank {

struct RankedEntry {
  std::string da_name;
  MetricReport report;
  /// 1-based position after sorting.
  std::size_t rank = 0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

/// Candidate augmentations sorted ascending by M, ties broken by name.
struct RankingReport {
  std::vector<RankedEntry> entries;
  std::string selected;
  std::optional<double> spearman_vs_accuracy;
  std::optional<std::string> accuracy_source;

  friend bool operator==(const RankingReport&, const RankingReport&) = default;
};

[[nodiscard]] RankingReport rank_das(std::vector<MetricReport> reports);

/// Average ranks (1-based); tied values share the mean of their positions.
[[nodiscard]] std::vector<double> fractional_ranks(std::span<const double> values);

/// Spearman's rho as the Pearson correlation of fractional ranks.
[[nodiscard]] double spearman(std::span<const double> xs, std::span<const double> ys);

/// Ranks the reports and correlates their M values with observed student
/// accuracies. A perfect metric scores -1 (lower M, higher accuracy).
[[nodiscard]] RankingReport evaluate_ranking(std::vector<MetricReport> reports,
                                             const std::map<std::string, double>& accuracies,
                                             std::optional<std::string> accuracy_source = {});

/// Fills spearman_vs_accuracy of an existing ranking.
void attach_accuracies(RankingReport& ranking, const std::map<std::string, double>& accuracies,
                       std::optional<std::string> accuracy_source = {});

}  // namespace augrank
