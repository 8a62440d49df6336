// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#pragma once

/**
 * @file pipeline.hpp
 * @brief Run configuration and the end-to-end commands behind the CLI.
 *
 * A run config is one JSON document:
 *
 *   {
 *     "seed": 42, "replicas": 1, "subsample": 1.0,
 *     "strict_empty_class": true, "workers": 0, "output_dir": "out",
 *     "dataset": {"format": "cifar-binary", "paths": ["data_batch_1.bin"],
 *                 "num_classes": 10}
 *              | {"format": "synthetic", "num_classes": 4, "per_class": 250,
 *                 "noise_std": 0, "width": 32, "height": 32},
 *     "teacher": {"kind": "synthetic", "sharpness": 10}
 *              | {"kind": "dumps", "dumps": {"<spec>": "<path>", ...}},
 *     "augmentations": "default" | [<spec>, ...]
 *   }
 *
 * with each spec written as
 *
 *   {"name": "minimal",
 *    "ops": [{"op": "crop", "pad": 4}, {"op": "flip", "p": 0.5},
 *            {"op": "jitter", "brightness": [0.6, 1.4], "contrast": [0.6, 1.4],
 *             "saturation": [0.6, 1.4]},
 *            {"op": "rotate"}, {"op": "cutout", "max_fraction": 0.5}],
 *    "policy": "trivial",
 *    "batch": {"op": "cutmix" | "mixup", "alpha": 1.0}}
 *
 * Relative paths resolve against the config file's directory.
 */

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "augrank/augment.hpp"
#include "augrank/error.hpp"
#include "augrank/image.hpp"
#include "augrank/metrics.hpp"
#include "augrank/ranking.hpp"
#include "augrank/synthetic.hpp"

namespace augrank::pipeline {

struct DatasetConfig {
  enum class Format { CifarBinary, Synthetic };
  Format format = Format::Synthetic;
  std::vector<std::filesystem::path> paths;
  std::size_t num_classes = 4;
  /// Used when format is Synthetic; its seed is replaced by the run seed.
  synth::DatasetOptions synthetic;
};

struct TeacherConfig {
  enum class Kind { Synthetic, Dumps };
  Kind kind = Kind::Synthetic;
  double sharpness = 10.0;
  std::map<std::string, std::filesystem::path> dumps;
};

struct RunConfig {
  DatasetConfig dataset;
  TeacherConfig teacher;
  std::vector<aug::AugmentationSpec> augmentations;
  std::uint64_t seed = 0;
  std::uint32_t replicas = 1;
  double subsample = 1.0;
  EmptyClassPolicy empty_class_policy = EmptyClassPolicy::Strict;
  unsigned workers = 0;
  std::filesystem::path output_dir = "augrank-out";

  [[nodiscard]] const aug::AugmentationSpec& spec(const std::string& name) const;
};

/// The fixed family scored by `synth-demo`: identity, flip, crop_pad,
/// jitter-weak, jitter-strong, cutmix, mixup, trivial.
[[nodiscard]] std::vector<aug::AugmentationSpec> default_da_family();

[[nodiscard]] aug::AugmentationSpec spec_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::ordered_json spec_to_json(const aug::AugmentationSpec& spec);

/// Throws ConfigError for schema violations.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir = {});
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);
/// Fully resolved config, embedded in every report.
[[nodiscard]] nlohmann::ordered_json to_json(const RunConfig& config);

/// Throws ConfigError (bad values) or MissingInput (absent files).
void validate(const RunConfig& config);

[[nodiscard]] ImageDataset load_dataset(const RunConfig& config);

/// Synthetic-teacher predictions over an augmentation stream.
class TeacherStream final : public PredictionStream {
 public:
  TeacherStream(aug::AugmentedStream stream, synth::SyntheticTeacher teacher);

  [[nodiscard]] std::size_t num_classes() const override { return teacher_.num_classes(); }
  void rewind() override { stream_.rewind(); }
  [[nodiscard]] std::optional<PredictionRecord> next() override;

 private:
  aug::AugmentedStream stream_;
  synth::SyntheticTeacher teacher_;
};

/// Scores one spec. `dataset` is required for the synthetic teacher and
/// ignored for dumps. Throws MissingInput when no dump exists for the spec.
[[nodiscard]] MetricReport score_spec(const RunConfig& config, const ImageDataset* dataset,
                                      const std::string& spec_name);

[[nodiscard]] RankingReport rank_all(const RunConfig& config);

struct SynthDemoOptions {
  std::size_t num_classes = 4;
  std::size_t per_class = 250;
  std::vector<double> noise_levels{0.0};
  double sharpness = 10.0;
  std::uint64_t seed = 0;
  std::uint32_t replicas = 1;
  double subsample = 1.0;
  unsigned workers = 0;
};

struct SynthDemoResult {
  std::vector<std::pair<double, RankingReport>> rankings;
  /// noise_std,spec,rank,cmi,dev,m,variance_baseline
  std::string scatter_csv;
};

[[nodiscard]] SynthDemoResult run_synth_demo(const SynthDemoOptions& options);

/// One row per entry: name, cmi, dev, m, variance, then the selection.
[[nodiscard]] std::string format_ranking_table(const RankingReport& ranking);

/// 0 success, 1 internal, 2 config, 3 missing input, 4 data format.
[[nodiscard]] int exit_code_for(ErrorKind kind) noexcept;

[[nodiscard]] std::string utc_timestamp();

}  // namespace augrank::pipeline
