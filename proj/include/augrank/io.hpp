// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#pragma once

/**
 * @file io.hpp
 * @brief File formats.
 *
 * CIFAR binary (read only)
 *   Records of 3073 bytes: label byte, then 1024 R, 1024 G, 1024 B bytes of a
 *   row-major 32x32 image.
 *
 * Prediction dump (text, UTF-8)
 *   #augrank-preds v1 classes=<C> count=<N>
 *   <id>,<class>:<weight>[;<class>:<weight>...],<p_0>|<p_1>|...|<p_{C-1}>
 *   Only nonzero label weights are written. Numbers use 17 significant
 *   digits, so doubles round-trip exactly.
 *
 * Augmented container (binary, little-endian)
 *   header  "AUGR" u16 version, u16 C, u32 N, u16 width, u16 height, u16 0
 *   record  u32 id, u16 replica, u16 K, K x (u16 class, f64 weight),
 *           width * height * 3 channel-planar pixel bytes
 *
 * Reports (JSON)
 *   Stable key order, doubles at 17 significant digits, absent optionals
 *   omitted rather than null.
 */

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "augrank/augment.hpp"
#include "augrank/image.hpp"
#include "augrank/metrics.hpp"
#include "augrank/ranking.hpp"

namespace augrank::io {

inline constexpr std::string_view kToolName = "augrank";
inline constexpr std::string_view kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// CIFAR

inline constexpr std::size_t kCifarSide = 32;
inline constexpr std::size_t kCifarRecordBytes = 1 + kCifarSide * kCifarSide * 3;

/// Ids follow file order across all files.
[[nodiscard]] ImageDataset load_cifar_binary(const std::vector<std::filesystem::path>& paths,
                                             std::size_t num_classes);

// ---------------------------------------------------------------------------
// Prediction dump

inline constexpr int kDumpVersion = 1;

void write_prediction_dump(std::ostream& out, const PredictionSet& preds);
void write_prediction_dump(const std::filesystem::path& path, const PredictionSet& preds);

[[nodiscard]] PredictionSet read_prediction_dump(std::istream& in);
[[nodiscard]] PredictionSet read_prediction_dump(const std::filesystem::path& path);

struct DumpHeader {
  std::size_t num_classes = 0;
  std::size_t count = 0;
};

[[nodiscard]] DumpHeader parse_dump_header(const std::string& line);

/// Parses one record line. `line_number` is reported in BadLine errors.
[[nodiscard]] PredictionRecord parse_dump_line(const std::string& line, std::size_t num_classes,
                                               std::size_t line_number);

[[nodiscard]] std::string format_dump_line(const PredictionRecord& record);

/// Replays a dump from disk without materializing it. Structural checks
/// (count, duplicate ids) happen in the metric passes.
class PredictionDumpStream final : public PredictionStream {
 public:
  explicit PredictionDumpStream(std::filesystem::path path);

  [[nodiscard]] std::size_t num_classes() const override { return header_.num_classes; }
  void rewind() override;
  [[nodiscard]] std::optional<PredictionRecord> next() override;

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  DumpHeader header_;
  std::size_t line_number_ = 0;
  std::size_t records_read_ = 0;
};

// ---------------------------------------------------------------------------
// Augmented container

inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderBytes = 16;

struct ContainerRecord {
  std::uint32_t id = 0;
  std::uint16_t replica = 0;
  LabelWeights labels;
  Image image;

  friend bool operator==(const ContainerRecord&, const ContainerRecord&) = default;
};

struct AugmentedContainer {
  std::uint16_t version = kContainerVersion;
  std::size_t num_classes = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<ContainerRecord> records;

  friend bool operator==(const AugmentedContainer&, const AugmentedContainer&) = default;
};

/// Streams samples to disk and patches the header on close().
class AugmentedWriter {
 public:
  AugmentedWriter(const std::filesystem::path& path, std::size_t num_classes);
  ~AugmentedWriter();
  AugmentedWriter(const AugmentedWriter&) = delete;
  AugmentedWriter& operator=(const AugmentedWriter&) = delete;

  void write(const aug::AugmentedSample& sample);
  void write(const ContainerRecord& record);
  void close();

  [[nodiscard]] std::uint32_t count() const noexcept { return count_; }

 private:
  void write_header();

  std::filesystem::path path_;
  std::ofstream out_;
  std::uint16_t num_classes_;
  std::uint32_t count_ = 0;
  std::optional<std::pair<std::uint16_t, std::uint16_t>> dims_;
  bool closed_ = false;
};

[[nodiscard]] std::vector<std::uint8_t> encode_augmented(const AugmentedContainer& container);
[[nodiscard]] AugmentedContainer decode_augmented(const std::vector<std::uint8_t>& bytes);

void write_augmented_dataset(const std::filesystem::path& path, std::size_t num_classes,
                             aug::AugmentedStream& stream);
[[nodiscard]] AugmentedContainer read_augmented_dataset(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Reports

/// Serializes with two-space indentation and 17 significant digits.
[[nodiscard]] std::string dump_json(const nlohmann::ordered_json& j);

[[nodiscard]] nlohmann::ordered_json to_json(const MetricReport& report);
[[nodiscard]] nlohmann::ordered_json to_json(const RankingReport& report);
[[nodiscard]] MetricReport metric_report_from_json(const nlohmann::json& j);
[[nodiscard]] RankingReport ranking_report_from_json(const nlohmann::json& j);

/// `extra` keys (config, timestamp, ...) are appended after the report fields.
void write_report(const std::filesystem::path& path, const MetricReport& report,
                  const nlohmann::ordered_json& extra = nlohmann::ordered_json::object());
void write_report(const std::filesystem::path& path, const RankingReport& report,
                  const nlohmann::ordered_json& extra = nlohmann::ordered_json::object());

[[nodiscard]] nlohmann::json read_json(const std::filesystem::path& path);
[[nodiscard]] MetricReport read_metric_report(const std::filesystem::path& path);
[[nodiscard]] RankingReport read_ranking_report(const std::filesystem::path& path);

/// `da_name,accuracy` lines; a non-numeric first line is taken as a header.
[[nodiscard]] std::map<std::string, double> read_accuracies(const std::filesystem::path& path);

/// 17-significant-digit shortest-safe decimal.
[[nodiscard]] std::string format_double(double v);

}  // namespace augrank::io
