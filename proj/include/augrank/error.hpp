// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace augrank {

enum class ErrorKind {
  InvalidArgument,
  // prob_core
  AllZero,
  NegativeEntry,
  NonFinite,
  NotNormalized,
  LengthMismatch,
  IndexOutOfRange,
  // metrics
  InvalidPredictionSet,
  MixedLabels,
  EmptyClass,
  GroupCoverage,
  ReplayMismatch,
  EmptyResult,
  // augmentations
  InvalidImage,
  OffsetOutOfRange,
  FactorOutOfRange,
  DimensionMismatch,
  InvalidSpec,
  // ranking
  DuplicateName,
  ClassCountMismatch,
  DegenerateInput,
  MissingAccuracy,
  // dataset_io
  TruncatedFile,
  LabelOutOfRange,
  BadHeader,
  BadLine,
  CountMismatch,
  VersionUnsupported,
  BadMagic,
  Truncated,
  BadReport,
  IoFailure,
  // cli
  ConfigError,
  MissingInput,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `location()` carries a 1-based line
/// number for text formats or a byte offset for binary formats when known.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> location = std::nullopt);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::optional<std::size_t> location() const noexcept { return location_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> location_;
};

}  // namespace augrank
