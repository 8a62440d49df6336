// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#include "augrank/error.hpp"

namespace augrank {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::AllZero: return "AllZero";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InvalidPredictionSet: return "InvalidPredictionSet";
    case ErrorKind::MixedLabels: return "MixedLabels";
    case ErrorKind::EmptyClass: return "EmptyClass";
    case ErrorKind::GroupCoverage: return "GroupCoverage";
    case ErrorKind::ReplayMismatch: return "ReplayMismatch";
    case ErrorKind::EmptyResult: return "EmptyResult";
    case ErrorKind::InvalidImage: return "InvalidImage";
    case ErrorKind::OffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorKind::FactorOutOfRange: return "FactorOutOfRange";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::ClassCountMismatch: return "ClassCountMismatch";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::MissingAccuracy: return "MissingAccuracy";
    case ErrorKind::TruncatedFile: return "TruncatedFile";
    case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::BadHeader: return "BadHeader";
    case ErrorKind::BadLine: return "BadLine";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::VersionUnsupported: return "VersionUnsupported";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::Truncated: return "Truncated";
    case ErrorKind::BadReport: return "BadReport";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::MissingInput: return "MissingInput";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorKind kind, const std::string& message,
                    std::optional<std::size_t> location) {
  std::string out{to_string(kind)};
  if (location) out += " at " + std::to_string(*location);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> location)
    : std::runtime_error(compose(kind, message, location)), kind_(kind), location_(location) {}

}  // namespace augrank
