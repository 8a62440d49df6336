// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#pragma once

/**
 * @file augment.hpp
 * @brief Seeded image augmentations and the replayable augmentation stream.
 *
 * Pixel math is done in double and written back clamped to [0, 255] with
 * round-half-to-even, so outputs are byte-exact across platforms.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "augrank/image.hpp"
#include "augrank/metrics.hpp"
#include "augrank/prob.hpp"
#include "augrank/rng.hpp"

namespace augrank::aug {

// Hard limits for jitter factors; specs usually sample from [0.5, 1.5].
inline constexpr double kMinJitterFactor = 0.0;
inline constexpr double kMaxJitterFactor = 2.0;
inline constexpr double kDefaultJitterLow = 0.5;
inline constexpr double kDefaultJitterHigh = 1.5;
inline constexpr std::uint32_t kDefaultPad = 4;
inline constexpr std::uint32_t kMaxPad = 64;

// ---------------------------------------------------------------------------
// Deterministic primitives

[[nodiscard]] Image horizontal_flip(const Image& img);

/// Zero-pads by `pad` on every side and crops a window of the original size
/// whose top-left corner is (offset_x, offset_y) in padded coordinates.
[[nodiscard]] Image crop_pad(const Image& img, std::uint32_t pad, std::uint32_t offset_x,
                             std::uint32_t offset_y);

struct JitterFactors {
  double brightness = 1.0;
  double contrast = 1.0;
  double saturation = 1.0;
};

/// Brightness, then contrast around the mean luma, then saturation around
/// each pixel's luma. Factors must lie in [kMinJitterFactor, kMaxJitterFactor].
[[nodiscard]] Image color_jitter(const Image& img, const JitterFactors& factors);

/// Counter-clockwise rotation by quarter_turns * 90 degrees.
[[nodiscard]] Image rotate90(const Image& img, int quarter_turns);

/// Zeroes a side x side square whose top-left is (center - side/2), clipped.
[[nodiscard]] Image cutout(const Image& img, std::int64_t center_x, std::int64_t center_y,
                           std::uint32_t side);

// ---------------------------------------------------------------------------
// Label-mixing augmentations

struct LabeledImage {
  Image image;
  LabelWeights labels;
};

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct Box {
  std::uint32_t x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  [[nodiscard]] std::uint64_t area() const noexcept {
    return static_cast<std::uint64_t>(x1 - x0) * (y1 - y0);
  }
};

struct MixResult {
  Image image;
  LabelWeights labels;
  /// Fraction of the mix attributed to the first input.
  double lambda = 1.0;
  /// Pasted rectangle; empty for MixUp.
  Box box;
};

/// Pastes `box` of b into a and mixes labels by the retained area of a.
[[nodiscard]] MixResult cutmix_with_box(const LabeledImage& a, const LabeledImage& b,
                                        const Box& box);

/// lambda ~ Beta(alpha, alpha), a rectangle with sides scaled by
/// sqrt(1 - lambda) centred at a uniform pixel and clipped to the image.
/// The returned lambda is recomputed from the clipped area.
[[nodiscard]] MixResult cutmix_pair(const LabeledImage& a, const LabeledImage& b,
                                    rng::Stream& stream, double alpha = 1.0);

[[nodiscard]] MixResult mixup_with_lambda(const LabeledImage& a, const LabeledImage& b,
                                          double lambda);

[[nodiscard]] MixResult mixup_pair(const LabeledImage& a, const LabeledImage& b,
                                   rng::Stream& stream, double alpha = 1.0);

// ---------------------------------------------------------------------------
// TrivialAugment-style policy: one op, one strength, per image.

enum class TrivialOp : std::uint8_t {
  Identity,
  Flip,
  CropPad,
  Brightness,
  Contrast,
  Saturation,
  Rotate,
  Cutout,
};
inline constexpr std::size_t kTrivialOpCount = 8;

[[nodiscard]] TrivialOp sample_trivial_op(rng::Stream& stream) noexcept;
/// Draws the op's strength from `stream` and applies it once.
[[nodiscard]] Image apply_trivial_op(const Image& img, TrivialOp op, rng::Stream& stream);
[[nodiscard]] Image trivial_policy(const Image& img, rng::Stream& stream);

// ---------------------------------------------------------------------------
// Specs

struct Range {
  double low = 1.0;
  double high = 1.0;

  friend bool operator==(const Range&, const Range&) = default;
};

struct RandomFlip {
  double probability = 0.5;
  friend bool operator==(const RandomFlip&, const RandomFlip&) = default;
};
struct RandomCrop {
  std::uint32_t pad = kDefaultPad;
  friend bool operator==(const RandomCrop&, const RandomCrop&) = default;
};
struct RandomJitter {
  Range brightness{kDefaultJitterLow, kDefaultJitterHigh};
  Range contrast{kDefaultJitterLow, kDefaultJitterHigh};
  Range saturation{kDefaultJitterLow, kDefaultJitterHigh};
  friend bool operator==(const RandomJitter&, const RandomJitter&) = default;
};
struct RandomRotate {
  friend bool operator==(const RandomRotate&, const RandomRotate&) = default;
};
struct RandomCutout {
  /// Largest square side as a fraction of the shorter image side.
  double max_fraction = 0.5;
  friend bool operator==(const RandomCutout&, const RandomCutout&) = default;
};

using OpSpec = std::variant<RandomFlip, RandomCrop, RandomJitter, RandomRotate, RandomCutout>;

enum class BatchKind : std::uint8_t { CutMix, MixUp };

struct BatchOp {
  BatchKind kind = BatchKind::CutMix;
  double alpha = 1.0;
  friend bool operator==(const BatchOp&, const BatchOp&) = default;
};

enum class Policy : std::uint8_t { Trivial };

struct AugmentationSpec {
  std::string name;
  std::vector<OpSpec> ops;
  /// Applied after `ops`.
  std::optional<Policy> policy;
  /// Applied last, pairing each sample with a partner drawn from the dataset.
  std::optional<BatchOp> batch;

  friend bool operator==(const AugmentationSpec&, const AugmentationSpec&) = default;
};

/// Throws InvalidSpec when a parameter is outside its documented range.
void validate(const AugmentationSpec& spec);

/// Applies `ops` then `policy` to one image.
[[nodiscard]] Image run_per_image(const AugmentationSpec& spec, const Image& img,
                                  rng::Stream& stream);

struct AugmentedSample {
  RecordId record_id = 0;
  /// The sample itself, then the batch partner when a batch op fired.
  std::vector<RecordId> source_ids;
  std::uint32_t replica_index = 0;
  Image image;
  LabelWeights labels;

  friend bool operator==(const AugmentedSample&, const AugmentedSample&) = default;
};

/// Record id layout shared by the stream, the container and the variance
/// grouping: sample_id * replicas + replica_index.
[[nodiscard]] constexpr RecordId record_id_for(std::uint64_t sample_id, std::uint32_t replica,
                                               std::uint32_t replicas) noexcept {
  return sample_id * replicas + replica;
}

/// Produces one augmented sample per (sample, replica) in that order. Each
/// sample draws only from seed_for(seed, sample, replica), so the stream
/// replays byte-for-byte and any element can be regenerated alone.
class AugmentedStream {
 public:
  AugmentedStream(AugmentationSpec spec, const ImageDataset& dataset, std::uint64_t seed,
                  std::uint32_t replicas);

  [[nodiscard]] std::optional<AugmentedSample> next();
  void rewind() noexcept { position_ = 0; }
  [[nodiscard]] std::size_t size() const noexcept { return dataset_->size() * replicas_; }
  [[nodiscard]] AugmentedSample generate(std::uint64_t sample_id, std::uint32_t replica) const;

  [[nodiscard]] const AugmentationSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const ImageDataset& dataset() const noexcept { return *dataset_; }

 private:
  AugmentationSpec spec_;
  const ImageDataset* dataset_;
  std::uint64_t seed_;
  std::uint32_t replicas_;
  std::size_t position_ = 0;
};

/// Materialized form of AugmentedStream.
[[nodiscard]] std::vector<AugmentedSample> apply(const AugmentationSpec& spec,
                                                 const ImageDataset& dataset,
                                                 std::uint64_t seed, std::uint32_t replicas);

}  // namespace augrank::aug
