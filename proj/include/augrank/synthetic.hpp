// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "augrank/image.hpp"
#include "augrank/prob.hpp"

namespace augrank::synth {

/// Colour with channels in [0, 1].
struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// C distinct colours on the RGB cube. The first four form a regular
/// tetrahedron (black, yellow, magenta, cyan), then white, red, green, blue.
/// Beyond eight classes the remaining points of the coarsest k x k x k grid
/// holding C points follow in lexicographic (r, g, b) order.
[[nodiscard]] std::vector<Rgb> default_palette(std::size_t num_classes);

/// Closed-form teacher: softmax over -sharpness * |mean colour - class colour|^2,
/// where the mean colour is taken over all pixels and scaled to [0, 1].
class SyntheticTeacher {
 public:
  SyntheticTeacher(std::vector<Rgb> class_colors, double sharpness);
  [[nodiscard]] static SyntheticTeacher with_default_palette(std::size_t num_classes,
                                                             double sharpness);

  [[nodiscard]] ProbVector predict(const Image& img) const;

  [[nodiscard]] std::size_t num_classes() const noexcept { return colors_.size(); }
  [[nodiscard]] const std::vector<Rgb>& class_colors() const noexcept { return colors_; }
  [[nodiscard]] double sharpness() const noexcept { return sharpness_; }

 private:
  std::vector<Rgb> colors_;
  double sharpness_;
};

[[nodiscard]] Rgb mean_color(const Image& img);

struct DatasetOptions {
  std::size_t num_classes = 4;
  std::size_t per_class = 250;
  /// Per-pixel Gaussian noise in 0-255 units.
  double noise_std = 0.0;
  std::uint64_t seed = 0;
  std::uint32_t width = 32;
  std::uint32_t height = 32;
};

/// Class-major: ids [c * per_class, (c + 1) * per_class) have label c and
/// base colour default_palette(C)[c], plus clamped, rounded noise.
[[nodiscard]] ImageDataset make_synthetic_dataset(const DatasetOptions& options);

}  // namespace augrank::synth
