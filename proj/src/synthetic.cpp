// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#include "augrank/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "augrank/compensated_sum.hpp"
#include "augrank/error.hpp"
#include "augrank/rng.hpp"

namespace augrank::synth {

std::vector<Rgb> default_palette(std::size_t num_classes) {
  std::vector<Rgb> out = {{0, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1},
                          {1, 1, 1}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  if (num_classes <= out.size()) {
    out.resize(num_classes);
    return out;
  }
  std::size_t levels = 3;
  while (levels * levels * levels < num_classes) ++levels;
  const double step = 1.0 / static_cast<double>(levels - 1);
  for (std::size_t i = 0; i < levels && out.size() < num_classes; ++i) {
    for (std::size_t j = 0; j < levels && out.size() < num_classes; ++j) {
      for (std::size_t k = 0; k < levels && out.size() < num_classes; ++k) {
        const bool corner = (i == 0 || i == levels - 1) && (j == 0 || j == levels - 1) &&
                            (k == 0 || k == levels - 1);
        if (!corner) out.push_back({i * step, j * step, k * step});
      }
    }
  }
  return out;
}

SyntheticTeacher::SyntheticTeacher(std::vector<Rgb> class_colors, double sharpness)
    : colors_(std::move(class_colors)), sharpness_(sharpness) {
  if (colors_.size() < 2) throw Error(ErrorKind::InvalidArgument, "teacher needs >= 2 classes");
  if (!(sharpness_ > 0.0) || !std::isfinite(sharpness_)) {
    throw Error(ErrorKind::InvalidArgument, "sharpness must be positive and finite");
  }
  for (std::size_t i = 0; i < colors_.size(); ++i) {
    for (std::size_t j = i + 1; j < colors_.size(); ++j) {
      if (colors_[i] == colors_[j]) {
        throw Error(ErrorKind::InvalidArgument, "class colours " + std::to_string(i) + " and " +
                                                    std::to_string(j) + " coincide");
      }
    }
  }
}

SyntheticTeacher SyntheticTeacher::with_default_palette(std::size_t num_classes,
                                                        double sharpness) {
  return SyntheticTeacher(default_palette(num_classes), sharpness);
}

Rgb mean_color(const Image& img) {
  const std::size_t n = img.plane_size();
  if (n == 0) throw Error(ErrorKind::InvalidImage, "empty image");
  const auto px = img.pixels();
  std::uint64_t sums[3] = {0, 0, 0};
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < n; ++i) sums[c] += px[c * n + i];
  }
  const double scale = 255.0 * static_cast<double>(n);
  return {static_cast<double>(sums[0]) / scale, static_cast<double>(sums[1]) / scale,
          static_cast<double>(sums[2]) / scale};
}

ProbVector SyntheticTeacher::predict(const Image& img) const {
  const Rgb m = mean_color(img);
  std::vector<double> logits(colors_.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < colors_.size(); ++c) {
    const double dr = m.r - colors_[c].r;
    const double dg = m.g - colors_[c].g;
    const double db = m.b - colors_[c].b;
    logits[c] = -sharpness_ * (dr * dr + dg * dg + db * db);
    top = std::max(top, logits[c]);
  }
  for (double& l : logits) l = std::exp(l - top);
  return normalize(logits);
}

ImageDataset make_synthetic_dataset(const DatasetOptions& options) {
  if (options.num_classes < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 classes");
  if (options.per_class < 1) throw Error(ErrorKind::InvalidArgument, "need per_class >= 1");
  if (!(options.noise_std >= 0.0) || !std::isfinite(options.noise_std)) {
    throw Error(ErrorKind::InvalidArgument, "noise_std must be non-negative");
  }
  if (options.width == 0 || options.height == 0) {
    throw Error(ErrorKind::InvalidArgument, "image dimensions must be positive");
  }
  const auto palette = default_palette(options.num_classes);
  std::vector<Image> images;
  std::vector<std::size_t> labels;
  images.reserve(options.num_classes * options.per_class);
  labels.reserve(images.capacity());

  for (std::size_t c = 0; c < options.num_classes; ++c) {
    const double base[3] = {palette[c].r * 255.0, palette[c].g * 255.0, palette[c].b * 255.0};
    for (std::size_t k = 0; k < options.per_class; ++k) {
      const std::uint64_t id = c * options.per_class + k;
      auto stream = rng::seed_for(options.seed, id, 0, rng::Domain::Synthetic);
      Image img(options.width, options.height);
      auto px = img.pixels();
      const std::size_t n = img.plane_size();
      for (std::size_t ch = 0; ch < 3; ++ch) {
        for (std::size_t i = 0; i < n; ++i) {
          const double v =
              options.noise_std == 0.0 ? base[ch] : base[ch] + options.noise_std * stream.normal();
          px[ch * n + i] = static_cast<std::uint8_t>(std::nearbyint(std::clamp(v, 0.0, 255.0)));
        }
      }
      images.push_back(std::move(img));
      labels.push_back(c);
    }
  }
  return ImageDataset(options.num_classes, std::move(images), std::move(labels));
}

}  // namespace augrank::synth
