// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace augrank {

/// 8-bit RGB image stored channel-planar: all R, then all G, then all B,
/// each plane row-major.
class Image {
 public:
  static constexpr std::size_t kChannels = 3;

  Image() = default;
  /// Zero-filled image.
  Image(std::uint32_t width, std::uint32_t height);
  Image(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> pixels);

  [[nodiscard]] std::uint32_t width() const noexcept { return width_; }
  [[nodiscard]] std::uint32_t height() const noexcept { return height_; }
  [[nodiscard]] std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }
  [[nodiscard]] std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  [[nodiscard]] std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  [[nodiscard]] std::uint8_t at(std::size_t channel, std::size_t x, std::size_t y) const {
    return pixels_[channel * plane_size() + y * width_ + x];
  }
  [[nodiscard]] std::uint8_t& at(std::size_t channel, std::size_t x, std::size_t y) {
    return pixels_[channel * plane_size() + y * width_ + x];
  }

  [[nodiscard]] bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Labelled images of uniform size; sample ids are the positions 0..N-1.
class ImageDataset {
 public:
  ImageDataset() = default;
  ImageDataset(std::size_t num_classes, std::vector<Image> images,
               std::vector<std::size_t> labels);

  [[nodiscard]] std::size_t size() const noexcept { return images_.size(); }
  [[nodiscard]] bool empty() const noexcept { return images_.empty(); }
  [[nodiscard]] std::size_t num_classes() const noexcept { return num_classes_; }
  [[nodiscard]] const Image& image(std::size_t id) const { return images_[id]; }
  [[nodiscard]] std::size_t label(std::size_t id) const { return labels_[id]; }
  [[nodiscard]] const std::vector<Image>& images() const noexcept { return images_; }
  [[nodiscard]] const std::vector<std::size_t>& labels() const noexcept { return labels_; }

  friend bool operator==(const ImageDataset&, const ImageDataset&) = default;

 private:
  std::size_t num_classes_ = 0;
  std::vector<Image> images_;
  std::vector<std::size_t> labels_;
};

}  // namespace augrank
