// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#include "augrank/image.hpp"

#include <string>

#include "augrank/error.hpp"

namespace augrank {

Image::Image(std::uint32_t width, std::uint32_t height)
    : width_(width), height_(height), pixels_(plane_size() * kChannels, 0) {}

Image::Image(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (pixels_.size() != plane_size() * kChannels) {
    throw Error(ErrorKind::InvalidImage, "pixel buffer has " + std::to_string(pixels_.size()) +
                                             " bytes, expected " +
                                             std::to_string(plane_size() * kChannels));
  }
}

ImageDataset::ImageDataset(std::size_t num_classes, std::vector<Image> images,
                           std::vector<std::size_t> labels)
    : num_classes_(num_classes), images_(std::move(images)), labels_(std::move(labels)) {
  if (images_.size() != labels_.size()) {
    throw Error(ErrorKind::InvalidArgument, "image and label counts differ");
  }
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (labels_[i] >= num_classes_) {
      throw Error(ErrorKind::LabelOutOfRange, "image " + std::to_string(i) + " has label " +
                                                  std::to_string(labels_[i]) + " with " +
                                                  std::to_string(num_classes_) + " classes");
    }
    if (!images_[i].same_shape(images_.front())) {
      throw Error(ErrorKind::DimensionMismatch,
                  "image " + std::to_string(i) + " differs in size from image 0");
    }
  }
}

}  // namespace augrank
