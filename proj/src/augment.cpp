// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#include "augrank/augment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "augrank/error.hpp"

namespace augrank::aug {

namespace {

constexpr double kLumaR = 0.299;
constexpr double kLumaG = 0.587;
constexpr double kLumaB = 0.114;

std::uint8_t to_byte(double v) noexcept {
  // nearbyint honours the default round-to-nearest-even mode.
  return static_cast<std::uint8_t>(std::nearbyint(std::clamp(v, 0.0, 255.0)));
}

double clamp_pixel(double v) noexcept { return std::clamp(v, 0.0, 255.0); }

void check_factor(double f, const char* name) {
  if (!std::isfinite(f) || f < kMinJitterFactor || f > kMaxJitterFactor) {
    throw Error(ErrorKind::FactorOutOfRange,
                std::string(name) + " factor " + std::to_string(f) + " outside [" +
                    std::to_string(kMinJitterFactor) + ", " + std::to_string(kMaxJitterFactor) +
                    "]");
  }
}

LabelWeights mix_labels(const LabelWeights& a, const LabelWeights& b, double lambda) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::LengthMismatch, "label vectors of different length");
  }
  std::vector<double> w(a.size());
  for (std::size_t c = 0; c < w.size(); ++c) w[c] = lambda * a[c] + (1.0 - lambda) * b[c];
  return LabelWeights(std::move(w));
}

void check_pair(const LabeledImage& a, const LabeledImage& b) {
  if (!a.image.same_shape(b.image)) {
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(a.image.width()) + "x" + std::to_string(a.image.height()) +
                    " vs " + std::to_string(b.image.width()) + "x" +
                    std::to_string(b.image.height()));
  }
}

}  // namespace

Image horizontal_flip(const Image& img) {
  Image out(img.width(), img.height());
  const std::size_t w = img.width();
  for (std::size_t c = 0; c < Image::kChannels; ++c) {
    for (std::size_t y = 0; y < img.height(); ++y) {
      for (std::size_t x = 0; x < w; ++x) out.at(c, w - 1 - x, y) = img.at(c, x, y);
    }
  }
  return out;
}

Image crop_pad(const Image& img, std::uint32_t pad, std::uint32_t offset_x,
               std::uint32_t offset_y) {
  if (pad == 0) return img;
  if (offset_x > 2 * pad || offset_y > 2 * pad) {
    throw Error(ErrorKind::OffsetOutOfRange, "offset (" + std::to_string(offset_x) + ", " +
                                                 std::to_string(offset_y) + ") outside [0, " +
                                                 std::to_string(2 * pad) + "]");
  }
  Image out(img.width(), img.height());
  const auto w = static_cast<std::int64_t>(img.width());
  const auto h = static_cast<std::int64_t>(img.height());
  for (std::size_t c = 0; c < Image::kChannels; ++c) {
    for (std::int64_t y = 0; y < h; ++y) {
      const std::int64_t sy = y + offset_y - pad;
      if (sy < 0 || sy >= h) continue;
      for (std::int64_t x = 0; x < w; ++x) {
        const std::int64_t sx = x + offset_x - pad;
        if (sx < 0 || sx >= w) continue;
        out.at(c, x, y) = img.at(c, sx, sy);
      }
    }
  }
  return out;
}

Image color_jitter(const Image& img, const JitterFactors& factors) {
  check_factor(factors.brightness, "brightness");
  check_factor(factors.contrast, "contrast");
  check_factor(factors.saturation, "saturation");

  const std::size_t n = img.plane_size();
  const auto src = img.pixels();
  std::vector<double> r(n), g(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = clamp_pixel(src[i] * factors.brightness);
    g[i] = clamp_pixel(src[n + i] * factors.brightness);
    b[i] = clamp_pixel(src[2 * n + i] * factors.brightness);
  }

  if (n > 0) {
    CompensatedSum luma;
    for (std::size_t i = 0; i < n; ++i) luma.add(kLumaR * r[i] + kLumaG * g[i] + kLumaB * b[i]);
    const double mean = luma.value() / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = clamp_pixel(mean + (r[i] - mean) * factors.contrast);
      g[i] = clamp_pixel(mean + (g[i] - mean) * factors.contrast);
      b[i] = clamp_pixel(mean + (b[i] - mean) * factors.contrast);
    }
  }

  Image out(img.width(), img.height());
  auto dst = out.pixels();
  for (std::size_t i = 0; i < n; ++i) {
    const double gray = kLumaR * r[i] + kLumaG * g[i] + kLumaB * b[i];
    dst[i] = to_byte(gray + (r[i] - gray) * factors.saturation);
    dst[n + i] = to_byte(gray + (g[i] - gray) * factors.saturation);
    dst[2 * n + i] = to_byte(gray + (b[i] - gray) * factors.saturation);
  }
  return out;
}

Image rotate90(const Image& img, int quarter_turns) {
  const int k = ((quarter_turns % 4) + 4) % 4;
  if (k == 0) return img;
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  if (k == 2) {
    Image out(img.width(), img.height());
    for (std::size_t c = 0; c < Image::kChannels; ++c) {
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) out.at(c, w - 1 - x, h - 1 - y) = img.at(c, x, y);
      }
    }
    return out;
  }
  Image out(img.height(), img.width());
  for (std::size_t c = 0; c < Image::kChannels; ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        // Counter-clockwise: (x, y) -> (y, w-1-x); clockwise: (x, y) -> (h-1-y, x).
        if (k == 1) {
          out.at(c, y, w - 1 - x) = img.at(c, x, y);
        } else {
          out.at(c, h - 1 - y, x) = img.at(c, x, y);
        }
      }
    }
  }
  return out;
}

Image cutout(const Image& img, std::int64_t center_x, std::int64_t center_y, std::uint32_t side) {
  Image out = img;
  const auto w = static_cast<std::int64_t>(img.width());
  const auto h = static_cast<std::int64_t>(img.height());
  const std::int64_t half = side / 2;
  const std::int64_t x0 = std::clamp<std::int64_t>(center_x - half, 0, w);
  const std::int64_t y0 = std::clamp<std::int64_t>(center_y - half, 0, h);
  const std::int64_t x1 = std::clamp<std::int64_t>(center_x - half + side, 0, w);
  const std::int64_t y1 = std::clamp<std::int64_t>(center_y - half + side, 0, h);
  for (std::size_t c = 0; c < Image::kChannels; ++c) {
    for (std::int64_t y = y0; y < y1; ++y) {
      for (std::int64_t x = x0; x < x1; ++x) out.at(c, x, y) = 0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

MixResult cutmix_with_box(const LabeledImage& a, const LabeledImage& b, const Box& box) {
  check_pair(a, b);
  if (box.x0 > box.x1 || box.y0 > box.y1 || box.x1 > a.image.width() ||
      box.y1 > a.image.height()) {
    throw Error(ErrorKind::InvalidArgument, "CutMix box outside the image");
  }
  MixResult out;
  out.image = a.image;
  for (std::size_t c = 0; c < Image::kChannels; ++c) {
    for (std::size_t y = box.y0; y < box.y1; ++y) {
      for (std::size_t x = box.x0; x < box.x1; ++x) out.image.at(c, x, y) = b.image.at(c, x, y);
    }
  }
  const auto total = static_cast<double>(a.image.plane_size());
  out.lambda = total == 0.0 ? 1.0 : 1.0 - static_cast<double>(box.area()) / total;
  out.labels = mix_labels(a.labels, b.labels, out.lambda);
  out.box = box;
  return out;
}

MixResult cutmix_pair(const LabeledImage& a, const LabeledImage& b, rng::Stream& stream,
                      double alpha) {
  check_pair(a, b);
  const double lambda = stream.beta(alpha, alpha);
  const auto w = static_cast<std::int64_t>(a.image.width());
  const auto h = static_cast<std::int64_t>(a.image.height());
  const double cut_ratio = std::sqrt(1.0 - lambda);
  const auto cut_w = static_cast<std::int64_t>(std::floor(static_cast<double>(w) * cut_ratio));
  const auto cut_h = static_cast<std::int64_t>(std::floor(static_cast<double>(h) * cut_ratio));
  const auto cx = static_cast<std::int64_t>(stream.uniform_int(static_cast<std::uint64_t>(w)));
  const auto cy = static_cast<std::int64_t>(stream.uniform_int(static_cast<std::uint64_t>(h)));
  Box box;
  box.x0 = static_cast<std::uint32_t>(std::clamp<std::int64_t>(cx - cut_w / 2, 0, w));
  box.x1 = static_cast<std::uint32_t>(std::clamp<std::int64_t>(cx + cut_w / 2, 0, w));
  box.y0 = static_cast<std::uint32_t>(std::clamp<std::int64_t>(cy - cut_h / 2, 0, h));
  box.y1 = static_cast<std::uint32_t>(std::clamp<std::int64_t>(cy + cut_h / 2, 0, h));
  return cutmix_with_box(a, b, box);
}

MixResult mixup_with_lambda(const LabeledImage& a, const LabeledImage& b, double lambda) {
  check_pair(a, b);
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "MixUp lambda outside [0, 1]");
  }
  MixResult out;
  out.image = Image(a.image.width(), a.image.height());
  const auto pa = a.image.pixels();
  const auto pb = b.image.pixels();
  auto dst = out.image.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = to_byte(lambda * pa[i] + (1.0 - lambda) * pb[i]);
  }
  out.lambda = lambda;
  out.labels = mix_labels(a.labels, b.labels, lambda);
  return out;
}

MixResult mixup_pair(const LabeledImage& a, const LabeledImage& b, rng::Stream& stream,
                     double alpha) {
  check_pair(a, b);
  return mixup_with_lambda(a, b, stream.beta(alpha, alpha));
}

// ---------------------------------------------------------------------------

TrivialOp sample_trivial_op(rng::Stream& stream) noexcept {
  return static_cast<TrivialOp>(stream.uniform_int(kTrivialOpCount));
}

namespace {

double sample_factor(rng::Stream& stream) {
  return stream.uniform(kDefaultJitterLow, kDefaultJitterHigh);
}

int sample_quarter_turns(const Image& img, rng::Stream& stream) {
  const int k = 1 + static_cast<int>(stream.uniform_int(3));
  // A quarter turn would change the shape of a non-square image.
  if (img.width() != img.height()) return 2;
  return k;
}

Image random_cutout(const Image& img, double max_fraction, rng::Stream& stream) {
  const std::uint32_t shorter = std::min(img.width(), img.height());
  const auto max_side = std::max<std::uint32_t>(
      1, static_cast<std::uint32_t>(std::floor(shorter * max_fraction)));
  const auto side = static_cast<std::uint32_t>(1 + stream.uniform_int(max_side));
  const auto cx = static_cast<std::int64_t>(stream.uniform_int(std::max(1U, img.width())));
  const auto cy = static_cast<std::int64_t>(stream.uniform_int(std::max(1U, img.height())));
  return cutout(img, cx, cy, side);
}

Image random_crop(const Image& img, std::uint32_t pad, rng::Stream& stream) {
  const auto ox = static_cast<std::uint32_t>(stream.uniform_int(2ULL * pad + 1));
  const auto oy = static_cast<std::uint32_t>(stream.uniform_int(2ULL * pad + 1));
  return crop_pad(img, pad, ox, oy);
}

}  // namespace

Image apply_trivial_op(const Image& img, TrivialOp op, rng::Stream& stream) {
  switch (op) {
    case TrivialOp::Identity: return img;
    case TrivialOp::Flip: return horizontal_flip(img);
    case TrivialOp::CropPad: return random_crop(img, kDefaultPad, stream);
    case TrivialOp::Brightness: return color_jitter(img, {sample_factor(stream), 1.0, 1.0});
    case TrivialOp::Contrast: return color_jitter(img, {1.0, sample_factor(stream), 1.0});
    case TrivialOp::Saturation: return color_jitter(img, {1.0, 1.0, sample_factor(stream)});
    case TrivialOp::Rotate: return rotate90(img, sample_quarter_turns(img, stream));
    case TrivialOp::Cutout: return random_cutout(img, 0.5, stream);
  }
  return img;
}

Image trivial_policy(const Image& img, rng::Stream& stream) {
  return apply_trivial_op(img, sample_trivial_op(stream), stream);
}

// ---------------------------------------------------------------------------

namespace {

void check_range(const Range& r, const char* what, const std::string& spec) {
  if (!(r.low >= kMinJitterFactor && r.low <= r.high && r.high <= kMaxJitterFactor)) {
    throw Error(ErrorKind::InvalidSpec, "spec '" + spec + "': " + what + " range [" +
                                            std::to_string(r.low) + ", " +
                                            std::to_string(r.high) + "] invalid");
  }
}

struct OpValidator {
  const std::string& spec;

  void operator()(const RandomFlip& op) const {
    if (!(op.probability >= 0.0 && op.probability <= 1.0)) {
      throw Error(ErrorKind::InvalidSpec, "spec '" + spec + "': flip probability outside [0, 1]");
    }
  }
  void operator()(const RandomCrop& op) const {
    if (op.pad > kMaxPad) {
      throw Error(ErrorKind::InvalidSpec, "spec '" + spec + "': crop pad above " +
                                              std::to_string(kMaxPad));
    }
  }
  void operator()(const RandomJitter& op) const {
    check_range(op.brightness, "brightness", spec);
    check_range(op.contrast, "contrast", spec);
    check_range(op.saturation, "saturation", spec);
  }
  void operator()(const RandomRotate&) const {}
  void operator()(const RandomCutout& op) const {
    if (!(op.max_fraction > 0.0 && op.max_fraction <= 0.5)) {
      throw Error(ErrorKind::InvalidSpec,
                  "spec '" + spec + "': cutout max_fraction outside (0, 0.5]");
    }
  }
};

struct OpRunner {
  rng::Stream& stream;

  Image operator()(const RandomFlip& op, const Image& img) const {
    return stream.bernoulli(op.probability) ? horizontal_flip(img) : img;
  }
  Image operator()(const RandomCrop& op, const Image& img) const {
    return random_crop(img, op.pad, stream);
  }
  Image operator()(const RandomJitter& op, const Image& img) const {
    JitterFactors f;
    f.brightness = stream.uniform(op.brightness.low, op.brightness.high);
    f.contrast = stream.uniform(op.contrast.low, op.contrast.high);
    f.saturation = stream.uniform(op.saturation.low, op.saturation.high);
    return color_jitter(img, f);
  }
  Image operator()(const RandomRotate&, const Image& img) const {
    return rotate90(img, sample_quarter_turns(img, stream));
  }
  Image operator()(const RandomCutout& op, const Image& img) const {
    return random_cutout(img, op.max_fraction, stream);
  }
};

}  // namespace

void validate(const AugmentationSpec& spec) {
  if (spec.name.empty()) throw Error(ErrorKind::InvalidSpec, "augmentation spec without a name");
  for (const auto& op : spec.ops) std::visit(OpValidator{spec.name}, op);
  if (spec.batch && !(spec.batch->alpha > 0.0 && std::isfinite(spec.batch->alpha))) {
    throw Error(ErrorKind::InvalidSpec, "spec '" + spec.name + "': batch alpha must be positive");
  }
}

Image run_per_image(const AugmentationSpec& spec, const Image& img, rng::Stream& stream) {
  Image out = img;
  const OpRunner runner{stream};
  for (const auto& op : spec.ops) {
    out = std::visit([&](const auto& o) { return runner(o, out); }, op);
  }
  if (spec.policy == Policy::Trivial) out = trivial_policy(out, stream);
  return out;
}

// ---------------------------------------------------------------------------

AugmentedStream::AugmentedStream(AugmentationSpec spec, const ImageDataset& dataset,
                                 std::uint64_t seed, std::uint32_t replicas)
    : spec_(std::move(spec)), dataset_(&dataset), seed_(seed), replicas_(replicas) {
  validate(spec_);
  if (dataset.empty()) throw Error(ErrorKind::InvalidArgument, "empty dataset");
  if (replicas == 0) throw Error(ErrorKind::InvalidArgument, "replicas must be at least 1");
}

AugmentedSample AugmentedStream::generate(std::uint64_t sample_id, std::uint32_t replica) const {
  auto stream = rng::seed_for(seed_, sample_id, replica, rng::Domain::Augment);
  const std::size_t num_classes = dataset_->num_classes();

  AugmentedSample out;
  out.record_id = record_id_for(sample_id, replica, replicas_);
  out.replica_index = replica;
  out.source_ids.push_back(sample_id);

  LabeledImage self{run_per_image(spec_, dataset_->image(sample_id), stream),
                    one_hot(dataset_->label(sample_id), num_classes)};
  if (!spec_.batch) {
    out.image = std::move(self.image);
    out.labels = std::move(self.labels);
    return out;
  }

  const std::uint64_t partner_id = stream.uniform_int(dataset_->size());
  const LabeledImage partner{run_per_image(spec_, dataset_->image(partner_id), stream),
                             one_hot(dataset_->label(partner_id), num_classes)};
  out.source_ids.push_back(partner_id);
  MixResult mixed = spec_.batch->kind == BatchKind::CutMix
                        ? cutmix_pair(self, partner, stream, spec_.batch->alpha)
                        : mixup_pair(self, partner, stream, spec_.batch->alpha);
  out.image = std::move(mixed.image);
  out.labels = std::move(mixed.labels);
  return out;
}

std::optional<AugmentedSample> AugmentedStream::next() {
  if (position_ >= size()) return std::nullopt;
  const std::uint64_t sample = position_ / replicas_;
  const auto replica = static_cast<std::uint32_t>(position_ % replicas_);
  ++position_;
  return generate(sample, replica);
}

std::vector<AugmentedSample> apply(const AugmentationSpec& spec, const ImageDataset& dataset,
                                   std::uint64_t seed, std::uint32_t replicas) {
  AugmentedStream stream(spec, dataset, seed, replicas);
  std::vector<AugmentedSample> out;
  out.reserve(stream.size());
  while (auto s = stream.next()) out.push_back(std::move(*s));
  return out;
}

}  // namespace augrank::aug
