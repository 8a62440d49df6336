// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#include <doctest.h>

#include <cmath>
#include <random>

#include "augrank/augment.hpp"
#include "augrank/error.hpp"
#include "augrank/synthetic.hpp"

using namespace augrank;
using namespace augrank::aug;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

Image random_image(std::mt19937_64& g, std::uint32_t w, std::uint32_t h) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3);
  for (auto& p : px) p = static_cast<std::uint8_t>(g());
  return Image(w, h, std::move(px));
}

Image filled(std::uint32_t w, std::uint32_t h, std::uint8_t v) {
  return Image(w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * 3, v));
}

ImageDataset small_dataset(std::size_t per_class = 10) {
  synth::DatasetOptions o;
  o.per_class = per_class;
  o.noise_std = 30;
  o.width = 8;
  o.height = 8;
  o.seed = 3;
  return synth::make_synthetic_dataset(o);
}

}  // namespace

TEST_CASE("horizontal flip") {
  const Image one(1, 1, {1, 2, 3});
  CHECK(horizontal_flip(one) == one);
  const Image ab(2, 1, {10, 20, 30, 40, 50, 60});
  CHECK(horizontal_flip(ab) == Image(2, 1, {20, 10, 40, 30, 60, 50}));
  std::mt19937_64 g(1);
  const auto img = random_image(g, 7, 5);
  CHECK(horizontal_flip(horizontal_flip(img)) == img);
}

TEST_CASE("crop with padding") {
  std::mt19937_64 g(2);
  const auto img = random_image(g, 32, 32);
  CHECK(crop_pad(img, 4, 4, 4) == img);
  CHECK(crop_pad(img, 0, 0, 0) == img);
  const auto shifted = crop_pad(img, 4, 0, 0);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < 32; ++y) {
      for (std::size_t x = 0; x < 32; ++x) {
        const std::uint8_t want = (x < 4 || y < 4) ? 0 : img.at(c, x - 4, y - 4);
        REQUIRE(shifted.at(c, x, y) == want);
      }
    }
  }
  CHECK(kind_of([&] { (void)crop_pad(img, 4, 9, 0); }) == ErrorKind::OffsetOutOfRange);
}

TEST_CASE("colour jitter") {
  std::mt19937_64 g(3);
  const auto img = random_image(g, 9, 6);
  CHECK(color_jitter(img, {1, 1, 1}) == img);
  CHECK(color_jitter(filled(2, 2, 200), {1.5, 1, 1}) == filled(2, 2, 255));

  const auto gray = color_jitter(img, {1, 1, 0});
  for (std::size_t y = 0; y < 6; ++y) {
    for (std::size_t x = 0; x < 9; ++x) {
      const double luma =
          0.299 * img.at(0, x, y) + 0.587 * img.at(1, x, y) + 0.114 * img.at(2, x, y);
      for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(gray.at(c, x, y) - luma) <= 0.5 + 1e-9);
      CHECK(gray.at(0, x, y) == gray.at(1, x, y));
      CHECK(gray.at(1, x, y) == gray.at(2, x, y));
    }
  }
  CHECK(kind_of([&] { (void)color_jitter(img, {2.5, 1, 1}); }) == ErrorKind::FactorOutOfRange);
  CHECK(kind_of([&] { (void)color_jitter(img, {1, -0.1, 1}); }) == ErrorKind::FactorOutOfRange);
}

TEST_CASE("rotation") {
  std::mt19937_64 g(4);
  const auto img = random_image(g, 5, 3);
  const auto r = rotate90(img, 1);
  CHECK(r.width() == 3);
  CHECK(r.height() == 5);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < 5; ++y) {
      for (std::size_t x = 0; x < 3; ++x) CHECK(r.at(c, x, y) == img.at(c, 4 - y, x));
    }
  }
  CHECK(rotate90(img, 4) == img);
  CHECK(rotate90(rotate90(img, 3), 1) == img);
}

TEST_CASE("cutout") {
  const auto img = filled(8, 8, 9);
  const auto out = cutout(img, 4, 4, 4);
  std::size_t zeros = 0;
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 8; ++x) {
      const bool inside = x >= 2 && x < 6 && y >= 2 && y < 6;
      CHECK((out.at(0, x, y) == 0) == inside);
      zeros += out.at(1, x, y) == 0;
    }
  }
  CHECK(zeros == 16);
  CHECK(cutout(img, 0, 0, 4) != img);
  CHECK(cutout(img, 100, 100, 4) == img);
}

TEST_CASE("cutmix with a fixed box") {
  const LabeledImage a{filled(32, 32, 10), one_hot(0, 3)};
  const LabeledImage b{filled(32, 32, 200), one_hot(2, 3)};
  const auto m = cutmix_with_box(a, b, {8, 8, 24, 24});
  CHECK(m.lambda == 0.75);
  CHECK(m.labels[0] == 0.75);
  CHECK(m.labels[2] == 0.25);
  CHECK(m.image.at(0, 8, 8) == 200);
  CHECK(m.image.at(0, 7, 8) == 10);

  const auto none = cutmix_with_box(a, b, {5, 5, 5, 5});
  CHECK(none.lambda == 1.0);
  CHECK(none.image == a.image);
  CHECK(none.labels == a.labels);

  const auto self = cutmix_with_box(a, a, {0, 0, 16, 16});
  CHECK(self.image == a.image);
  CHECK(self.labels == a.labels);

  const LabeledImage small{filled(8, 8, 1), one_hot(1, 3)};
  CHECK(kind_of([&] { (void)cutmix_with_box(a, small, {0, 0, 1, 1}); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("random cutmix obeys the area law") {
  std::mt19937_64 g(5);
  const LabeledImage a{random_image(g, 32, 32), LabelWeights({0.6, 0.4, 0})};
  const LabeledImage b{random_image(g, 32, 32), one_hot(2, 3)};
  auto s = rng::seed_for(1, 0, 0, rng::Domain::Test);
  for (int i = 0; i < 2000; ++i) {
    const auto m = cutmix_pair(a, b, s);
    std::size_t from_b = 0;
    for (std::size_t y = 0; y < 32; ++y) {
      for (std::size_t x = 0; x < 32; ++x) {
        const bool in = x >= m.box.x0 && x < m.box.x1 && y >= m.box.y0 && y < m.box.y1;
        for (std::size_t c = 0; c < 3; ++c) {
          REQUIRE(m.image.at(c, x, y) == (in ? b.image : a.image).at(c, x, y));
        }
        from_b += in;
      }
    }
    const double lam = 1.0 - static_cast<double>(from_b) / 1024.0;
    REQUIRE(m.lambda == lam);
    for (std::size_t c = 0; c < 3; ++c) {
      REQUIRE(std::abs(m.labels[c] - (lam * a.labels[c] + (1 - lam) * b.labels[c])) <= 1e-12);
    }
  }
}

TEST_CASE("mixup") {
  const LabeledImage a{filled(4, 4, 100), one_hot(0, 2)};
  const LabeledImage b{filled(4, 4, 200), one_hot(1, 2)};
  const auto one = mixup_with_lambda(a, b, 1.0);
  CHECK(one.image == a.image);
  CHECK(one.labels == a.labels);
  CHECK(mixup_with_lambda(a, b, 0.5).image == filled(4, 4, 150));
  const auto m = mixup_with_lambda(a, b, 0.7);
  CHECK(m.labels[0] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(m.labels[1] == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("trivial policy dispatch") {
  std::mt19937_64 g(6);
  const auto img = random_image(g, 8, 8);
  auto s = rng::seed_for(0, 0, 0, rng::Domain::Test);
  CHECK(apply_trivial_op(img, TrivialOp::Identity, s) == img);
  CHECK(apply_trivial_op(img, TrivialOp::Flip, s) == horizontal_flip(img));
  auto s1 = rng::seed_for(5, 1, 0), s2 = rng::seed_for(5, 1, 0);
  CHECK(trivial_policy(img, s1) == trivial_policy(img, s2));
  int seen[kTrivialOpCount] = {};
  auto s3 = rng::seed_for(5, 2, 0, rng::Domain::Test);
  for (int i = 0; i < 8000; ++i) ++seen[static_cast<int>(sample_trivial_op(s3))];
  for (int c : seen) CHECK(c > 800);
  const auto wide = random_image(g, 8, 4);
  for (int i = 0; i < 50; ++i) CHECK(apply_trivial_op(wide, TrivialOp::Rotate, s3).same_shape(wide));
}

TEST_CASE("spec validation") {
  AugmentationSpec bad{"bad", {RandomFlip{1.5}}, {}, {}};
  CHECK(kind_of([&] { validate(bad); }) == ErrorKind::InvalidSpec);
  bad.ops = {RandomJitter{{0.5, 2.5}, {1, 1}, {1, 1}}};
  CHECK(kind_of([&] { validate(bad); }) == ErrorKind::InvalidSpec);
  bad.ops = {RandomCutout{0.9}};
  CHECK(kind_of([&] { validate(bad); }) == ErrorKind::InvalidSpec);
  bad.ops = {};
  bad.batch = BatchOp{BatchKind::MixUp, 0.0};
  CHECK(kind_of([&] { validate(bad); }) == ErrorKind::InvalidSpec);
  bad.batch.reset();
  bad.name = "";
  CHECK(kind_of([&] { validate(bad); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("identity spec streams the originals") {
  const auto ds = small_dataset();
  const auto out = apply({"identity", {}, {}, {}}, ds, 1, 1);
  REQUIRE(out.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(out[i].record_id == i);
    CHECK(out[i].image == ds.image(i));
    CHECK(out[i].labels == one_hot(ds.label(i), ds.num_classes()));
  }
}

TEST_CASE("streams are deterministic and addressable") {
  const auto ds = small_dataset();
  const AugmentationSpec spec{"mix", {RandomCrop{2}, RandomFlip{0.5}}, Policy::Trivial,
                              BatchOp{BatchKind::CutMix, 1.0}};
  const auto a = apply(spec, ds, 42, 2), b = apply(spec, ds, 42, 2);
  CHECK(a == b);
  CHECK(a.size() == 2 * ds.size());
  CHECK(apply(spec, ds, 43, 2) != a);
  AugmentedStream s(spec, ds, 42, 2);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].replica_index == k % 2);
    CHECK(a[k].record_id == record_id_for(k / 2, k % 2, 2));
    CHECK(s.generate(k / 2, static_cast<std::uint32_t>(k % 2)) == a[k]);
  }
}
