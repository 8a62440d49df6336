// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#include <doctest.h>

#include <filesystem>
#include <random>

#include <unistd.h>

#include "augrank/error.hpp"
#include "augrank/io.hpp"
#include "augrank/pipeline.hpp"
#include "oracle.hpp"

using namespace augrank;
using namespace augrank::pipeline;
namespace fs = std::filesystem;

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

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("augrank-pipe-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("default family") {
  const auto fam = default_da_family();
  std::vector<std::string> names;
  for (const auto& s : fam) {
    names.push_back(s.name);
    CHECK_NOTHROW(aug::validate(s));
  }
  CHECK(names == std::vector<std::string>{"identity", "flip", "crop_pad", "jitter-weak",
                                          "jitter-strong", "cutmix", "mixup", "trivial"});
}

TEST_CASE("spec json round trip") {
  for (const auto& s : default_da_family()) {
    const auto j = nlohmann::json::parse(spec_to_json(s).dump());
    CHECK(spec_from_json(j) == s);
  }
  const auto j = nlohmann::json::parse(R"({"name":"all","ops":[{"op":"crop","pad":2},
      {"op":"jitter","brightness":0.9},{"op":"rotate"},{"op":"cutout","max_fraction":0.25}],
      "policy":"trivial","batch":{"op":"mixup","alpha":0.4}})");
  const auto s = spec_from_json(j);
  CHECK(s.ops.size() == 4);
  CHECK(std::get<aug::RandomJitter>(s.ops[1]).brightness == aug::Range{0.9, 0.9});
  CHECK(s.batch->alpha == 0.4);
}

TEST_CASE("config errors") {
  using nlohmann::json;
  CHECK(kind_of([] { (void)spec_from_json(json::parse(R"({"name":"x","ops":[{"op":"warp"}]})")); }) ==
        ErrorKind::ConfigError);
  CHECK(kind_of([] { (void)spec_from_json(json::parse(R"({"ops":[]})")); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { (void)parse_config(json::parse(R"({"seed":"abc"})")); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { (void)parse_config(json::parse(R"({"dataset":{"format":"png"}})")); }) ==
        ErrorKind::ConfigError);

  auto cfg = parse_config(json::object());
  cfg.augmentations.push_back(cfg.augmentations.front());
  CHECK(kind_of([&] { validate(cfg); }) == ErrorKind::ConfigError);

  auto sub = parse_config(json::object());
  sub.subsample = 0.0;
  CHECK(kind_of([&] { validate(sub); }) == ErrorKind::ConfigError);

  auto cifar = parse_config(json::parse(R"({"dataset":{"format":"cifar-binary","paths":["no.bin"]}})"),
                            scratch());
  CHECK(kind_of([&] { validate(cifar); }) == ErrorKind::MissingInput);

  CHECK(kind_of([] { (void)load_config(scratch() / "absent.json"); }) == ErrorKind::MissingInput);
}

TEST_CASE("config json survives a round trip") {
  auto cfg = parse_config(nlohmann::json::parse(R"({"seed":5,"replicas":2,"subsample":0.5,
      "strict_empty_class":false,"dataset":{"per_class":20,"noise_std":10}})"));
  const auto again = parse_config(nlohmann::json::parse(to_json(cfg).dump()));
  CHECK(to_json(again) == to_json(cfg));
  CHECK(again.empty_class_policy == EmptyClassPolicy::Tolerant);
  CHECK(again.dataset.synthetic.seed == 5);
}

TEST_CASE("scoring from dumps equals the in-memory metric") {
  std::mt19937_64 g(3);
  const auto a = oracle::to_set(oracle::random_one_hot(g, 3, 200), 3);
  const auto b = oracle::to_set(oracle::random_mixed(g, 3, 200), 3);
  io::write_prediction_dump(scratch() / "a.txt", a);
  io::write_prediction_dump(scratch() / "b.txt", b);
  const auto cfg = parse_config(nlohmann::json::parse(R"({"seed":1,
      "teacher":{"kind":"dumps","dumps":{"identity":"a.txt","mixup":"b.txt"}},
      "augmentations":[{"name":"identity"},{"name":"mixup","batch":{"op":"mixup"}}]})"),
                                scratch());
  validate(cfg);
  auto ra = score_spec(cfg, nullptr, "identity");
  const auto want = metric_m(a);
  CHECK(ra.m == want.m);
  CHECK(ra.da_name == "identity");
  const auto ranking = rank_all(cfg);
  CHECK(ranking.entries.size() == 2);

  auto missing = cfg;
  missing.teacher.dumps.erase("mixup");
  CHECK(kind_of([&] { (void)score_spec(missing, nullptr, "mixup"); }) == ErrorKind::MissingInput);
}

TEST_CASE("synthetic scoring is reproducible") {
  auto cfg = parse_config(nlohmann::json::parse(R"({"seed":3,"replicas":2,"dataset":{"per_class":20,"width":8,"height":8}})"));
  validate(cfg);
  const auto ds = load_dataset(cfg);
  const auto r1 = score_spec(cfg, &ds, "trivial");
  const auto r2 = score_spec(cfg, &ds, "trivial");
  CHECK(r1 == r2);
  CHECK(r1.n == 160);
  CHECK(r1.replicas == 2);
  CHECK(r1.variance_mode == VarianceMode::PerImage);
  cfg.subsample = 0.5;
  const auto half = score_spec(cfg, &ds, "trivial");
  CHECK(half.n < 160);
  CHECK(half == score_spec(cfg, &ds, "trivial"));
}

TEST_CASE("synth demo output") {
  SynthDemoOptions o;
  o.per_class = 30;
  o.noise_levels = {0, 40};
  const auto a = run_synth_demo(o), b = run_synth_demo(o);
  CHECK(a.scatter_csv == b.scatter_csv);
  CHECK(a.rankings.size() == 2);
  CHECK(a.scatter_csv.rfind("noise_std,spec,rank,cmi,dev,m,variance_baseline\n", 0) == 0);
  const auto table = format_ranking_table(a.rankings[0].second);
  CHECK(table.find("selected: ") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorKind::ConfigError) == 2);
  CHECK(exit_code_for(ErrorKind::MissingInput) == 3);
  CHECK(exit_code_for(ErrorKind::BadLine) == 4);
  CHECK(exit_code_for(ErrorKind::BadMagic) == 4);
  CHECK(exit_code_for(ErrorKind::IoFailure) == 1);
}
