// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

// augrank: score and rank data augmentations for distillation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "augrank/error.hpp"
#include "augrank/io.hpp"
#include "augrank/pipeline.hpp"

namespace fs = std::filesystem;
using namespace augrank;

namespace {

// Scalar flags that override the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> subsample;
  std::optional<std::uint32_t> replicas;
  std::optional<bool> strict_empty_class;
  std::optional<unsigned> workers;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Global seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--subsample", o.subsample, "Fraction of records scored, in (0, 1]");
  cmd->add_option("--replicas", o.replicas, "Augmented replicas per image");
  cmd->add_flag("--strict-empty-class{true}", o.strict_empty_class,
                "Fail on classes with no records (default); =false skips them");
  cmd->add_option("--workers", o.workers, "Worker threads, 0 for all cores");
}

pipeline::RunConfig resolve_config(const std::string& path, const Overrides& o) {
  pipeline::RunConfig cfg = path.empty() ? pipeline::parse_config(nlohmann::json::object())
                                         : pipeline::load_config(path);
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.dataset.synthetic.seed = *o.seed;
  }
  if (o.out) cfg.output_dir = *o.out;
  if (o.subsample) cfg.subsample = *o.subsample;
  if (o.replicas) cfg.replicas = *o.replicas;
  if (o.strict_empty_class) {
    cfg.empty_class_policy =
        *o.strict_empty_class ? EmptyClassPolicy::Strict : EmptyClassPolicy::Tolerant;
  }
  if (o.workers) cfg.workers = *o.workers;
  pipeline::validate(cfg);
  return cfg;
}

nlohmann::ordered_json provenance(const pipeline::RunConfig& cfg) {
  nlohmann::ordered_json extra;
  extra["config"] = pipeline::to_json(cfg);
  extra["timestamp"] = pipeline::utc_timestamp();
  return extra;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

int cmd_augment(const pipeline::RunConfig& cfg, const std::string& spec_name) {
  const auto& spec = cfg.spec(spec_name);
  const auto dataset = pipeline::load_dataset(cfg);
  ensure_dir(cfg.output_dir);
  const fs::path out = cfg.output_dir / (spec_name + ".augr");
  aug::AugmentedStream stream(spec, dataset, cfg.seed, cfg.replicas);
  io::write_augmented_dataset(out, dataset.num_classes(), stream);
  const auto& first = dataset.image(0);
  std::cout << "records " << stream.size() << "\n"
            << "image " << first.width() << "x" << first.height() << "x3\n"
            << "classes " << dataset.num_classes() << "\n"
            << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_score(const pipeline::RunConfig& cfg, const std::string& spec_name) {
  std::optional<ImageDataset> dataset;
  if (cfg.teacher.kind == pipeline::TeacherConfig::Kind::Synthetic) {
    (void)cfg.spec(spec_name);
    dataset = pipeline::load_dataset(cfg);
  }
  const auto report = pipeline::score_spec(cfg, dataset ? &*dataset : nullptr, spec_name);
  ensure_dir(cfg.output_dir);
  const fs::path out = cfg.output_dir / ("score-" + spec_name + ".json");
  io::write_report(out, report, provenance(cfg));
  std::cout << "spec " << report.da_name << "\n"
            << "n " << report.n << "\n"
            << "cmi " << io::format_double(report.cmi) << "\n"
            << "dev " << io::format_double(report.dev) << "\n"
            << "m " << io::format_double(report.m) << "\n"
            << "variance " << io::format_double(report.variance_baseline) << "\n"
            << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_rank(const pipeline::RunConfig& cfg) {
  const auto ranking = pipeline::rank_all(cfg);
  ensure_dir(cfg.output_dir);
  const fs::path out = cfg.output_dir / "ranking.json";
  io::write_report(out, ranking, provenance(cfg));
  std::cout << pipeline::format_ranking_table(ranking) << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_spearman(const fs::path& report_path, const fs::path& acc_path,
                 const std::optional<std::string>& out) {
  const auto raw = io::read_json(report_path);
  auto ranking = io::ranking_report_from_json(raw);
  const auto accuracies = io::read_accuracies(acc_path);
  attach_accuracies(ranking, accuracies, acc_path.filename().string());

  // Keep the provenance of the original run.
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
  for (const char* key : {"config", "timestamp"}) {
    if (raw.contains(key)) extra[key] = raw.at(key);
  }
  const fs::path dest = out ? fs::path(*out) : report_path;
  io::write_report(dest, ranking, extra);
  std::cout << pipeline::format_ranking_table(ranking) << "wrote " << dest.string() << "\n";
  return 0;
}

std::string noise_tag(double noise) {
  std::string s = io::format_double(noise);
  for (auto& ch : s) {
    if (ch == '.') ch = 'p';
  }
  return s;
}

int cmd_synth_demo(const pipeline::SynthDemoOptions& opts, const fs::path& out_dir) {
  const auto result = pipeline::run_synth_demo(opts);
  ensure_dir(out_dir);
  nlohmann::ordered_json extra;
  extra["demo"] = {{"num_classes", opts.num_classes},
                   {"per_class", opts.per_class},
                   {"noise_levels", opts.noise_levels},
                   {"sharpness", opts.sharpness},
                   {"seed", opts.seed},
                   {"replicas", opts.replicas},
                   {"subsample", opts.subsample}};
  extra["timestamp"] = pipeline::utc_timestamp();
  for (const auto& [noise, ranking] : result.rankings) {
    const fs::path out = out_dir / ("ranking-noise-" + noise_tag(noise) + ".json");
    io::write_report(out, ranking, extra);
    std::cout << "noise_std " << io::format_double(noise) << "\n"
              << pipeline::format_ranking_table(ranking) << "\n";
  }
  const fs::path csv = out_dir / "scatter.csv";
  std::ofstream f(csv, std::ios::binary);
  f << result.scatter_csv;
  if (!f) throw Error(ErrorKind::IoFailure, "cannot write " + csv.string());
  std::cout << result.scatter_csv << "wrote " << out_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank data augmentations by the distillation metric M = DEV - CMI"};
  app.set_version_flag("--version", std::string(io::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string spec_name;
  Overrides overrides;

  auto* augment = app.add_subcommand("augment", "Write the augmented dataset for one spec");
  augment->add_option("--config", config_path, "Run config (JSON)");
  augment->add_option("--spec", spec_name, "Augmentation spec name")->required();
  add_override_flags(augment, overrides);

  auto* score = app.add_subcommand("score", "Score one spec");
  score->add_option("--config", config_path, "Run config (JSON)");
  score->add_option("--spec", spec_name, "Augmentation spec name")->required();
  add_override_flags(score, overrides);

  auto* rank = app.add_subcommand("rank", "Score and rank every spec");
  rank->add_option("--config", config_path, "Run config (JSON)");
  add_override_flags(rank, overrides);

  std::string report_path;
  std::string acc_path;
  std::optional<std::string> spearman_out;
  auto* spear = app.add_subcommand("spearman", "Correlate a ranking with student accuracies");
  spear->add_option("report", report_path, "Ranking report (JSON)")->required();
  spear->add_option("accuracies", acc_path, "CSV of da_name,accuracy")->required();
  spear->add_option("--out", spearman_out, "Write here instead of rewriting the report");

  pipeline::SynthDemoOptions demo;
  std::string demo_out = "augrank-demo";
  auto* synth = app.add_subcommand("synth-demo", "Rank the built-in family on synthetic data");
  synth->add_option("--classes", demo.num_classes, "Number of classes")
      ->check(CLI::Range(2, 1000));
  synth->add_option("--per-class", demo.per_class, "Images per class")->check(CLI::PositiveNumber);
  synth->add_option("--noise", demo.noise_levels, "Pixel noise std devs, 0-255 units");
  synth->add_option("--sharpness", demo.sharpness, "Teacher sharpness");
  synth->add_option("--seed", demo.seed, "Global seed");
  synth->add_option("--replicas", demo.replicas, "Augmented replicas per image");
  synth->add_option("--subsample", demo.subsample, "Fraction of records scored");
  synth->add_option("--workers", demo.workers, "Worker threads, 0 for all cores");
  synth->add_option("--out", demo_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*augment) return cmd_augment(resolve_config(config_path, overrides), spec_name);
    if (*score) return cmd_score(resolve_config(config_path, overrides), spec_name);
    if (*rank) return cmd_rank(resolve_config(config_path, overrides));
    if (*spear) return cmd_spearman(report_path, acc_path, spearman_out);
    if (*synth) return cmd_synth_demo(demo, demo_out);
  } catch (const Error& e) {
    std::cerr << "augrank: " << e.what() << "\n";
    return pipeline::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "augrank: internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
