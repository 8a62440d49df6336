// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#include "augrank/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>
#include <sstream>

#include "augrank/io.hpp"

namespace augrank::pipeline {

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::ConfigError, what);
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("key '") + key + "': " + e.what());
  }
}

aug::Range range_from_json(const nlohmann::json& j, const char* key, aug::Range fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_number()) {
    const double x = v.get<double>();
    return {x, x};
  }
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    config_error(std::string("'") + key + "' must be a number or [low, high]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

nlohmann::ordered_json range_to_json(const aug::Range& r) {
  return nlohmann::ordered_json::array({r.low, r.high});
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

aug::AugmentationSpec spec_named(std::string name) {
  aug::AugmentationSpec s;
  s.name = std::move(name);
  return s;
}

}  // namespace

const aug::AugmentationSpec& RunConfig::spec(const std::string& name) const {
  for (const auto& s : augmentations) {
    if (s.name == name) return s;
  }
  throw Error(ErrorKind::ConfigError, "no augmentation named '" + name + "'");
}

std::vector<aug::AugmentationSpec> default_da_family() {
  std::vector<aug::AugmentationSpec> out;
  out.push_back(spec_named("identity"));

  auto flip = spec_named("flip");
  flip.ops.emplace_back(aug::RandomFlip{0.5});
  out.push_back(flip);

  auto crop = spec_named("crop_pad");
  crop.ops.emplace_back(aug::RandomCrop{aug::kDefaultPad});
  out.push_back(crop);

  auto weak = spec_named("jitter-weak");
  weak.ops.emplace_back(aug::RandomJitter{{0.8, 1.2}, {0.8, 1.2}, {0.8, 1.2}});
  out.push_back(weak);

  // Near-zero saturation collapses every class colour to its luma.
  auto strong = spec_named("jitter-strong");
  strong.ops.emplace_back(aug::RandomJitter{{0.5, 1.5}, {0.5, 1.5}, {0.0, 0.1}});
  out.push_back(strong);

  auto cutmix = spec_named("cutmix");
  cutmix.batch = aug::BatchOp{aug::BatchKind::CutMix, 1.0};
  out.push_back(cutmix);

  auto mixup = spec_named("mixup");
  mixup.batch = aug::BatchOp{aug::BatchKind::MixUp, 1.0};
  out.push_back(mixup);

  auto trivial = spec_named("trivial");
  trivial.policy = aug::Policy::Trivial;
  out.push_back(trivial);
  return out;
}

aug::AugmentationSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) config_error("augmentation spec must be an object");
  aug::AugmentationSpec spec;
  spec.name = get_or<std::string>(j, "name", "");
  if (spec.name.empty()) config_error("augmentation spec without a name");
  const std::string where = "spec '" + spec.name + "': ";

  if (j.contains("ops")) {
    if (!j.at("ops").is_array()) config_error(where + "'ops' must be an array");
    for (const auto& op : j.at("ops")) {
      const auto kind = get_or<std::string>(op, "op", "");
      if (kind == "flip") {
        spec.ops.emplace_back(aug::RandomFlip{get_or<double>(op, "p", 0.5)});
      } else if (kind == "crop") {
        spec.ops.emplace_back(aug::RandomCrop{get_or<std::uint32_t>(op, "pad", aug::kDefaultPad)});
      } else if (kind == "jitter") {
        const aug::Range def{aug::kDefaultJitterLow, aug::kDefaultJitterHigh};
        spec.ops.emplace_back(aug::RandomJitter{range_from_json(op, "brightness", def),
                                                range_from_json(op, "contrast", def),
                                                range_from_json(op, "saturation", def)});
      } else if (kind == "rotate") {
        spec.ops.emplace_back(aug::RandomRotate{});
      } else if (kind == "cutout") {
        spec.ops.emplace_back(aug::RandomCutout{get_or<double>(op, "max_fraction", 0.5)});
      } else {
        config_error(where + "unknown op '" + kind + "'");
      }
    }
  }
  if (j.contains("policy")) {
    const auto policy = get_or<std::string>(j, "policy", "");
    if (policy != "trivial") config_error(where + "unknown policy '" + policy + "'");
    spec.policy = aug::Policy::Trivial;
  }
  if (j.contains("batch")) {
    const auto& b = j.at("batch");
    const auto kind = get_or<std::string>(b, "op", "");
    aug::BatchOp op;
    if (kind == "cutmix") {
      op.kind = aug::BatchKind::CutMix;
    } else if (kind == "mixup") {
      op.kind = aug::BatchKind::MixUp;
    } else {
      config_error(where + "unknown batch op '" + kind + "'");
    }
    op.alpha = get_or<double>(b, "alpha", 1.0);
    spec.batch = op;
  }
  try {
    aug::validate(spec);
  } catch (const Error& e) {
    config_error(e.what());
  }
  return spec;
}

nlohmann::ordered_json spec_to_json(const aug::AugmentationSpec& spec) {
  nlohmann::ordered_json j;
  j["name"] = spec.name;
  auto ops = nlohmann::ordered_json::array();
  for (const auto& op : spec.ops) {
    nlohmann::ordered_json o;
    if (const auto* f = std::get_if<aug::RandomFlip>(&op)) {
      o["op"] = "flip";
      o["p"] = f->probability;
    } else if (const auto* c = std::get_if<aug::RandomCrop>(&op)) {
      o["op"] = "crop";
      o["pad"] = c->pad;
    } else if (const auto* jt = std::get_if<aug::RandomJitter>(&op)) {
      o["op"] = "jitter";
      o["brightness"] = range_to_json(jt->brightness);
      o["contrast"] = range_to_json(jt->contrast);
      o["saturation"] = range_to_json(jt->saturation);
    } else if (std::holds_alternative<aug::RandomRotate>(op)) {
      o["op"] = "rotate";
    } else if (const auto* cu = std::get_if<aug::RandomCutout>(&op)) {
      o["op"] = "cutout";
      o["max_fraction"] = cu->max_fraction;
    }
    ops.push_back(std::move(o));
  }
  j["ops"] = std::move(ops);
  if (spec.policy) j["policy"] = "trivial";
  if (spec.batch) {
    j["batch"] = {{"op", spec.batch->kind == aug::BatchKind::CutMix ? "cutmix" : "mixup"},
                  {"alpha", spec.batch->alpha}};
  }
  return j;
}

RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) config_error("config must be a JSON object");
  RunConfig cfg;
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
  cfg.replicas = get_or<std::uint32_t>(j, "replicas", 1);
  cfg.subsample = get_or<double>(j, "subsample", 1.0);
  cfg.empty_class_policy = get_or<bool>(j, "strict_empty_class", true)
                               ? EmptyClassPolicy::Strict
                               : EmptyClassPolicy::Tolerant;
  cfg.workers = get_or<unsigned>(j, "workers", 0);
  cfg.output_dir = resolve(base_dir, get_or<std::string>(j, "output_dir", "augrank-out"));

  const auto ds = j.contains("dataset") ? j.at("dataset") : nlohmann::json::object();
  const auto format = get_or<std::string>(ds, "format", "synthetic");
  if (format == "cifar-binary") {
    cfg.dataset.format = DatasetConfig::Format::CifarBinary;
    cfg.dataset.num_classes = get_or<std::size_t>(ds, "num_classes", 10);
    for (const auto& p : get_or<std::vector<std::string>>(ds, "paths", {})) {
      cfg.dataset.paths.push_back(resolve(base_dir, p));
    }
  } else if (format == "synthetic") {
    cfg.dataset.format = DatasetConfig::Format::Synthetic;
    auto& s = cfg.dataset.synthetic;
    s.num_classes = get_or<std::size_t>(ds, "num_classes", 4);
    s.per_class = get_or<std::size_t>(ds, "per_class", 250);
    s.noise_std = get_or<double>(ds, "noise_std", 0.0);
    s.width = get_or<std::uint32_t>(ds, "width", 32);
    s.height = get_or<std::uint32_t>(ds, "height", 32);
    cfg.dataset.num_classes = s.num_classes;
  } else {
    config_error("unknown dataset format '" + format + "'");
  }
  cfg.dataset.synthetic.seed = cfg.seed;

  const auto teacher = j.contains("teacher") ? j.at("teacher") : nlohmann::json::object();
  const auto kind = get_or<std::string>(teacher, "kind", "synthetic");
  if (kind == "synthetic") {
    cfg.teacher.kind = TeacherConfig::Kind::Synthetic;
    cfg.teacher.sharpness = get_or<double>(teacher, "sharpness", 10.0);
  } else if (kind == "dumps") {
    cfg.teacher.kind = TeacherConfig::Kind::Dumps;
    for (const auto& [name, p] :
         get_or<std::map<std::string, std::string>>(teacher, "dumps", {})) {
      cfg.teacher.dumps[name] = resolve(base_dir, p);
    }
  } else {
    config_error("unknown teacher kind '" + kind + "'");
  }

  if (!j.contains("augmentations") ||
      (j.at("augmentations").is_string() && j.at("augmentations") == "default")) {
    cfg.augmentations = default_da_family();
  } else if (j.at("augmentations").is_array()) {
    for (const auto& s : j.at("augmentations")) cfg.augmentations.push_back(spec_from_json(s));
  } else {
    config_error("'augmentations' must be \"default\" or an array of specs");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingInput, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, path.string() + ": " + e.what(), e.byte);
  }
  return parse_config(j, path.parent_path());
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["replicas"] = c.replicas;
  j["subsample"] = c.subsample;
  j["strict_empty_class"] = c.empty_class_policy == EmptyClassPolicy::Strict;
  j["workers"] = c.workers;
  j["output_dir"] = c.output_dir.string();
  nlohmann::ordered_json ds;
  if (c.dataset.format == DatasetConfig::Format::CifarBinary) {
    ds["format"] = "cifar-binary";
    ds["num_classes"] = c.dataset.num_classes;
    auto paths = nlohmann::ordered_json::array();
    for (const auto& p : c.dataset.paths) paths.push_back(p.string());
    ds["paths"] = paths;
  } else {
    const auto& s = c.dataset.synthetic;
    ds["format"] = "synthetic";
    ds["num_classes"] = s.num_classes;
    ds["per_class"] = s.per_class;
    ds["noise_std"] = s.noise_std;
    ds["width"] = s.width;
    ds["height"] = s.height;
  }
  j["dataset"] = ds;
  nlohmann::ordered_json t;
  if (c.teacher.kind == TeacherConfig::Kind::Synthetic) {
    t["kind"] = "synthetic";
    t["sharpness"] = c.teacher.sharpness;
  } else {
    t["kind"] = "dumps";
    nlohmann::ordered_json dumps = nlohmann::ordered_json::object();
    for (const auto& [name, p] : c.teacher.dumps) dumps[name] = p.string();
    t["dumps"] = dumps;
  }
  j["teacher"] = t;
  auto specs = nlohmann::ordered_json::array();
  for (const auto& s : c.augmentations) specs.push_back(spec_to_json(s));
  j["augmentations"] = specs;
  return j;
}

void validate(const RunConfig& c) {
  if (c.replicas == 0) config_error("replicas must be at least 1");
  if (!(c.subsample > 0.0 && c.subsample <= 1.0)) config_error("subsample must be in (0, 1]");
  if (c.augmentations.empty()) config_error("no augmentation specs");
  std::set<std::string> names;
  for (const auto& s : c.augmentations) {
    if (!names.insert(s.name).second) config_error("duplicate spec name '" + s.name + "'");
  }
  if (c.teacher.kind == TeacherConfig::Kind::Synthetic) {
    if (!(c.teacher.sharpness > 0.0)) config_error("teacher sharpness must be positive");
    if (c.dataset.format == DatasetConfig::Format::CifarBinary) {
      if (c.dataset.paths.empty()) config_error("cifar-binary dataset without paths");
      for (const auto& p : c.dataset.paths) {
        if (!std::filesystem::exists(p)) {
          throw Error(ErrorKind::MissingInput, "dataset file " + p.string() + " does not exist");
        }
      }
    }
  } else {
    for (const auto& [name, p] : c.teacher.dumps) {
      if (!names.contains(name)) config_error("dump given for unknown spec '" + name + "'");
      if (!std::filesystem::exists(p)) {
        throw Error(ErrorKind::MissingInput,
                    "dump for spec '" + name + "' (" + p.string() + ") does not exist");
      }
    }
  }
}

ImageDataset load_dataset(const RunConfig& c) {
  if (c.dataset.format == DatasetConfig::Format::CifarBinary) {
    return io::load_cifar_binary(c.dataset.paths, c.dataset.num_classes);
  }
  return synth::make_synthetic_dataset(c.dataset.synthetic);
}

TeacherStream::TeacherStream(aug::AugmentedStream stream, synth::SyntheticTeacher teacher)
    : stream_(std::move(stream)), teacher_(std::move(teacher)) {}

std::optional<PredictionRecord> TeacherStream::next() {
  auto sample = stream_.next();
  if (!sample) return std::nullopt;
  return PredictionRecord{sample->record_id, std::move(sample->labels),
                          teacher_.predict(sample->image)};
}

MetricReport score_spec(const RunConfig& config, const ImageDataset* dataset,
                        const std::string& spec_name) {
  const auto& spec = config.spec(spec_name);

  std::unique_ptr<PredictionStream> source;
  if (config.teacher.kind == TeacherConfig::Kind::Dumps) {
    const auto it = config.teacher.dumps.find(spec_name);
    if (it == config.teacher.dumps.end()) {
      throw Error(ErrorKind::MissingInput, "no prediction dump for spec '" + spec_name + "'");
    }
    source = std::make_unique<io::PredictionDumpStream>(it->second);
  } else {
    if (dataset == nullptr) throw Error(ErrorKind::InvalidArgument, "dataset required");
    source = std::make_unique<TeacherStream>(
        aug::AugmentedStream(spec, *dataset, config.seed, config.replicas),
        synth::SyntheticTeacher::with_default_palette(dataset->num_classes(),
                                                      config.teacher.sharpness));
  }

  std::unique_ptr<PredictionStream> filtered;
  PredictionStream* input = source.get();
  if (config.subsample < 1.0) {
    filtered = std::make_unique<SubsampledStream>(*source, config.subsample, config.seed);
    input = filtered.get();
  }

  const auto groups = ReplicaGroups::by_replica_count(config.replicas);
  MetricOptions options;
  options.empty_class_policy = config.empty_class_policy;
  options.workers = config.workers;
  options.groups = config.replicas > 1 ? &groups : nullptr;

  MetricReport report = two_pass_stream(*input, options);
  report.da_name = spec_name;
  report.seed = config.seed;
  report.replicas = config.replicas;
  return report;
}

RankingReport rank_all(const RunConfig& config) {
  std::optional<ImageDataset> dataset;
  if (config.teacher.kind == TeacherConfig::Kind::Synthetic) dataset = load_dataset(config);
  std::vector<MetricReport> reports;
  for (const auto& spec : config.augmentations) {
    reports.push_back(score_spec(config, dataset ? &*dataset : nullptr, spec.name));
  }
  return rank_das(std::move(reports));
}

SynthDemoResult run_synth_demo(const SynthDemoOptions& options) {
  SynthDemoResult out;
  std::ostringstream csv;
  csv << "noise_std,spec,rank,cmi,dev,m,variance_baseline\n";
  for (const double noise : options.noise_levels) {
    RunConfig cfg;
    cfg.dataset.format = DatasetConfig::Format::Synthetic;
    cfg.dataset.num_classes = options.num_classes;
    cfg.dataset.synthetic.num_classes = options.num_classes;
    cfg.dataset.synthetic.per_class = options.per_class;
    cfg.dataset.synthetic.noise_std = noise;
    cfg.dataset.synthetic.seed = options.seed;
    cfg.teacher.kind = TeacherConfig::Kind::Synthetic;
    cfg.teacher.sharpness = options.sharpness;
    cfg.augmentations = default_da_family();
    cfg.seed = options.seed;
    cfg.replicas = options.replicas;
    cfg.subsample = options.subsample;
    cfg.workers = options.workers;
    validate(cfg);

    auto ranking = rank_all(cfg);
    for (const auto& e : ranking.entries) {
      csv << io::format_double(noise) << ',' << e.da_name << ',' << e.rank << ','
          << io::format_double(e.report.cmi) << ',' << io::format_double(e.report.dev) << ','
          << io::format_double(e.report.m) << ','
          << io::format_double(e.report.variance_baseline) << '\n';
    }
    out.rankings.emplace_back(noise, std::move(ranking));
  }
  out.scatter_csv = csv.str();
  return out;
}

std::string format_ranking_table(const RankingReport& ranking) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-4s %-16s %12s %12s %12s %12s\n", "rank", "spec", "cmi",
                "dev", "m", "variance");
  out += line;
  for (const auto& e : ranking.entries) {
    std::snprintf(line, sizeof line, "%-4zu %-16s %12.6f %12.6f %12.6f %12.6g\n", e.rank,
                  e.da_name.c_str(), e.report.cmi, e.report.dev, e.report.m,
                  e.report.variance_baseline);
    out += line;
  }
  out += "selected: " + ranking.selected + "\n";
  if (ranking.spearman_vs_accuracy) {
    std::snprintf(line, sizeof line, "spearman vs accuracy: %.6f\n", *ranking.spearman_vs_accuracy);
    out += line;
  }
  return out;
}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidSpec:
    case ErrorKind::DuplicateName:
      return 2;
    case ErrorKind::MissingInput:
    case ErrorKind::MissingAccuracy:
      return 3;
    case ErrorKind::IoFailure:
      return 1;
    default:
      return 4;
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace augrank::pipeline
