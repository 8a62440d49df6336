// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The augrank Authors

#include "augrank/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <iterator>
#include <limits>
#include <sstream>
#include <system_error>
#include <unordered_set>

#include "augrank/error.hpp"
#include "augrank/rng.hpp"

namespace augrank::io {

namespace {

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingInput, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_for_write(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingInput, "cannot open " + path.string());
  return in;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (text.empty()) return false;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) throw Error(ErrorKind::IoFailure, "cannot format double");
  return {buf, ptr};
}

// ---------------------------------------------------------------------------
// CIFAR

ImageDataset load_cifar_binary(const std::vector<std::filesystem::path>& paths,
                               std::size_t num_classes) {
  std::vector<Image> images;
  std::vector<std::size_t> labels;
  constexpr std::size_t plane = kCifarSide * kCifarSide;
  for (const auto& path : paths) {
    const auto bytes = read_file_bytes(path);
    if (bytes.size() % kCifarRecordBytes != 0) {
      throw Error(ErrorKind::TruncatedFile,
                  path.string() + " has " + std::to_string(bytes.size()) +
                      " bytes, not a multiple of " + std::to_string(kCifarRecordBytes),
                  bytes.size());
    }
    for (std::size_t off = 0; off < bytes.size(); off += kCifarRecordBytes) {
      const std::size_t label = bytes[off];
      if (label >= num_classes) {
        throw Error(ErrorKind::LabelOutOfRange,
                    path.string() + ": label " + std::to_string(label) + " with " +
                        std::to_string(num_classes) + " classes",
                    off);
      }
      std::vector<std::uint8_t> px(bytes.begin() + static_cast<std::ptrdiff_t>(off + 1),
                                   bytes.begin() + static_cast<std::ptrdiff_t>(off + 1 + 3 * plane));
      images.emplace_back(kCifarSide, kCifarSide, std::move(px));
      labels.push_back(label);
    }
  }
  return ImageDataset(num_classes, std::move(images), std::move(labels));
}

// ---------------------------------------------------------------------------
// Prediction dump

std::string format_dump_line(const PredictionRecord& record) {
  std::string line = std::to_string(record.id);
  line += ',';
  bool first = true;
  const auto w = record.labels.weights();
  for (std::size_t c = 0; c < w.size(); ++c) {
    if (w[c] == 0.0) continue;
    if (!first) line += ';';
    first = false;
    line += std::to_string(c);
    line += ':';
    line += format_double(w[c]);
  }
  line += ',';
  const auto p = record.probs.values();
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (c > 0) line += '|';
    line += format_double(p[c]);
  }
  return line;
}

void write_prediction_dump(std::ostream& out, const PredictionSet& preds) {
  out << "#augrank-preds v" << kDumpVersion << " classes=" << preds.num_classes()
      << " count=" << preds.size() << '\n';
  for (const auto& r : preds.records()) out << format_dump_line(r) << '\n';
  if (!out) throw Error(ErrorKind::IoFailure, "write failed");
}

void write_prediction_dump(const std::filesystem::path& path, const PredictionSet& preds) {
  auto out = open_for_write(path);
  write_prediction_dump(out, preds);
}

DumpHeader parse_dump_header(const std::string& raw) {
  std::string line = raw;
  strip_cr(line);
  constexpr std::string_view magic = "#augrank-preds v";
  if (line.rfind(magic, 0) != 0) {
    throw Error(ErrorKind::BadHeader, "expected '#augrank-preds v1 classes=<C> count=<N>'", 1);
  }
  const auto fields = split(std::string_view(line).substr(magic.size()), ' ');
  int version = 0;
  if (fields.empty() || !parse_number(fields[0], version)) {
    throw Error(ErrorKind::BadHeader, "unreadable version", 1);
  }
  if (version != kDumpVersion) {
    throw Error(ErrorKind::VersionUnsupported, "dump version " + std::to_string(version), 1);
  }
  DumpHeader h;
  if (fields.size() != 3 || fields[1].rfind("classes=", 0) != 0 ||
      fields[2].rfind("count=", 0) != 0 ||
      !parse_number(fields[1].substr(std::strlen("classes=")), h.num_classes) ||
      !parse_number(fields[2].substr(std::strlen("count=")), h.count) || h.num_classes == 0) {
    throw Error(ErrorKind::BadHeader, "malformed header '" + line + "'", 1);
  }
  return h;
}

PredictionRecord parse_dump_line(const std::string& raw, std::size_t num_classes,
                                 std::size_t line_number) {
  std::string line = raw;
  strip_cr(line);
  auto bad = [&](const std::string& why) {
    return Error(ErrorKind::BadLine, why, line_number);
  };
  const auto fields = split(line, ',');
  if (fields.size() != 3) throw bad("expected 3 comma-separated fields");

  PredictionRecord r;
  if (!parse_number(fields[0], r.id)) throw bad("bad id '" + std::string(fields[0]) + "'");

  std::vector<double> weights(num_classes, 0.0);
  std::vector<bool> present(num_classes, false);
  for (const auto item : split(fields[1], ';')) {
    const auto kv = split(item, ':');
    std::size_t cls = 0;
    double w = 0.0;
    if (kv.size() != 2 || !parse_number(kv[0], cls) || !parse_number(kv[1], w)) {
      throw bad("bad label entry '" + std::string(item) + "'");
    }
    if (cls >= num_classes) throw bad("label class " + std::to_string(cls) + " out of range");
    if (present[cls]) throw bad("label class " + std::to_string(cls) + " repeated");
    present[cls] = true;
    weights[cls] = w;
  }

  const auto probs = split(fields[2], '|');
  if (probs.size() != num_classes) {
    throw bad("expected " + std::to_string(num_classes) + " probabilities, got " +
              std::to_string(probs.size()));
  }
  std::vector<double> p(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (!parse_number(probs[c], p[c])) throw bad("bad probability '" + std::string(probs[c]) + "'");
  }
  try {
    r.labels = LabelWeights(std::move(weights));
    r.probs = ProbVector(std::move(p));
  } catch (const Error& e) {
    throw bad(e.what());
  }
  return r;
}

PredictionSet read_prediction_dump(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::BadHeader, "empty dump", 1);
  const DumpHeader h = parse_dump_header(line);
  std::vector<PredictionRecord> records;
  records.reserve(h.count);
  std::unordered_set<RecordId> ids;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    auto r = parse_dump_line(line, h.num_classes, line_number);
    if (!ids.insert(r.id).second) {
      throw Error(ErrorKind::BadLine, "duplicate id " + std::to_string(r.id), line_number);
    }
    records.push_back(std::move(r));
  }
  if (records.size() != h.count) {
    throw Error(ErrorKind::CountMismatch, "header declares " + std::to_string(h.count) +
                                              " records, found " +
                                              std::to_string(records.size()));
  }
  return PredictionSet(h.num_classes, std::move(records));
}

PredictionSet read_prediction_dump(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return read_prediction_dump(in);
}

PredictionDumpStream::PredictionDumpStream(std::filesystem::path path) : path_(std::move(path)) {
  rewind();
}

void PredictionDumpStream::rewind() {
  in_ = open_for_read(path_);
  std::string line;
  if (!std::getline(in_, line)) throw Error(ErrorKind::BadHeader, "empty dump", 1);
  header_ = parse_dump_header(line);
  line_number_ = 1;
  records_read_ = 0;
}

std::optional<PredictionRecord> PredictionDumpStream::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    if (line.empty() && in_.peek() == std::char_traits<char>::eof()) break;
    ++records_read_;
    return parse_dump_line(line, header_.num_classes, line_number_);
  }
  if (records_read_ != header_.count) {
    throw Error(ErrorKind::CountMismatch, "header declares " + std::to_string(header_.count) +
                                              " records, found " +
                                              std::to_string(records_read_));
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Augmented container

namespace {

class ByteWriter {
 public:
  void u16(std::uint16_t v) {
    bytes_.push_back(static_cast<std::uint8_t>(v));
    bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  void raw(std::span<const std::uint8_t> data) { bytes_.insert(bytes_.end(), data.begin(), data.end()); }

  std::vector<std::uint8_t>& bytes() noexcept { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::uint16_t u16() {
    need(2);
    const std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::vector<std::uint8_t> raw(std::size_t n) {
    need(n);
    std::vector<std::uint8_t> out(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                  bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }

  [[nodiscard]] std::size_t position() const noexcept { return pos_; }
  [[nodiscard]] std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorKind::Truncated,
                  "need " + std::to_string(n) + " bytes, " + std::to_string(bytes_.size() - pos_) +
                      " left",
                  pos_);
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

constexpr char kMagic[4] = {'A', 'U', 'G', 'R'};

void encode_header(ByteWriter& w, std::uint16_t num_classes, std::uint32_t count,
                   std::uint16_t width, std::uint16_t height) {
  w.raw({reinterpret_cast<const std::uint8_t*>(kMagic), 4});
  w.u16(kContainerVersion);
  w.u16(num_classes);
  w.u32(count);
  w.u16(width);
  w.u16(height);
  w.u16(0);
}

void encode_record(ByteWriter& w, const ContainerRecord& r) {
  w.u32(r.id);
  w.u16(r.replica);
  const auto weights = r.labels.weights();
  const auto k = static_cast<std::uint16_t>(
      std::count_if(weights.begin(), weights.end(), [](double x) { return x != 0.0; }));
  w.u16(k);
  for (std::size_t c = 0; c < weights.size(); ++c) {
    if (weights[c] == 0.0) continue;
    w.u16(static_cast<std::uint16_t>(c));
    w.f64(weights[c]);
  }
  w.raw(r.image.pixels());
}

std::uint16_t checked_u16(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " does not fit in 16 bits");
  }
  return static_cast<std::uint16_t>(v);
}

ContainerRecord to_container_record(const aug::AugmentedSample& s) {
  if (s.record_id > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::InvalidArgument, "record id does not fit in 32 bits");
  }
  return {static_cast<std::uint32_t>(s.record_id), checked_u16(s.replica_index, "replica index"),
          s.labels, s.image};
}

}  // namespace

std::vector<std::uint8_t> encode_augmented(const AugmentedContainer& container) {
  ByteWriter w;
  encode_header(w, checked_u16(container.num_classes, "class count"),
                static_cast<std::uint32_t>(container.records.size()),
                checked_u16(container.width, "width"), checked_u16(container.height, "height"));
  for (const auto& r : container.records) {
    if (r.image.width() != container.width || r.image.height() != container.height) {
      throw Error(ErrorKind::DimensionMismatch, "record " + std::to_string(r.id) +
                                                    " differs from container dimensions");
    }
    encode_record(w, r);
  }
  return std::move(w.bytes());
}

AugmentedContainer decode_augmented(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes);
  const auto magic = r.raw(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw Error(ErrorKind::BadMagic, "not an augmented container", 0);
  }
  AugmentedContainer out;
  out.version = r.u16();
  if (out.version != kContainerVersion) {
    throw Error(ErrorKind::VersionUnsupported, "container version " + std::to_string(out.version),
                4);
  }
  out.num_classes = r.u16();
  const std::uint32_t count = r.u32();
  out.width = r.u16();
  out.height = r.u16();
  (void)r.u16();
  const std::size_t pixel_bytes = static_cast<std::size_t>(out.width) * out.height * 3;

  out.records.reserve(std::min<std::size_t>(count, bytes.size() / (8 + pixel_bytes) + 1));
  for (std::uint32_t i = 0; i < count; ++i) {
    ContainerRecord rec;
    const std::size_t start = r.position();
    rec.id = r.u32();
    rec.replica = r.u16();
    const std::uint16_t k = r.u16();
    std::vector<double> weights(out.num_classes, 0.0);
    for (std::uint16_t j = 0; j < k; ++j) {
      const std::uint16_t cls = r.u16();
      const double w = r.f64();
      if (cls >= out.num_classes) {
        throw Error(ErrorKind::LabelOutOfRange,
                    "record " + std::to_string(i) + " label class " + std::to_string(cls), start);
      }
      weights[cls] += w;
    }
    try {
      rec.labels = LabelWeights(std::move(weights));
    } catch (const Error& e) {
      throw Error(e.kind(), "record " + std::to_string(i) + ": " + e.what(), start);
    }
    rec.image = Image(out.width, out.height, r.raw(pixel_bytes));
    out.records.push_back(std::move(rec));
  }
  if (r.remaining() != 0) {
    throw Error(ErrorKind::CountMismatch,
                std::to_string(r.remaining()) + " trailing bytes after " + std::to_string(count) +
                    " records",
                r.position());
  }
  return out;
}

AugmentedWriter::AugmentedWriter(const std::filesystem::path& path, std::size_t num_classes)
    : path_(path), out_(open_for_write(path, true)),
      num_classes_(checked_u16(num_classes, "class count")) {
  write_header();
}

AugmentedWriter::~AugmentedWriter() {
  if (!closed_) {
    try {
      close();
    } catch (...) {
      // Destructors must not throw; call close() explicitly to see errors.
    }
  }
}

void AugmentedWriter::write_header() {
  ByteWriter w;
  encode_header(w, num_classes_, count_, dims_ ? dims_->first : 0, dims_ ? dims_->second : 0);
  out_.seekp(0);
  out_.write(reinterpret_cast<const char*>(w.bytes().data()),
             static_cast<std::streamsize>(w.bytes().size()));
}

void AugmentedWriter::write(const ContainerRecord& record) {
  const std::pair dims{checked_u16(record.image.width(), "width"),
                       checked_u16(record.image.height(), "height")};
  if (!dims_) {
    dims_ = dims;
  } else if (*dims_ != dims) {
    throw Error(ErrorKind::DimensionMismatch,
                "record " + std::to_string(record.id) + " differs from earlier records in size");
  }
  if (record.labels.size() != num_classes_) {
    throw Error(ErrorKind::ClassCountMismatch, "record " + std::to_string(record.id) +
                                                   " has " + std::to_string(record.labels.size()) +
                                                   " label weights");
  }
  ByteWriter w;
  encode_record(w, record);
  out_.write(reinterpret_cast<const char*>(w.bytes().data()),
             static_cast<std::streamsize>(w.bytes().size()));
  ++count_;
}

void AugmentedWriter::write(const aug::AugmentedSample& sample) { write(to_container_record(sample)); }

void AugmentedWriter::close() {
  if (closed_) return;
  closed_ = true;
  write_header();
  out_.close();
  if (!out_) throw Error(ErrorKind::IoFailure, "failed writing " + path_.string());
}

void write_augmented_dataset(const std::filesystem::path& path, std::size_t num_classes,
                             aug::AugmentedStream& stream) {
  AugmentedWriter writer(path, num_classes);
  stream.rewind();
  while (auto s = stream.next()) writer.write(*s);
  writer.close();
}

AugmentedContainer read_augmented_dataset(const std::filesystem::path& path) {
  return decode_augmented(read_file_bytes(path));
}

// ---------------------------------------------------------------------------
// Reports

namespace {

void dump_value(const nlohmann::ordered_json& j, std::string& out, int depth) {
  const std::string indent(static_cast<std::size_t>(depth + 1) * 2, ' ');
  const std::string closing(static_cast<std::size_t>(depth) * 2, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += indent + nlohmann::json(key).dump() + ": ";
        dump_value(value, out, depth + 1);
      }
      out += "\n" + closing + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += ",\n";
        first = false;
        out += indent;
        dump_value(value, out, depth + 1);
      }
      out += "\n" + closing + "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

nlohmann::ordered_json header_fields(std::string_view kind) {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["tool"] = kToolName;
  j["tool_version"] = kToolVersion;
  j["rng"] = rng::kAlgorithmId;
  return j;
}

void metric_fields(nlohmann::ordered_json& j, const MetricReport& r) {
  j["spec"] = r.da_name;
  j["seed"] = r.seed;
  j["replicas"] = r.replicas;
  j["n"] = r.n;
  j["num_classes"] = r.num_classes;
  j["mode"] = to_string(r.mode);
  j["cmi"] = r.cmi;
  j["dev"] = r.dev;
  j["m"] = r.m;
  j["variance_baseline"] = r.variance_baseline;
  j["variance_mode"] = to_string(r.variance_mode);
  j["empty_class_policy_applied"] = r.empty_class_policy_applied;
}

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::BadReport, std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::BadReport, std::string("key '") + key + "': " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_for_write(path);
  out << text << '\n';
  if (!out) throw Error(ErrorKind::IoFailure, "failed writing " + path.string());
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& j) {
  std::string out;
  dump_value(j, out, 0);
  return out;
}

nlohmann::ordered_json to_json(const MetricReport& report) {
  auto j = header_fields("metric_report");
  metric_fields(j, report);
  return j;
}

nlohmann::ordered_json to_json(const RankingReport& report) {
  auto j = header_fields("ranking_report");
  if (!report.entries.empty()) j["seed"] = report.entries.front().report.seed;
  j["selected"] = report.selected;
  if (report.spearman_vs_accuracy) j["spearman_vs_accuracy"] = *report.spearman_vs_accuracy;
  if (report.accuracy_source) j["accuracy_source"] = *report.accuracy_source;
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : report.entries) {
    nlohmann::ordered_json item;
    item["rank"] = e.rank;
    metric_fields(item, e.report);
    entries.push_back(std::move(item));
  }
  j["entries"] = std::move(entries);
  return j;
}

MetricReport metric_report_from_json(const nlohmann::json& j) {
  MetricReport r;
  r.da_name = field<std::string>(j, "spec");
  r.seed = field<std::uint64_t>(j, "seed");
  r.replicas = field<std::uint32_t>(j, "replicas");
  r.n = field<std::size_t>(j, "n");
  r.num_classes = field<std::size_t>(j, "num_classes");
  const auto mode = field<std::string>(j, "mode");
  if (mode == "one-hot") {
    r.mode = LabelMode::OneHot;
  } else if (mode == "mixed") {
    r.mode = LabelMode::Mixed;
  } else {
    throw Error(ErrorKind::BadReport, "unknown mode '" + mode + "'");
  }
  r.cmi = field<double>(j, "cmi");
  r.dev = field<double>(j, "dev");
  r.m = field<double>(j, "m");
  r.variance_baseline = field<double>(j, "variance_baseline");
  const auto vmode = field<std::string>(j, "variance_mode");
  if (vmode == "dataset") {
    r.variance_mode = VarianceMode::Dataset;
  } else if (vmode == "per-image") {
    r.variance_mode = VarianceMode::PerImage;
  } else {
    throw Error(ErrorKind::BadReport, "unknown variance_mode '" + vmode + "'");
  }
  r.empty_class_policy_applied = field<bool>(j, "empty_class_policy_applied");
  if (r.m != r.dev - r.cmi) {
    throw Error(ErrorKind::BadReport, "m != dev - cmi for '" + r.da_name + "'");
  }
  return r;
}

RankingReport ranking_report_from_json(const nlohmann::json& j) {
  if (field<std::string>(j, "kind") != "ranking_report") {
    throw Error(ErrorKind::BadReport, "not a ranking report");
  }
  RankingReport r;
  r.selected = field<std::string>(j, "selected");
  if (j.contains("spearman_vs_accuracy")) {
    r.spearman_vs_accuracy = field<double>(j, "spearman_vs_accuracy");
  }
  if (j.contains("accuracy_source")) r.accuracy_source = field<std::string>(j, "accuracy_source");
  const auto entries = field<nlohmann::json>(j, "entries");
  if (!entries.is_array() || entries.empty()) {
    throw Error(ErrorKind::BadReport, "entries must be a non-empty array");
  }
  for (const auto& item : entries) {
    RankedEntry e;
    e.rank = field<std::size_t>(item, "rank");
    e.report = metric_report_from_json(item);
    e.da_name = e.report.da_name;
    r.entries.push_back(std::move(e));
  }
  if (r.entries.front().da_name != r.selected) {
    throw Error(ErrorKind::BadReport, "selected is not the first entry");
  }
  return r;
}

void write_report(const std::filesystem::path& path, const MetricReport& report,
                  const nlohmann::ordered_json& extra) {
  auto j = to_json(report);
  for (const auto& [k, v] : extra.items()) j[k] = v;
  write_text(path, dump_json(j));
}

void write_report(const std::filesystem::path& path, const RankingReport& report,
                  const nlohmann::ordered_json& extra) {
  auto j = to_json(report);
  for (const auto& [k, v] : extra.items()) j[k] = v;
  write_text(path, dump_json(j));
}

nlohmann::json read_json(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::BadReport, path.string() + ": " + e.what(), e.byte);
  }
}

MetricReport read_metric_report(const std::filesystem::path& path) {
  const auto j = read_json(path);
  if (field<std::string>(j, "kind") != "metric_report") {
    throw Error(ErrorKind::BadReport, path.string() + " is not a metric report");
  }
  return metric_report_from_json(j);
}

RankingReport read_ranking_report(const std::filesystem::path& path) {
  return ranking_report_from_json(read_json(path));
}

std::map<std::string, double> read_accuracies(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::map<std::string, double> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    double acc = 0.0;
    const bool numeric = fields.size() == 2 && parse_number(fields[1], acc);
    if (!numeric) {
      if (line_number == 1) continue;  // header
      throw Error(ErrorKind::BadLine, "expected 'da_name,accuracy'", line_number);
    }
    if (!out.emplace(std::string(fields[0]), acc).second) {
      throw Error(ErrorKind::BadLine, "duplicate name '" + std::string(fields[0]) + "'",
                  line_number);
    }
  }
  return out;
}

}  // namespace augrank::io
