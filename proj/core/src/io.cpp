#include "wisig/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wisig/error.hpp"

namespace wisig {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void line_error(std::size_t line, const std::string& what) {
  throw ParseError("line " + std::to_string(line) + ": " + what, ParseError::Unit::line, line);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

Dataset parse_features(std::istream& in, std::optional<std::size_t> expected_dim) {
  std::string raw;
  std::size_t line_no = 0;
  std::size_t dim = 0;

  // Header.
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    const auto cols = split(raw, ',');
    if (cols.size() < 4 || cols[0] != "writer_id" || cols[1] != "sample_id" || cols[2] != "label") {
      line_error(line_no, "header must be writer_id,sample_id,label,f0,...");
    }
    for (std::size_t k = 3; k < cols.size(); ++k) {
      if (cols[k] != "f" + std::to_string(k - 3)) {
        line_error(line_no, "header column " + std::to_string(k + 1) + " must be f" +
                                std::to_string(k - 3));
      }
    }
    dim = cols.size() - 3;
    break;
  }
  if (dim == 0) throw ParseError("line 1: missing header", ParseError::Unit::line, 1);
  if (expected_dim && *expected_dim != dim) {
    line_error(line_no, "feature dim " + std::to_string(dim) + " does not match expected " +
                            std::to_string(*expected_dim));
  }

  std::vector<SignatureSample> samples;
  std::set<std::pair<std::string, std::string>> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    const auto cols = split(raw, ',');
    if (cols.size() != dim + 3) {
      line_error(line_no, "expected " + std::to_string(dim + 3) + " fields, found " +
                              std::to_string(cols.size()));
    }
    if (cols[0].empty() || cols[1].empty()) line_error(line_no, "empty writer_id or sample_id");
    const auto label = parse_sample_label(cols[2]);
    if (!label) line_error(line_no, "unknown label '" + std::string(cols[2]) + "'");

    std::vector<double> values(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const auto field = cols[k + 3];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        line_error(line_no, "cannot parse f" + std::to_string(k) + " value '" + std::string(field) + "'");
      }
      if (!std::isfinite(v)) {
        line_error(line_no, "non-finite f" + std::to_string(k) + " value '" + std::string(field) + "'");
      }
      values[k] = v;
    }

    std::string writer(cols[0]);
    std::string sample(cols[1]);
    if (!seen.emplace(writer, sample).second) {
      line_error(line_no, "duplicate sample '" + writer + "/" + sample + "'");
    }
    samples.push_back({std::move(writer), std::move(sample), *label, FeatureVector(std::move(values))});
  }
  if (samples.empty()) line_error(line_no + 1, "no samples");
  return Dataset(std::move(samples));
}

Dataset load_features(const std::filesystem::path& path, std::optional<std::size_t> expected_dim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_features(in, expected_dim);
}

void write_features(const Dataset& dataset, std::ostream& out) {
  std::string line = "writer_id,sample_id,label";
  for (std::size_t k = 0; k < dataset.dim(); ++k) line += ",f" + std::to_string(k);
  out << line << '\n';
  for (const auto& s : dataset.samples()) {
    line.clear();
    line += s.writer_id;
    line += ',';
    line += s.sample_id;
    line += ',';
    line += to_string(s.label);
    for (double v : s.features.values()) {
      line += ',';
      append_double(line, v);
    }
    out << line << '\n';
  }
}

void save_features(const Dataset& dataset, const std::filesystem::path& path) {
  auto out = open_for_writing(path);
  write_features(dataset, out);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_learning_set(std::span<const DissimilarityVector> vectors, std::ostream& out) {
  if (vectors.empty()) return;
  std::string line = "class,first_writer,first_sample,second_writer,second_sample";
  for (std::size_t k = 0; k < vectors.front().values.dim(); ++k) line += ",f" + std::to_string(k);
  out << line << '\n';
  for (const auto& v : vectors) {
    line.clear();
    line += to_string(v.klass);
    for (const auto* part : {&v.first.writer_id, &v.first.sample_id, &v.second.writer_id,
                             &v.second.sample_id}) {
      line += ',';
      line += *part;
    }
    for (double x : v.values.values()) {
      line += ',';
      append_double(line, x);
    }
    out << line << '\n';
  }
}

std::vector<DissimilarityVector> parse_learning_set(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::vector<DissimilarityVector> out;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    const auto cols = split(raw, ',');
    if (dim == 0) {
      if (cols.size() < 6 || cols[0] != "class" || cols[5] != "f0") {
        line_error(line_no, "header must be class,first_writer,first_sample,second_writer,"
                            "second_sample,f0,...");
      }
      dim = cols.size() - 5;
      continue;
    }
    if (cols.size() != dim + 5) {
      line_error(line_no, "expected " + std::to_string(dim + 5) + " fields, found " +
                              std::to_string(cols.size()));
    }
    PairClass klass;
    if (cols[0] == "within") klass = PairClass::within;
    else if (cols[0] == "between") klass = PairClass::between;
    else line_error(line_no, "unknown class '" + std::string(cols[0]) + "'");
    std::vector<double> values(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const auto field = cols[k + 5];
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), values[k]);
      if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty() ||
          !std::isfinite(values[k]) || values[k] < 0.0) {
        line_error(line_no, "bad f" + std::to_string(k) + " value '" + std::string(field) + "'");
      }
    }
    out.push_back({FeatureVector(std::move(values)), klass,
                   {std::string(cols[1]), std::string(cols[2])},
                   {std::string(cols[3]), std::string(cols[4])}});
  }
  if (dim == 0) throw ParseError("line 1: missing header", ParseError::Unit::line, 1);
  return out;
}

std::vector<DissimilarityVector> load_learning_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_learning_set(in);
}

std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept {
  if (text == "table") return ReportFormat::table;
  if (text == "machine") return ReportFormat::machine;
  return std::nullopt;
}

std::string render_table(std::span<const ReportRow> rows) {
  constexpr std::string_view kAbsent = "—";
  const char* header_fmt = "%-10s %-7s %6s %5s  %-14s %-14s %-14s %-14s %-14s %-20s %-14s %-14s\n";
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, header_fmt, "dataset", "fusion", "n_ref", "reps", "FRR",
                "FAR_random", "FAR_simple", "FAR_skilled", "AER", "AER_genuine+skilled",
                "EER_global", "EER_user");
  out += buf;

  bool aer_without_simple = false;
  auto cell = [&](const std::optional<Stat>& s) {
    std::string text = s ? format_stat(*s) : std::string(kAbsent);
    // Pad by display width; the em dash is one column but three bytes.
    const std::size_t width = s ? text.size() : 1;
    if (width < 14) text.append(14 - width, ' ');
    return text;
  };
  for (const auto& row : rows) {
    const auto& r = row.report;
    if (!r.far_simple) aer_without_simple = true;
    std::snprintf(buf, sizeof buf, "%-10s %-7s %6zu %5zu  ", row.dataset.c_str(),
                  std::string(to_string(row.rule)).c_str(), row.n_reference, r.replications);
    out += buf;
    out += cell(r.frr) + ' ';
    out += cell(r.far_random) + ' ';
    out += cell(r.far_simple) + ' ';
    out += cell(r.far_skilled) + ' ';
    out += cell(r.aer) + ' ';
    std::string ags = format_stat(r.aer_genuine_skilled);
    ags.resize(std::max<std::size_t>(ags.size(), 20), ' ');
    out += ags + ' ';
    out += cell(r.eer_global) + ' ';
    std::string eu = format_stat(r.eer_user);
    out += eu + '\n';
  }
  if (aer_without_simple) {
    out += "note: rows without FAR_simple average AER over FRR, FAR_random and FAR_skilled only\n";
  }
  return out;
}

namespace {

json stat_json(const Stat& s) { return json{{"mean", s.mean}, {"std", s.std}}; }

json optional_stat_json(const std::optional<Stat>& s) {
  return s ? stat_json(*s) : json(nullptr);
}

Stat stat_from(const json& j, const char* key) {
  const auto& v = j.at(key);
  return {v.at("mean").get<double>(), v.at("std").get<double>()};
}

std::optional<Stat> optional_stat_from(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return Stat{v.at("mean").get<double>(), v.at("std").get<double>()};
}

}  // namespace

std::string render_machine(std::span<const ReportRow> rows) {
  std::string out;
  for (const auto& row : rows) {
    const auto& r = row.report;
    json j;
    j["dataset"] = row.dataset;
    j["fusion"] = std::string(to_string(row.rule));
    j["n_reference"] = row.n_reference;
    j["replications"] = r.replications;
    j["frr"] = stat_json(r.frr);
    j["far_random"] = optional_stat_json(r.far_random);
    j["far_simple"] = optional_stat_json(r.far_simple);
    j["far_skilled"] = stat_json(r.far_skilled);
    j["aer"] = stat_json(r.aer);
    j["aer_genuine_skilled"] = stat_json(r.aer_genuine_skilled);
    j["eer_global"] = stat_json(r.eer_global);
    j["eer_user"] = stat_json(r.eer_user);
    j["threshold_global"] = stat_json(r.threshold_global);
    j["excluded_writers"] = r.excluded_writers;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<ReportRow> parse_machine_report(std::string_view text) {
  std::vector<ReportRow> rows;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      ReportRow row;
      row.dataset = j.at("dataset").get<std::string>();
      const auto rule = parse_fusion_rule(j.at("fusion").get<std::string>());
      if (!rule) line_error(line_no, "unknown fusion rule");
      row.rule = *rule;
      row.n_reference = j.at("n_reference").get<std::size_t>();
      auto& r = row.report;
      r.replications = j.at("replications").get<std::size_t>();
      r.frr = stat_from(j, "frr");
      r.far_random = optional_stat_from(j, "far_random");
      r.far_simple = optional_stat_from(j, "far_simple");
      r.far_skilled = stat_from(j, "far_skilled");
      r.aer = stat_from(j, "aer");
      r.aer_genuine_skilled = stat_from(j, "aer_genuine_skilled");
      r.eer_global = stat_from(j, "eer_global");
      r.eer_user = stat_from(j, "eer_user");
      r.threshold_global = stat_from(j, "threshold_global");
      r.excluded_writers = j.at("excluded_writers").get<std::size_t>();
      rows.push_back(std::move(row));
    } catch (const json::exception& e) {
      line_error(line_no, e.what());
    }
  }
  return rows;
}

void write_report(std::span<const ReportRow> rows, const std::filesystem::path& path,
                  ReportFormat format) {
  if (rows.empty()) throw InvalidInput("write_report: no rows");
  auto out = open_for_writing(path);
  out << (format == ReportFormat::table ? render_table(rows) : render_machine(rows));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace wisig
