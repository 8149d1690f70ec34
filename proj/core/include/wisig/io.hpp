#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wisig/dataset.hpp"
#include "wisig/fusion.hpp"
#include "wisig/metrics.hpp"

namespace wisig {

// Feature files are comma-separated text with the header
//   writer_id,sample_id,label,f0,...,f{d-1}
// and one sample per line; label is genuine, simple or skilled.

/// Throws ParseError (1-based line) on a bad header, ragged row, unknown
/// label, non-finite or unparsable value, duplicate sample or dim mismatch
/// against `expected_dim`. IoError if the file cannot be opened.
Dataset load_features(const std::filesystem::path& path,
                      std::optional<std::size_t> expected_dim = std::nullopt);
Dataset parse_features(std::istream& in, std::optional<std::size_t> expected_dim = std::nullopt);

/// Values are written in shortest round-trip form, so load_features
/// reproduces the dataset exactly.
void write_features(const Dataset& dataset, std::ostream& out);
void save_features(const Dataset& dataset, const std::filesystem::path& path);

/// Learning set dump: class,first_writer,first_sample,second_writer,second_sample,f0,...
void write_learning_set(std::span<const DissimilarityVector> vectors, std::ostream& out);
/// Reads a learning set dump. Throws ParseError (1-based line).
std::vector<DissimilarityVector> parse_learning_set(std::istream& in);
std::vector<DissimilarityVector> load_learning_set(const std::filesystem::path& path);

enum class ReportFormat { table, machine };

std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept;

struct ReportRow {
  std::string dataset;
  FusionRule rule = FusionRule::max;
  std::size_t n_reference = 0;
  AggregatedReport report;

  bool operator==(const ReportRow&) const = default;
};

/// Fixed-width table with "mean (std)" cells; absent rates print as "—".
std::string render_table(std::span<const ReportRow> rows);
/// One JSON object per line, fields named after the metrics.
std::string render_machine(std::span<const ReportRow> rows);
/// Inverse of render_machine. Throws ParseError with the 1-based line.
std::vector<ReportRow> parse_machine_report(std::string_view text);

/// Throws InvalidInput for an empty row list and IoError when the path
/// cannot be written.
void write_report(std::span<const ReportRow> rows, const std::filesystem::path& path,
                  ReportFormat format);

}  // namespace wisig
