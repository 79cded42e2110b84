#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dataset.hpp"

namespace spknn {

struct CsvSchema {
  std::vector<std::string> site_columns{"s1", "s2"};
  std::vector<std::string> covariate_columns{"x"};
  std::optional<std::string> response_column{"y"};
  std::optional<std::string> label_column;
  char delimiter = ',';
  // Unset: 0/1 label files are read as ZeroOne, anything else as Native.
  std::optional<LabelCoding> label_coding;

  void validate() const;
};

using CsvRow = std::vector<std::string>;

// RFC-4180 style: quoted fields may contain the delimiter, doubled quotes and
// line breaks. Blank lines are skipped.
std::vector<CsvRow> parse_csv(std::string_view text, char delimiter = ',');
std::vector<CsvRow> read_csv_file(const std::filesystem::path& path, char delimiter = ',');

std::string csv_escape(std::string_view field, char delimiter = ',');
std::string join_csv_row(const CsvRow& row, char delimiter = ',');

// Shortest decimal that round-trips; locale independent.
std::string format_double(double v);
// Strict: the whole field must be a finite decimal number.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_integer(std::string_view s);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

SpatialDataset read_dataset(const std::filesystem::path& path, const CsvSchema& schema);
SpatialDataset parse_dataset(std::string_view text, const CsvSchema& schema, std::string_view source = "<text>");

std::string render_dataset(const SpatialDataset& data, const CsvSchema& schema);
void write_dataset(const SpatialDataset& data, const std::filesystem::path& path, const CsvSchema& schema);

// Header names of a CSV file (first record only).
std::vector<std::string> read_header(const std::filesystem::path& path, char delimiter = ',');

}  // namespace spknn
