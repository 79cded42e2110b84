#include "csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"

namespace spknn {

void CsvSchema::validate() const {
  if (site_columns.empty()) fail(ErrorCode::Schema, "schema needs at least one site column");
  if (covariate_columns.empty()) fail(ErrorCode::Schema, "schema needs at least one covariate column");
  if (delimiter == '"' || delimiter == '\n' || delimiter == '\r')
    fail(ErrorCode::Schema, std::string("invalid delimiter '") + delimiter + "'");
  std::set<std::string> seen;
  auto add = [&](const std::string& name) {
    if (name.empty()) fail(ErrorCode::Schema, "empty column name in schema");
    if (!seen.insert(name).second) fail(ErrorCode::Schema, "column '" + name + "' named twice in schema");
  };
  for (const auto& c : site_columns) add(c);
  for (const auto& c : covariate_columns) add(c);
  if (response_column) add(*response_column);
  if (label_column) add(*label_column);
}

std::vector<CsvRow> parse_csv(std::string_view text, char delimiter) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool quoted = false;
  bool row_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    quoted = false;
  };
  auto end_row = [&] {
    end_field();
    // Blank line: a single empty unquoted field.
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
    row_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty() || quoted)
        fail(ErrorCode::Parse, "row " + std::to_string(rows.size() + 1) + ": stray quote inside field");
      in_quotes = true;
      quoted = true;
      row_started = true;
    } else if (c == delimiter) {
      end_field();
      row_started = true;
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_row();
    } else if (c == '\n') {
      end_row();
    } else {
      if (quoted)
        fail(ErrorCode::Parse, "row " + std::to_string(rows.size() + 1) + ": text after closing quote");
      field.push_back(c);
      row_started = true;
    }
  }
  if (in_quotes) fail(ErrorCode::Parse, "unterminated quoted field");
  if (row_started || !field.empty()) end_row();
  return rows;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCode::Io, "read failed for '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

std::vector<CsvRow> read_csv_file(const std::filesystem::path& path, char delimiter) {
  return parse_csv(read_text_file(path), delimiter);
}

std::string csv_escape(std::string_view field, char delimiter) {
  const bool needs = field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_csv_row(const CsvRow& row, char delimiter) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out.push_back(delimiter);
    out += csv_escape(row[i], delimiter);
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::general);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> parse_integer(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

SpatialDataset parse_dataset(std::string_view text, const CsvSchema& schema, std::string_view source) {
  schema.validate();
  const auto rows = parse_csv(text, schema.delimiter);
  if (rows.empty()) fail(ErrorCode::InvalidData, std::string(source) + ": empty file (no header row)");

  const CsvRow& header = rows.front();
  auto column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      fail(ErrorCode::Schema, std::string(source) + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::vector<std::size_t> site_idx, cov_idx;
  for (const auto& c : schema.site_columns) site_idx.push_back(column(c));
  for (const auto& c : schema.covariate_columns) cov_idx.push_back(column(c));
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  const std::size_t y_col = schema.response_column ? column(*schema.response_column) : none;
  const std::size_t l_col = schema.label_column ? column(*schema.label_column) : none;
  const bool has_y = y_col != none;
  const bool has_l = l_col != none;

  const std::size_t n = rows.size() - 1;
  std::vector<double> coords, covs, ys;
  std::vector<long long> raw_labels;
  coords.reserve(n * site_idx.size());
  covs.reserve(n * cov_idx.size());

  auto cell = [&](std::size_t r, std::size_t c) -> const std::string& {
    const CsvRow& row = rows[r];
    if (row.size() != header.size())
      fail(ErrorCode::Parse, std::string(source) + ": row " + std::to_string(r) + " has " +
                                 std::to_string(row.size()) + " fields, header has " +
                                 std::to_string(header.size()));
    return row[c];
  };
  auto number = [&](std::size_t r, std::size_t c) {
    const auto v = parse_double(cell(r, c));
    if (!v)
      fail(ErrorCode::Parse, std::string(source) + ": row " + std::to_string(r) + ", column '" + header[c] +
                                 "': not a finite number: '" + rows[r][c] + "'");
    return *v;
  };

  for (std::size_t r = 1; r <= n; ++r) {
    for (auto c : site_idx) coords.push_back(number(r, c));
    for (auto c : cov_idx) covs.push_back(number(r, c));
    if (has_y) ys.push_back(number(r, y_col));
    if (has_l) {
      const auto v = parse_integer(cell(r, l_col));
      if (!v)
        fail(ErrorCode::Parse, std::string(source) + ": row " + std::to_string(r) + ", column '" +
                                   header[l_col] + "': not an integer label: '" + rows[r][l_col] + "'");
      raw_labels.push_back(*v);
    }
  }

  std::optional<std::vector<int>> labels;
  LabelCoding coding = LabelCoding::Native;
  if (has_l) {
    if (schema.label_coding) {
      coding = *schema.label_coding;
    } else {
      const bool zero_one =
          !raw_labels.empty() &&
          std::all_of(raw_labels.begin(), raw_labels.end(), [](long long v) { return v == 0 || v == 1; }) &&
          std::any_of(raw_labels.begin(), raw_labels.end(), [](long long v) { return v == 0; });
      coding = zero_one ? LabelCoding::ZeroOne : LabelCoding::Native;
    }
    labels.emplace();
    labels->reserve(raw_labels.size());
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
      const long long v = raw_labels[i];
      const long long internal = coding == LabelCoding::ZeroOne ? v + 1 : v;
      const bool ok = coding == LabelCoding::ZeroOne ? (v == 0 || v == 1) : (v >= 1 && v <= 1'000'000);
      if (!ok)
        fail(ErrorCode::InvalidData, std::string(source) + ": row " + std::to_string(i + 1) + ", column '" +
                                         header[l_col] + "': label " + std::to_string(v) +
                                         (coding == LabelCoding::ZeroOne ? " is not 0/1" : " is not >= 1"));
      labels->push_back(static_cast<int>(internal));
    }
  }

  SiteSet sites(site_idx.size(), std::move(coords));
  std::optional<std::vector<double>> responses;
  if (has_y) responses = std::move(ys);
  return SpatialDataset(std::move(sites), cov_idx.size(), std::move(covs), std::move(responses),
                        std::move(labels), coding);
}

SpatialDataset read_dataset(const std::filesystem::path& path, const CsvSchema& schema) {
  return parse_dataset(read_text_file(path), schema, path.string());
}

std::string render_dataset(const SpatialDataset& data, const CsvSchema& schema) {
  schema.validate();
  if (schema.site_columns.size() != data.site_dim())
    fail(ErrorCode::Schema, "schema has " + std::to_string(schema.site_columns.size()) +
                                " site columns, dataset has dimension " + std::to_string(data.site_dim()));
  if (schema.covariate_columns.size() != data.cov_dim())
    fail(ErrorCode::Schema, "schema has " + std::to_string(schema.covariate_columns.size()) +
                                " covariate columns, dataset has dimension " + std::to_string(data.cov_dim()));
  const bool write_y = schema.response_column && data.has_responses();
  const bool write_l = schema.label_column && data.has_labels();
  if (schema.response_column && !data.has_responses())
    fail(ErrorCode::Schema, "dataset has no responses for column '" + *schema.response_column + "'");
  if (schema.label_column && !data.has_labels())
    fail(ErrorCode::Schema, "dataset has no labels for column '" + *schema.label_column + "'");

  const char d = schema.delimiter;
  CsvRow header;
  for (const auto& c : schema.site_columns) header.push_back(c);
  for (const auto& c : schema.covariate_columns) header.push_back(c);
  if (write_y) header.push_back(*schema.response_column);
  if (write_l) header.push_back(*schema.label_column);
  std::string out = join_csv_row(header, d) + "\n";

  for (std::size_t i = 0; i < data.size(); ++i) {
    CsvRow row;
    for (double v : data.sites()[i]) row.push_back(format_double(v));
    for (double v : data.covariate(i)) row.push_back(format_double(v));
    if (write_y) row.push_back(format_double(data.responses()[i]));
    if (write_l) {
      const int l = data.labels()[i];
      row.push_back(std::to_string(data.label_coding() == LabelCoding::ZeroOne ? l - 1 : l));
    }
    out += join_csv_row(row, d);
    out.push_back('\n');
  }
  return out;
}

void write_dataset(const SpatialDataset& data, const std::filesystem::path& path, const CsvSchema& schema) {
  write_text_file(path, render_dataset(data, schema));
}

std::vector<std::string> read_header(const std::filesystem::path& path, char delimiter) {
  const auto rows = read_csv_file(path, delimiter);
  if (rows.empty()) fail(ErrorCode::InvalidData, path.string() + ": empty file (no header row)");
  return rows.front();
}

}  // namespace spknn
