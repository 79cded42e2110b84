#include "reports.hpp"

#include <algorithm>

#include "csv.hpp"
#include "error.hpp"

namespace spknn {

namespace {

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::vector<CsvRow> table_rows(std::string_view text, const CsvRow& expected_header, std::string_view what) {
  auto rows = parse_csv(text);
  if (rows.empty()) fail(ErrorCode::InvalidData, std::string(what) + ": empty report");
  if (rows.front() != expected_header)
    fail(ErrorCode::Schema, std::string(what) + ": unexpected header '" + join_csv_row(rows.front()) + "'");
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != expected_header.size())
      fail(ErrorCode::Parse, std::string(what) + ": row " + std::to_string(r) + " has " +
                                 std::to_string(rows[r].size()) + " fields");
  return rows;
}

double num(const CsvRow& row, std::size_t c, const CsvRow& header, std::size_t r) {
  const auto v = parse_double(row[c]);
  if (!v)
    fail(ErrorCode::Parse,
         "row " + std::to_string(r) + ", column '" + header[c] + "': not a finite number: '" + row[c] + "'");
  return *v;
}

std::optional<double> opt_num(const CsvRow& row, std::size_t c, const CsvRow& header, std::size_t r) {
  if (row[c].empty()) return std::nullopt;
  return num(row, c, header, r);
}

std::size_t count(const CsvRow& row, std::size_t c, const CsvRow& header, std::size_t r) {
  const auto v = parse_integer(row[c]);
  if (!v || *v < 0)
    fail(ErrorCode::Parse,
         "row " + std::to_string(r) + ", column '" + header[c] + "': not a count: '" + row[c] + "'");
  return static_cast<std::size_t>(*v);
}

Kernel kernel_cell(const CsvRow& row, std::size_t c, const CsvRow& header, std::size_t r) {
  const auto k = kernel_from_name(row[c]);
  if (!k)
    fail(ErrorCode::Parse,
         "row " + std::to_string(r) + ", column '" + header[c] + "': unknown kernel '" + row[c] + "'");
  return *k;
}

}  // namespace

std::vector<int> report_class_order(LabelCoding coding, int num_classes) {
  std::vector<int> order;
  for (int c = 1; c <= num_classes; ++c) order.push_back(c);
  if (coding == LabelCoding::ZeroOne) std::reverse(order.begin(), order.end());
  return order;
}

std::string render_eval_report(const EvalReport& report) {
  if (report.per_replication.empty()) fail(ErrorCode::InvalidArgument, "report has no replications");
  std::string out = "key,value\n";
  for (std::size_t i = 0; i < report.per_replication.size(); ++i)
    out += std::to_string(i + 1) + "," + format_double(report.per_replication[i]) + "\n";
  out += "mean," + format_double(report.mean) + "\n";
  out += "sd," + format_double(report.sd) + "\n";
  if (report.t_stat) out += "t_stat," + format_double(*report.t_stat) + "\n";
  if (report.p_value) out += "p_value," + format_double(*report.p_value) + "\n";
  return out;
}

EvalReport parse_eval_report(std::string_view text) {
  const CsvRow header{"key", "value"};
  const auto rows = table_rows(text, header, "eval report");
  EvalReport out;
  bool has_mean = false, has_sd = false;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& key = rows[r][0];
    const double v = num(rows[r], 1, header, r);
    if (key == "mean") {
      out.mean = v;
      has_mean = true;
    } else if (key == "sd") {
      out.sd = v;
      has_sd = true;
    } else if (key == "t_stat") {
      out.t_stat = v;
    } else if (key == "p_value") {
      out.p_value = v;
    } else {
      const auto idx = parse_integer(key);
      if (!idx || *idx != static_cast<long long>(out.per_replication.size()) + 1)
        fail(ErrorCode::Parse, "eval report row " + std::to_string(r) + ": unexpected key '" + key + "'");
      out.per_replication.push_back(v);
    }
  }
  if (out.per_replication.empty() || !has_mean || !has_sd)
    fail(ErrorCode::InvalidData, "eval report: missing replications, mean or sd");
  return out;
}

std::string render_ccr_report(const CcrReport& report, LabelCoding coding) {
  const int m = static_cast<int>(report.per_class.size());
  std::string out = "class,file_label,count,ccr\n";
  std::size_t total = 0;
  for (int c : report_class_order(coding, m)) {
    const auto j = static_cast<std::size_t>(c - 1);
    const std::size_t cnt = j < report.class_counts.size() ? report.class_counts[j] : 0;
    total += cnt;
    out += std::to_string(c) + "," + std::to_string(file_label(c, coding)) + "," + std::to_string(cnt) + "," +
           opt_cell(report.per_class[j]) + "\n";
  }
  out += "all,," + std::to_string(total) + "," + format_double(report.overall) + "\n";
  return out;
}

CcrReport parse_ccr_report(std::string_view text) {
  const CsvRow header{"class", "file_label", "count", "ccr"};
  const auto rows = table_rows(text, header, "ccr report");
  CcrReport out;
  bool has_all = false;
  std::vector<std::pair<int, std::pair<std::size_t, std::optional<double>>>> classes;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r][0] == "all") {
      out.overall = num(rows[r], 3, header, r);
      has_all = true;
      continue;
    }
    const auto c = parse_integer(rows[r][0]);
    if (!c || *c < 1) fail(ErrorCode::Parse, "ccr report row " + std::to_string(r) + ": bad class");
    classes.push_back({static_cast<int>(*c), {count(rows[r], 2, header, r), opt_num(rows[r], 3, header, r)}});
  }
  if (!has_all) fail(ErrorCode::InvalidData, "ccr report: missing 'all' row");
  std::sort(classes.begin(), classes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].first != static_cast<int>(i) + 1)
      fail(ErrorCode::InvalidData, "ccr report: classes are not 1..M");
    out.class_counts.push_back(classes[i].second.first);
    out.per_class.push_back(classes[i].second.second);
  }
  return out;
}

namespace {

const CsvRow kBenchmarkHeader{"grid",    "sigma2",   "a",      "replications", "kernel_mean",
                              "kernel_sd", "knn_mean", "knn_sd", "t_stat",       "p_value"};

std::string grid_name(std::size_t rows, std::size_t cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace

std::string render_benchmark_table(std::span<const BenchmarkRow> rows) {
  std::string out = join_csv_row(kBenchmarkHeader) + "\n";
  for (const auto& b : rows) {
    out += join_csv_row({grid_name(b.rows, b.cols), format_double(b.z_variance), format_double(b.a),
                         std::to_string(b.replications), format_double(b.kernel_mean), format_double(b.kernel_sd),
                         format_double(b.knn_mean), format_double(b.knn_sd), opt_cell(b.t_stat),
                         opt_cell(b.p_value)});
    out.push_back('\n');
  }
  return out;
}

std::vector<BenchmarkRow> parse_benchmark_table(std::string_view text) {
  const auto& h = kBenchmarkHeader;
  const auto rows = table_rows(text, h, "benchmark table");
  std::vector<BenchmarkRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    BenchmarkRow b;
    const auto x = row[0].find('x');
    const auto gr = x == std::string::npos ? std::nullopt : parse_integer(std::string_view(row[0]).substr(0, x));
    const auto gc = x == std::string::npos ? std::nullopt : parse_integer(std::string_view(row[0]).substr(x + 1));
    if (!gr || !gc || *gr < 1 || *gc < 1)
      fail(ErrorCode::Parse, "benchmark table row " + std::to_string(r) + ": bad grid '" + row[0] + "'");
    b.rows = static_cast<std::size_t>(*gr);
    b.cols = static_cast<std::size_t>(*gc);
    b.z_variance = num(row, 1, h, r);
    b.a = num(row, 2, h, r);
    b.replications = count(row, 3, h, r);
    b.kernel_mean = num(row, 4, h, r);
    b.kernel_sd = num(row, 5, h, r);
    b.knn_mean = num(row, 6, h, r);
    b.knn_sd = num(row, 7, h, r);
    b.t_stat = opt_num(row, 8, h, r);
    b.p_value = opt_num(row, 9, h, r);
    out.push_back(b);
  }
  return out;
}

std::string render_replication_table(std::span<const ReplicationRow> rows) {
  std::string out =
      "grid,sigma2,a,replication,seed,knn_mae,kernel_mae,knn_k,knn_k_prime,knn_k1,knn_k2,nw_h,nw_rho,nw_k1,nw_k2\n";
  for (const auto& r : rows) {
    out += join_csv_row({grid_name(r.rows, r.cols), format_double(r.z_variance), format_double(r.a),
                         std::to_string(r.replication), std::to_string(r.seed), format_double(r.knn_mae),
                         format_double(r.kernel_mae), std::to_string(r.knn.k), std::to_string(r.knn.k_prime),
                         std::string(kernel_name(r.knn.k1)), std::string(kernel_name(r.knn.k2)),
                         format_double(r.nw.h), format_double(r.nw.rho), std::string(kernel_name(r.nw.k1)),
                         std::string(kernel_name(r.nw.k2))});
    out.push_back('\n');
  }
  return out;
}

std::string render_classification_table(std::span<const ClassifyRow> rows, LabelCoding coding,
                                        int num_classes) {
  const auto order = report_class_order(coding, num_classes);
  CsvRow header{"k1", "k2", "knn_k", "knn_k_prime", "knn_all"};
  for (int c : order) header.push_back("knn_y" + std::to_string(file_label(c, coding)));
  header.insert(header.end(), {"nw_h", "nw_rho", "nw_all"});
  for (int c : order) header.push_back("nw_y" + std::to_string(file_label(c, coding)));
  std::string out = join_csv_row(header) + "\n";

  auto per_class = [&](const CcrReport& rep, CsvRow& row) {
    for (int c : order) {
      const auto j = static_cast<std::size_t>(c - 1);
      row.push_back(j < rep.per_class.size() ? opt_cell(rep.per_class[j]) : std::string());
    }
  };
  for (const auto& r : rows) {
    CsvRow row{std::string(kernel_name(r.k1)), std::string(kernel_name(r.k2)), std::to_string(r.knn.k),
               std::to_string(r.knn.k_prime), format_double(r.knn_ccr.overall)};
    per_class(r.knn_ccr, row);
    row.insert(row.end(), {format_double(r.nw.h), format_double(r.nw.rho), format_double(r.nw_ccr.overall)});
    per_class(r.nw_ccr, row);
    out += join_csv_row(row) + "\n";
  }
  return out;
}

ClassificationTable parse_classification_table(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty()) fail(ErrorCode::InvalidData, "classification table: empty report");
  const CsvRow& h = rows.front();
  // 5 leading knn columns, M class columns, 3 nw columns, M class columns.
  if (h.size() < 10 || (h.size() - 8) % 2 != 0)
    fail(ErrorCode::Schema, "classification table: unexpected header '" + join_csv_row(h) + "'");
  const int m = static_cast<int>((h.size() - 8) / 2);
  const bool zero_one = m == 2 && h[5] == "knn_y1" && h[6] == "knn_y0";

  ClassificationTable out;
  out.coding = zero_one ? LabelCoding::ZeroOne : LabelCoding::Native;
  out.num_classes = m;
  const auto order = report_class_order(out.coding, m);
  CsvRow expected{"k1", "k2", "knn_k", "knn_k_prime", "knn_all"};
  for (int c : order) expected.push_back("knn_y" + std::to_string(file_label(c, out.coding)));
  expected.insert(expected.end(), {"nw_h", "nw_rho", "nw_all"});
  for (int c : order) expected.push_back("nw_y" + std::to_string(file_label(c, out.coding)));
  table_rows(text, expected, "classification table");

  const std::size_t nw0 = 5 + static_cast<std::size_t>(m);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ClassifyRow cr;
    cr.k1 = kernel_cell(row, 0, h, r);
    cr.k2 = kernel_cell(row, 1, h, r);
    cr.knn = {count(row, 2, h, r), count(row, 3, h, r), cr.k1, cr.k2};
    cr.knn_ccr.overall = num(row, 4, h, r);
    cr.nw = {num(row, nw0, h, r), num(row, nw0 + 1, h, r), cr.k1, cr.k2};
    cr.nw_ccr.overall = num(row, nw0 + 2, h, r);
    cr.knn_ccr.per_class.resize(static_cast<std::size_t>(m));
    cr.nw_ccr.per_class.resize(static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto j = static_cast<std::size_t>(order[i] - 1);
      cr.knn_ccr.per_class[j] = opt_num(row, 5 + i, h, r);
      cr.nw_ccr.per_class[j] = opt_num(row, nw0 + 3 + i, h, r);
    }
    out.rows.push_back(std::move(cr));
  }
  return out;
}

}  // namespace spknn
