#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dataset.hpp"
#include "estimator.hpp"
#include "metrics.hpp"

namespace spknn {

// EvalReport as `key,value`: one row per replication (key = 1-based index),
// then mean, sd and, when present, t_stat and p_value.
std::string render_eval_report(const EvalReport& report);
EvalReport parse_eval_report(std::string_view text);

// CcrReport as `class,file_label,count,ccr`: one row per class, then the
// `all` row. file_label is the label value as stored in data files.
std::string render_ccr_report(const CcrReport& report, LabelCoding coding);
CcrReport parse_ccr_report(std::string_view text);

struct BenchmarkRow {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double z_variance = 0.0;
  double a = 0.0;
  std::size_t replications = 0;
  double kernel_mean = 0.0;
  double kernel_sd = 0.0;
  double knn_mean = 0.0;
  double knn_sd = 0.0;
  // empty when the paired test was degenerate
  std::optional<double> t_stat;
  std::optional<double> p_value;

  friend bool operator==(const BenchmarkRow&, const BenchmarkRow&) = default;
};

std::string render_benchmark_table(std::span<const BenchmarkRow> rows);
std::vector<BenchmarkRow> parse_benchmark_table(std::string_view text);

struct ReplicationRow {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double z_variance = 0.0;
  double a = 0.0;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  double knn_mae = 0.0;
  double kernel_mae = 0.0;
  KnnParams knn;
  NwParams nw;
};

std::string render_replication_table(std::span<const ReplicationRow> rows);

struct ClassifyRow {
  Kernel k1 = Kernel::Epanechnikov;
  Kernel k2 = Kernel::Parzen;
  KnnParams knn;
  CcrReport knn_ccr;
  NwParams nw;
  CcrReport nw_ccr;
};

// Columns k1,k2,knn_k,knn_k_prime,knn_all,knn_y<label>...,nw_h,nw_rho,
// nw_all,nw_y<label>.... Per-class columns are named after the file labels:
// y1,y0 for 0/1 files, y1..yM otherwise.
std::string render_classification_table(std::span<const ClassifyRow> rows, LabelCoding coding,
                                        int num_classes);

struct ClassificationTable {
  LabelCoding coding = LabelCoding::Native;
  int num_classes = 0;
  std::vector<ClassifyRow> rows;
};
ClassificationTable parse_classification_table(std::string_view text);

// File label of internal class c.
inline int file_label(int c, LabelCoding coding) { return coding == LabelCoding::ZeroOne ? c - 1 : c; }

// Internal classes in report column order: presence first for 0/1 files.
std::vector<int> report_class_order(LabelCoding coding, int num_classes);

}  // namespace spknn
