#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "tuning.hpp"

namespace spknn {

struct BenchmarkCell {
  std::size_t rows = 25;
  std::size_t cols = 25;
  double z_variance = 0.1;
  double a = 5.0;
};

using ProgressFn = std::function<void(const std::string&)>;

struct BenchmarkOptions {
  std::size_t n_reps = 30;
  std::uint64_t base_seed = 0;
  // Empty k/k'/h/rho lists are filled per replication from the dataset.
  ParamGrid grid;
  unsigned threads = 1;
  ProgressFn progress;
};

struct BenchmarkResult {
  EvalReport knn;
  EvalReport nw;
  // Paired one-sided test of NW MAE > kNN MAE; empty when degenerate.
  std::optional<TTestResult> ttest;
  std::string degenerate_reason;
  std::vector<KnnParams> knn_selected;
  std::vector<NwParams> nw_selected;
};

// Replication r uses dataset seed base_seed + r, runs LOO CV for both methods
// and records the selected LOO MAE.
BenchmarkResult benchmark_replications(const BenchmarkCell& cell, const BenchmarkOptions& opt);

}  // namespace spknn
