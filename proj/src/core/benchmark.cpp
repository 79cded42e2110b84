#include "benchmark.hpp"

#include <mutex>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"
#include "simulate.hpp"

namespace spknn {

BenchmarkResult benchmark_replications(const BenchmarkCell& cell, const BenchmarkOptions& opt) {
  require(opt.n_reps >= 2, "benchmark needs at least 2 replications for the paired t-test");
  require(cell.a > 0.0, "dependence radius a must be positive");
  require(cell.z_variance > 0.0, "Z-field variance must be positive");
  const DgpContext ctx(cell.rows, cell.cols, cell.a);

  const std::size_t reps = opt.n_reps;
  std::vector<double> knn_mae(reps);
  std::vector<double> nw_mae(reps);
  std::vector<KnnParams> knn_sel(reps);
  std::vector<NwParams> nw_sel(reps);

  std::mutex progress_mutex;
  // Replications run in parallel; each one is single-threaded inside.
  parallel_for(reps, opt.threads, [&](std::size_t r) {
    try {
      const auto data = ctx.generate(cell.z_variance, opt.base_seed + r);
      const auto grid = with_defaults(opt.grid, data);
      const auto knn = cv_select_knn(data, grid, 1);
      const auto nw = cv_select_nw(data, grid, 1);
      knn_mae[r] = knn.score;
      nw_mae[r] = nw.score;
      knn_sel[r] = knn.params;
      nw_sel[r] = nw.params;
    } catch (const Error& e) {
      throw Error(e.code(), "replication " + std::to_string(r) + ": " + e.what());
    }
    if (opt.progress) {
      std::ostringstream msg;
      msg << cell.rows << "x" << cell.cols << " z_variance=" << cell.z_variance << " a=" << cell.a
          << " replication " << (r + 1) << "/" << reps;
      std::lock_guard lock(progress_mutex);
      opt.progress(msg.str());
    }
  });

  BenchmarkResult out;
  out.knn = summarize(knn_mae);
  out.nw = summarize(nw_mae);
  out.knn_selected = std::move(knn_sel);
  out.nw_selected = std::move(nw_sel);
  try {
    out.ttest = paired_ttest(nw_mae, knn_mae);
    out.nw.t_stat = out.ttest->t;
    out.nw.p_value = out.ttest->p_value;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Degenerate) throw;
    out.degenerate_reason = e.what();
  }
  return out;
}

}  // namespace spknn
