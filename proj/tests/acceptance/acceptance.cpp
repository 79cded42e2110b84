// Acceptance run: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "benchmark.hpp"
#include "commands.hpp"
#include "csv.hpp"
#include "estimator.hpp"
#include "metrics.hpp"
#include "neighbors.hpp"
#include "reports.hpp"
#include "simulate.hpp"
#include "support.hpp"
#include "tuning.hpp"

using namespace spknn;
using testutil::uniform_int;
using testutil::uniform_vec;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Kernel random_kernel(Rng& rng) { return static_cast<Kernel>(rng.below(6)); }

Outcome bandwidth_oracle() {
  Rng rng(101);
  std::size_t mismatches = 0;
  const std::size_t instances = 1200;
  for (std::size_t t = 0; t < instances; ++t) {
    const std::size_t n = uniform_int(rng, 1, 500);
    const std::size_t dim = uniform_int(rng, 1, 4);
    std::vector<double> pts = uniform_vec(rng, n * dim);
    // coarse integer coordinates in a third of the cases so ties occur
    if (t % 3 == 0)
      for (auto& v : pts) v = std::floor(v * 4.0);
    std::vector<double> q = uniform_vec(rng, dim);
    if (t % 3 == 0)
      for (auto& v : q) v = std::floor(v * 4.0);
    const std::size_t k = uniform_int(rng, 1, n);
    const double got = knn_bandwidth(PointsView{pts, dim}, q, k).bandwidth;
    if (got != testutil::sorted_kth(pts, dim, q.data(), k)) ++mismatches;
  }
  return {mismatches == 0, std::to_string(instances) + " instances, " + std::to_string(mismatches) + " mismatches"};
}

Outcome weight_invariants() {
  Rng rng(202);
  const std::size_t datasets = 600;
  double worst_sum = 0.0, worst_affine = 0.0, worst_regress = 0.0;
  std::size_t out_of_range = 0;
  for (std::size_t t = 0; t < datasets; ++t) {
    const std::size_t n = uniform_int(rng, 2, 60);
    const auto data = testutil::random_dataset(rng, n, uniform_int(rng, 1, 3), uniform_int(rng, 1, 3));
    const auto& y = data.responses();
    KnnParams p{uniform_int(rng, 1, n - 1), uniform_int(rng, 1, n - 1), random_kernel(rng), random_kernel(rng)};

    std::vector<double> s0, x;
    std::vector<std::size_t> exclude;
    if (t % 2 == 0) {
      const std::size_t i = rng.below(n);
      const auto site = data.sites()[i];
      s0.assign(site.begin(), site.end());
      x.assign(data.covariate(i).begin(), data.covariate(i).end());
      exclude.push_back(i);
    } else {
      s0 = uniform_vec(rng, data.site_dim());
      x = uniform_vec(rng, data.cov_dim(), -1.0, 1.0);
    }

    const auto w = knn_weights(data, s0, x, p, exclude);
    if (w.normalized) {
      double sum = 0.0;
      for (double v : w.weights) sum += v;
      worst_sum = std::max(worst_sum, std::fabs(sum - 1.0));
    }
    const NwParams q{0.05 + rng.uniform(), 0.05 + rng.uniform(), random_kernel(rng), random_kernel(rng)};
    const auto wn = nw_weights(data, s0, x, q, exclude);
    if (wn.normalized) {
      double sum = 0.0;
      for (double v : wn.weights) sum += v;
      worst_sum = std::max(worst_sum, std::fabs(sum - 1.0));
    }

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      if (!exclude.empty() && exclude.front() == i) continue;
      lo = std::min(lo, y[i]);
      hi = std::max(hi, y[i]);
    }
    const double pred = predict(data, s0, x, p, exclude);
    const double pred_nw = predict_nw(data, s0, x, q, exclude);
    if (pred < lo || pred > hi) ++out_of_range;
    if (pred_nw < lo || pred_nw > hi) ++out_of_range;

    const double alpha = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.1 + 3.0 * rng.uniform());
    const double beta = -5.0 + 10.0 * rng.uniform();
    std::vector<double> y2(y);
    for (auto& v : y2) v = alpha * v + beta;
    const auto moved = data.with_responses(y2);
    worst_affine = std::max(worst_affine, std::fabs(predict(moved, s0, x, p, exclude) - (alpha * pred + beta)));
    worst_affine =
        std::max(worst_affine, std::fabs(predict_nw(moved, s0, x, q, exclude) - (alpha * pred_nw + beta)));

    worst_regress = std::max(worst_regress, std::fabs(regress(data, s0, x, p, exclude) - pred));
  }
  const bool pass = worst_sum <= 1e-10 && out_of_range == 0 && worst_affine <= 1e-9 && worst_regress <= 1e-12;
  return {pass, std::to_string(datasets) + " datasets, |sum-1| " + fmt("%.2e", worst_sum) + ", out of range " +
                    std::to_string(out_of_range) + ", affine " + fmt("%.2e", worst_affine) + ", regress-predict " +
                    fmt("%.2e", worst_regress)};
}

Outcome grf_fidelity() {
  const std::size_t side = 10;
  const double variance = 5.0, scale = 3.0;
  GrfSampler sampler({side, side}, scale);
  Rng rng(303);
  std::vector<std::vector<double>> fields;
  double mean = 0.0;
  for (int r = 0; r < 500; ++r) {
    fields.push_back(sampler.sample(0.0, variance, rng));
    for (double v : fields.back()) mean += v;
  }
  mean /= static_cast<double>(500 * side * side);

  struct Lag {
    std::size_t di, dj;
  };
  bool pass = std::fabs(mean) <= 0.15;
  std::string detail = "mean " + fmt("%.4f", mean);
  for (const Lag lag : {Lag{1, 0}, Lag{0, 1}, Lag{3, 0}}) {
    double acc = 0.0;
    std::size_t pairs = 0;
    for (const auto& f : fields)
      for (std::size_t i = 0; i + lag.di < side; ++i)
        for (std::size_t j = 0; j + lag.dj < side; ++j) {
          acc += (f[i * side + j] - mean) * (f[(i + lag.di) * side + j + lag.dj] - mean);
          ++pairs;
        }
    const double cov = acc / static_cast<double>(pairs);
    const double h[2] = {static_cast<double>(lag.di), static_cast<double>(lag.dj)};
    const double target = gaussian_cov(h, variance, scale);
    const double rel = std::fabs(cov - target) / target;
    pass = pass && rel <= 0.15;
    detail += fmt(", lag (%g,%g) %.3f vs %.3f", h[0], h[1], cov, target);
  }
  return {pass, detail};
}

Outcome table_direction() {
  bool pass = true;
  std::string detail;
  for (double z : {5.0, 0.1}) {
    for (double a : {5.0, 10.0, 20.0}) {
      BenchmarkOptions opt;
      opt.n_reps = 30;
      opt.base_seed = 1000;
      const auto res = benchmark_replications({25, 25, z, a}, opt);
      const bool better = res.knn.mean < res.nw.mean;
      const double p = res.ttest ? res.ttest->p_value : 1.0;
      const bool significant = z != 0.1 || p < 0.05;
      pass = pass && better && significant;
      if (!detail.empty()) detail += "; ";
      detail += fmt("s2=%g a=%g knn %.4f nw %.4f", z, a, res.knn.mean, res.nw.mean) + fmt(" p=%.3g", p);
      if (!better || !significant) detail += " [miss]";
    }
  }
  return {pass, detail};
}

Outcome convergence_trend() {
  const std::pair<std::size_t, std::size_t> shapes[] = {{15, 15}, {25, 25}, {35, 30}};
  std::vector<double> means;
  std::string detail;
  for (const auto& [rows, cols] : shapes) {
    DgpContext ctx(rows, cols, 5.0);
    std::vector<double> scores;
    for (std::uint64_t r = 0; r < 20; ++r) {
      const auto data = ctx.generate(0.1, 2000 + r);
      scores.push_back(cv_select_knn(data, with_defaults(ParamGrid{}, data)).score);
    }
    means.push_back(summarize(scores).mean);
    if (!detail.empty()) detail += " > ";
    detail += std::to_string(rows) + "x" + std::to_string(cols) + " " + fmt("%.4f", means.back());
  }
  return {means[0] > means[1] && means[1] > means[2], detail};
}

// Two classes, disjoint covariate supports, each class in its own spatial cluster.
SpatialDataset two_clusters(Rng& rng, std::size_t n) {
  std::vector<double> sites, cov;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const int c = i % 3 == 0 ? 2 : 1;
    const double cx = c == 1 ? 0.0 : 20.0;
    sites.push_back(cx + 10.0 * rng.uniform());
    sites.push_back(10.0 * rng.uniform());
    cov.push_back(c == 1 ? -rng.uniform() : 1.0 + rng.uniform());
    cov.push_back(rng.normal());
    labels.push_back(c);
  }
  return SpatialDataset(SiteSet(2, std::move(sites)), 2, std::move(cov), std::nullopt, std::move(labels));
}

Outcome classifier_sanity() {
  double worst = 1.0;
  std::size_t broken = 0;
  for (std::uint64_t run = 0; run < 10; ++run) {
    Rng rng(600 + run);
    const auto data = two_clusters(rng, 240);
    const auto split = stratified_split(data, 0.8, run);
    const auto train = data.subset(split.train);
    const auto test = data.subset(split.test);
    const auto grid = with_defaults(ParamGrid{}, train);
    const auto p = cv_select_knn_ccr(train, grid, 2).params;

    std::vector<int> swapped(train.labels());
    for (auto& l : swapped) l = 3 - l;
    const auto train_sw = train.with_labels(swapped);
    const auto p_sw = cv_select_knn_ccr(train_sw, grid, 2).params;
    if (!(p_sw == p)) ++broken;

    std::vector<int> pred(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
      pred[i] = classify(train, test.sites()[i], test.covariate(i), p, 2);
      const int pred_sw = classify(train_sw, test.sites()[i], test.covariate(i), p_sw, 2);
      const auto s = class_scores(train, test.sites()[i], test.covariate(i), p, 2);
      const auto s_sw = class_scores(train_sw, test.sites()[i], test.covariate(i), p_sw, 2);
      if (pred_sw != 3 - pred[i] || s_sw[0] != s[1] || s_sw[1] != s[0]) ++broken;
    }
    worst = std::min(worst, ccr(test.labels(), pred, 2).overall);
  }
  return {worst >= 0.95 && broken == 0,
          "10 runs, min test ccr " + fmt("%.4f", worst) + ", permutation mismatches " + std::to_string(broken)};
}

Outcome ttest_values() {
  const std::vector<double> a{1, 2, 3, 4, 5}, zero(5, 0.0);
  const auto r = paired_ttest(a, zero);
  const std::vector<double> b{1, -1, 2, -2}, zb(4, 0.0);
  const auto r0 = paired_ttest(b, zb);
  const bool pass =
      std::fabs(r.t - 4.24264) <= 1e-4 && std::fabs(r.p_value - 0.00660) <= 1e-4 && std::fabs(r0.p_value - 0.5) <= 1e-10;
  return {pass, fmt("t=%.6f p=%.6f p(0)=%.12f", r.t, r.p_value, r0.p_value)};
}

Outcome benchmark_reproducible(const fs::path& dir) {
  ExperimentConfig c;
  c.seed = 4242;
  c.threads = 1;
  c.shapes = {{12, 12}};
  c.z_variances = {0.1, 5.0};
  c.replications = 5;
  std::string reports[2], reps[2];
  for (int i = 0; i < 2; ++i) {
    c.output_path = (dir / ("bench_" + std::to_string(i) + ".csv")).string();
    const auto out = cmd_benchmark(c);
    if (out.exit_code != 0) return {false, "exit code " + std::to_string(out.exit_code)};
    reports[i] = read_text_file(c.output_path);
    reps[i] = read_text_file(dir / ("bench_" + std::to_string(i) + ".replications.csv"));
  }
  const bool pass = reports[0] == reports[1] && reps[0] == reps[1] && !reports[0].empty();
  return {pass, std::to_string(reports[0].size()) + "+" + std::to_string(reps[0].size()) + " bytes, " +
                    (pass ? "identical" : "differ")};
}

Outcome survey_dry_run(const fs::path& dir) {
  ExperimentConfig c;
  c.seed = 495;
  c.threads = 1;
  c.data_path = SPKNN_SURVEY_CSV;
  c.output_path = (dir / "survey.csv").string();
  set_config_value(c, "data.site_columns", "lon,lat");
  set_config_value(c, "data.covariate_columns", "depth,temperature,salinity,oxygen");
  set_config_value(c, "data.label_column", "presence");
  const auto out = cmd_classify(c);
  if (out.exit_code != 0) return {false, "exit code " + std::to_string(out.exit_code) + ": " + out.summary};

  const auto text = read_text_file(c.output_path);
  const auto table = parse_classification_table(text);
  const bool header = text.rfind("k1,k2,knn_k,knn_k_prime,knn_all,knn_y1,knn_y0,nw_h,nw_rho,nw_all,nw_y1,nw_y0\n", 0) == 0;

  std::vector<std::pair<Kernel, Kernel>> pairs;
  for (const auto& r : table.rows) pairs.emplace_back(r.k1, r.k2);
  std::sort(pairs.begin(), pairs.end());
  const bool all_pairs =
      table.rows.size() == 36 && std::unique(pairs.begin(), pairs.end()) == pairs.end();

  CsvSchema schema;
  schema.site_columns = {"lon", "lat"};
  schema.covariate_columns = {"depth", "temperature", "salinity", "oxygen"};
  schema.response_column.reset();
  schema.label_column = "presence";
  const auto data = read_dataset(SPKNN_SURVEY_CSV, schema);
  const auto split = stratified_split(data, c.train_fraction, *c.seed);
  std::vector<double> counts(2, 0.0);
  for (std::size_t i : split.test) counts[data.labels()[i] - 1] += 1.0;
  const double n = counts[0] + counts[1];

  double worst = 0.0;
  for (const auto& r : table.rows) {
    for (const CcrReport* rep : {&r.knn_ccr, &r.nw_ccr}) {
      if (rep->per_class.size() != 2 || !rep->per_class[0] || !rep->per_class[1]) {
        worst = std::numeric_limits<double>::infinity();
        continue;
      }
      const double combined = (counts[0] * *rep->per_class[0] + counts[1] * *rep->per_class[1]) / n;
      worst = std::max(worst, std::fabs(combined - rep->overall));
    }
  }
  const bool pass = header && all_pairs && data.size() >= 400 && worst <= 1e-12;
  return {pass, std::to_string(data.size()) + " stations, " + std::to_string(table.rows.size()) +
                    " kernel pairs, recombination error " + fmt("%.2e", worst)};
}

}  // namespace

int main() {
  const fs::path dir = testutil::temp_dir() / "acceptance";
  fs::create_directories(dir);

  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0: none
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "bandwidth oracle", 10.0, bandwidth_oracle},
      {2, "weight and predictor invariants", 0.0, weight_invariants},
      {3, "GRF fidelity", 60.0, grf_fidelity},
      {4, "Table 1 direction", 1800.0, table_direction},
      {5, "convergence trend", 0.0, convergence_trend},
      {6, "classifier sanity", 0.0, classifier_sanity},
      {7, "t-test values", 0.0, ttest_values},
      {8, "benchmark reproducibility", 0.0, [&] { return benchmark_reproducible(dir); }},
      {9, "survey classify dry run", 300.0, [&] { return survey_dry_run(dir); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt(", over budget %.0f s", c.budget_s);
    }
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  fs::remove_all(dir.parent_path());
  return failed == 0 ? 0 : 1;
}
