#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csv.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "reports.hpp"
#include "simulate.hpp"

namespace spknn {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::Config:
      return 1;
    case ErrorCode::InvalidState:
    case ErrorCode::InvalidData:
    case ErrorCode::Schema:
    case ErrorCode::Parse:
    case ErrorCode::Io:
      return 2;
    case ErrorCode::Numerical:
    case ErrorCode::Degenerate:
      return 3;
  }
  return 1;
}

namespace {

void note(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

// Writes `text` to the output path, or keeps it in the summary for stdout.
CommandOutcome finish(const ExperimentConfig& cfg, const std::string& text, const std::string& summary) {
  CommandOutcome out;
  if (cfg.output_path.empty()) {
    out.summary = text;
    if (!out.summary.empty() && out.summary.back() == '\n') out.summary.pop_back();
    return out;
  }
  write_text_file(cfg.output_path, text);
  out.summary = summary;
  out.report_path = cfg.output_path;
  return out;
}

SpatialDataset simulated(const ExperimentConfig& cfg) {
  DgpParams p;
  p.rows = cfg.shapes.front().first;
  p.cols = cfg.shapes.front().second;
  p.a = cfg.a_values.front();
  p.z_variance = cfg.z_variances.front();
  p.seed = *cfg.seed;
  return gen_dataset(p);
}

CsvSchema regression_schema(const ExperimentConfig& cfg) {
  CsvSchema s = cfg.schema;
  s.label_column.reset();
  return s;
}

SpatialDataset load_regression_data(const ExperimentConfig& cfg, const ProgressFn& progress) {
  if (cfg.data_path.empty()) {
    note(progress, "simulating training data");
    return simulated(cfg);
  }
  auto schema = regression_schema(cfg);
  if (!schema.response_column) fail(ErrorCode::Schema, "no response column configured (data.response_column)");
  return read_dataset(cfg.data_path, schema);
}

std::string knn_line(const KnnParams& p) {
  return "k=" + std::to_string(p.k) + " k_prime=" + std::to_string(p.k_prime) + " k1=" +
         std::string(kernel_name(p.k1)) + " k2=" + std::string(kernel_name(p.k2));
}

std::string nw_line(const NwParams& p) {
  return "h=" + format_double(p.h) + " rho=" + format_double(p.rho) + " k1=" + std::string(kernel_name(p.k1)) +
         " k2=" + std::string(kernel_name(p.k2));
}

bool use_knn(const ExperimentConfig& cfg) { return cfg.methods != MethodSet::Nw; }
bool use_nw(const ExperimentConfig& cfg) { return cfg.methods != MethodSet::Knn; }

int class_count(const SpatialDataset& d) {
  return d.label_coding() == LabelCoding::ZeroOne ? std::max(2, d.max_label()) : d.max_label();
}

}  // namespace

CommandOutcome cmd_simulate(const ExperimentConfig& cfg, const ProgressFn& progress) {
  validate_config(cfg, Mode::Simulate);
  note(progress, "simulating " + std::to_string(cfg.shapes.front().first) + "x" +
                     std::to_string(cfg.shapes.front().second) + " dataset");
  const auto data = simulated(cfg);
  CsvSchema schema = regression_schema(cfg);
  if (schema.site_columns.size() != 2) schema.site_columns = {"s1", "s2"};
  if (schema.covariate_columns.size() != 1) schema.covariate_columns = {"x"};
  if (!schema.response_column) schema.response_column = "y";
  write_dataset(data, cfg.output_path, schema);
  CommandOutcome out;
  out.summary = "wrote " + std::to_string(data.size()) + " sites to " + cfg.output_path;
  out.report_path = cfg.output_path;
  return out;
}

CommandOutcome cmd_cv(const ExperimentConfig& cfg, const ProgressFn& progress) {
  validate_config(cfg, Mode::Cv);
  const auto data = load_regression_data(cfg, progress);
  const auto grid = with_defaults(effective_grid(cfg, Mode::Cv), data);
  const unsigned threads = resolve_threads(cfg.threads);

  std::string text = "method,k,k_prime,h,rho,k1,k2,loo_mae,candidates\n";
  std::string summary;
  if (use_knn(cfg)) {
    note(progress, "kNN grid search over " + std::to_string(expand_knn(grid).size()) + " candidates");
    const auto s = cv_select_knn(data, grid, threads);
    text += join_csv_row({"knn", std::to_string(s.params.k), std::to_string(s.params.k_prime), "", "",
                          std::string(kernel_name(s.params.k1)), std::string(kernel_name(s.params.k2)),
                          format_double(s.score), std::to_string(s.candidates.size())}) +
            "\n";
    summary += "knn: " + knn_line(s.params) + " loo_mae=" + format_double(s.score);
  }
  if (use_nw(cfg)) {
    note(progress, "NW grid search over " + std::to_string(expand_nw(grid).size()) + " candidates");
    const auto s = cv_select_nw(data, grid, threads);
    text += join_csv_row({"nw", "", "", format_double(s.params.h), format_double(s.params.rho),
                          std::string(kernel_name(s.params.k1)), std::string(kernel_name(s.params.k2)),
                          format_double(s.score), std::to_string(s.candidates.size())}) +
            "\n";
    if (!summary.empty()) summary += "; ";
    summary += "nw: " + nw_line(s.params) + " loo_mae=" + format_double(s.score);
  }
  return finish(cfg, text, summary);
}

CommandOutcome cmd_predict(const ExperimentConfig& cfg, const ProgressFn& progress) {
  validate_config(cfg, Mode::Predict);
  const auto train = load_regression_data(cfg, progress);
  CsvSchema qschema = regression_schema(cfg);
  const auto header = read_header(cfg.query_path, qschema.delimiter);
  if (qschema.response_column &&
      std::find(header.begin(), header.end(), *qschema.response_column) == header.end())
    qschema.response_column.reset();
  const auto query = read_dataset(cfg.query_path, qschema);
  if (query.site_dim() != train.site_dim() || query.cov_dim() != train.cov_dim())
    fail(ErrorCode::InvalidData, "query sites/covariates do not match the training data dimensions");

  const auto grid = with_defaults(effective_grid(cfg, Mode::Predict), train);
  const unsigned threads = resolve_threads(cfg.threads);
  const std::size_t m = query.size();

  std::vector<double> knn_pred, nw_pred;
  std::string summary;
  if (use_knn(cfg)) {
    const auto cands = expand_knn(grid);
    if (cands.empty()) fail(ErrorCode::InvalidArgument, "kNN parameter grid is empty");
    KnnParams p = cands.front();
    if (cands.size() > 1) {
      note(progress, "selecting kNN parameters by leave-one-out");
      p = cv_select_knn(train, grid, threads).params;
    }
    knn_pred.resize(m);
    parallel_for(m, threads, [&](std::size_t i) {
      knn_pred[i] = predict(train, query.sites()[i], query.covariate(i), p);
    });
    summary += "knn: " + knn_line(p);
    if (query.has_responses()) summary += " mae=" + format_double(mae(query.responses(), knn_pred));
  }
  if (use_nw(cfg)) {
    const auto cands = expand_nw(grid);
    if (cands.empty()) fail(ErrorCode::InvalidArgument, "NW parameter grid is empty");
    NwParams p = cands.front();
    if (cands.size() > 1) {
      note(progress, "selecting NW parameters by leave-one-out");
      p = cv_select_nw(train, grid, threads).params;
    }
    nw_pred.resize(m);
    parallel_for(m, threads, [&](std::size_t i) {
      nw_pred[i] = predict_nw(train, query.sites()[i], query.covariate(i), p);
    });
    if (!summary.empty()) summary += "; ";
    summary += "nw: " + nw_line(p);
    if (query.has_responses()) summary += " mae=" + format_double(mae(query.responses(), nw_pred));
  }

  CsvRow head{"index"};
  for (const auto& c : qschema.site_columns) head.push_back(c);
  if (query.has_responses()) head.push_back(*qschema.response_column);
  if (use_knn(cfg)) head.push_back("knn_pred");
  if (use_nw(cfg)) head.push_back("nw_pred");
  std::string text = join_csv_row(head) + "\n";
  for (std::size_t i = 0; i < m; ++i) {
    CsvRow row{std::to_string(i)};
    for (double v : query.sites()[i]) row.push_back(format_double(v));
    if (query.has_responses()) row.push_back(format_double(query.responses()[i]));
    if (use_knn(cfg)) row.push_back(format_double(knn_pred[i]));
    if (use_nw(cfg)) row.push_back(format_double(nw_pred[i]));
    text += join_csv_row(row) + "\n";
  }
  return finish(cfg, text, summary + " (" + std::to_string(m) + " predictions)");
}

CommandOutcome cmd_classify(const ExperimentConfig& cfg, const ProgressFn& progress) {
  validate_config(cfg, Mode::Classify);
  CsvSchema schema = cfg.schema;
  schema.response_column.reset();
  const auto data = read_dataset(cfg.data_path, schema);
  const int num_classes = class_count(data);
  if (num_classes < 2) fail(ErrorCode::InvalidData, "classification needs at least two classes");

  const auto split = stratified_split(data, cfg.train_fraction, *cfg.seed);
  for (const auto& w : split.warnings) note(progress, "warning: " + w);
  if (split.test.empty()) fail(ErrorCode::InvalidData, "stratified split left no test observations");
  const auto train = data.subset(split.train);
  const auto test = data.subset(split.test);
  note(progress, "split: " + std::to_string(train.size()) + " train, " + std::to_string(test.size()) + " test");

  const ParamGrid base = effective_grid(cfg, Mode::Classify);
  const unsigned threads = resolve_threads(cfg.threads);
  const auto& truth = test.labels();

  std::vector<ClassifyRow> rows;
  for (Kernel k1 : base.k1_specs) {
    for (Kernel k2 : base.k2_specs) {
      ParamGrid g = base;
      g.k1_specs = {k1};
      g.k2_specs = {k2};
      g = with_defaults(g, train);
      note(progress, "kernels " + std::string(kernel_name(k1)) + "/" + std::string(kernel_name(k2)));

      ClassifyRow row;
      row.k1 = k1;
      row.k2 = k2;
      row.knn = cv_select_knn_ccr(train, g, num_classes, threads).params;
      row.nw = cv_select_nw_ccr(train, g, num_classes, threads).params;

      std::vector<int> knn_pred(test.size()), nw_pred(test.size());
      parallel_for(test.size(), threads, [&](std::size_t i) {
        knn_pred[i] = classify(train, test.sites()[i], test.covariate(i), row.knn, num_classes);
        nw_pred[i] = classify_nw(train, test.sites()[i], test.covariate(i), row.nw, num_classes);
      });
      row.knn_ccr = ccr(truth, knn_pred, num_classes);
      row.nw_ccr = ccr(truth, nw_pred, num_classes);
      rows.push_back(std::move(row));
    }
  }

  const auto best = std::max_element(rows.begin(), rows.end(), [](const ClassifyRow& a, const ClassifyRow& b) {
    return a.knn_ccr.overall < b.knn_ccr.overall;
  });
  std::string summary = std::to_string(rows.size()) + " kernel pairs, " + std::to_string(test.size()) +
                        " test sites; best knn " + std::string(kernel_name(best->k1)) + "/" +
                        std::string(kernel_name(best->k2)) + " ccr=" + format_double(best->knn_ccr.overall) +
                        " (nw " + format_double(best->nw_ccr.overall) + ")";
  if (data.label_coding() == LabelCoding::ZeroOne) summary += "; labels 0/1 mapped to classes 1/2";
  return finish(cfg, render_classification_table(rows, data.label_coding(), num_classes), summary);
}

CommandOutcome cmd_benchmark(const ExperimentConfig& cfg, const ProgressFn& progress) {
  if (!cfg.seed) fail(ErrorCode::Config, "missing required key 'seed' (benchmark requires --seed)");
  validate_config(cfg, Mode::Benchmark);
  const ParamGrid grid = effective_grid(cfg, Mode::Benchmark);

  std::vector<BenchmarkRow> table;
  std::vector<ReplicationRow> reps;
  for (const auto& [rows, cols] : cfg.shapes) {
    for (double z : cfg.z_variances) {
      for (double a : cfg.a_values) {
        BenchmarkOptions opt;
        opt.n_reps = cfg.replications;
        opt.base_seed = *cfg.seed;
        opt.grid = grid;
        opt.threads = resolve_threads(cfg.threads);
        opt.progress = progress;
        const BenchmarkCell cell{rows, cols, z, a};
        const auto res = benchmark_replications(cell, opt);
        if (!res.degenerate_reason.empty()) note(progress, "warning: " + res.degenerate_reason);

        BenchmarkRow b;
        b.rows = rows;
        b.cols = cols;
        b.z_variance = z;
        b.a = a;
        b.replications = cfg.replications;
        b.kernel_mean = res.nw.mean;
        b.kernel_sd = res.nw.sd;
        b.knn_mean = res.knn.mean;
        b.knn_sd = res.knn.sd;
        b.t_stat = res.nw.t_stat;
        b.p_value = res.nw.p_value;
        table.push_back(b);

        for (std::size_t r = 0; r < cfg.replications; ++r) {
          ReplicationRow rr;
          rr.rows = rows;
          rr.cols = cols;
          rr.z_variance = z;
          rr.a = a;
          rr.replication = r + 1;
          rr.seed = *cfg.seed + r;
          rr.knn_mae = res.knn.per_replication[r];
          rr.kernel_mae = res.nw.per_replication[r];
          rr.knn = res.knn_selected[r];
          rr.nw = res.nw_selected[r];
          reps.push_back(rr);
        }
      }
    }
  }

  std::string summary;
  for (const auto& b : table) {
    std::ostringstream line;
    line << b.rows << "x" << b.cols << " sigma2=" << format_double(b.z_variance) << " a=" << format_double(b.a)
         << ": kernel " << format_double(b.kernel_mean) << " knn " << format_double(b.knn_mean) << " p="
         << (b.p_value ? format_double(*b.p_value) : std::string("n/a"));
    if (!summary.empty()) summary += "\n";
    summary += line.str();
  }
  auto out = finish(cfg, render_benchmark_table(table), summary);
  if (!cfg.output_path.empty()) {
    std::filesystem::path p(cfg.output_path);
    const auto reps_path = p.parent_path() / (p.stem().string() + ".replications.csv");
    write_text_file(reps_path, render_replication_table(reps));
  }
  return out;
}

CommandOutcome run_command(Mode mode, const ExperimentConfig& cfg, const ProgressFn& progress) {
  try {
    switch (mode) {
      case Mode::Simulate: return cmd_simulate(cfg, progress);
      case Mode::Cv: return cmd_cv(cfg, progress);
      case Mode::Predict: return cmd_predict(cfg, progress);
      case Mode::Classify: return cmd_classify(cfg, progress);
      case Mode::Benchmark: return cmd_benchmark(cfg, progress);
    }
    fail(ErrorCode::InvalidArgument, "unknown mode");
  } catch (const Error& e) {
    return {exit_code_for(e.code()), e.what(), {}};
  } catch (const std::bad_alloc&) {
    return {3, "out of memory", {}};
  } catch (const std::exception& e) {
    return {1, e.what(), {}};
  }
}

}  // namespace spknn
