#include "spknn/spknn.h"

#include <cstring>
#include <new>
#include <string>

#include "commands.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "estimator.hpp"
#include "kernels.hpp"
#include "metrics.hpp"
#include "neighbors.hpp"
#include "simulate.hpp"
#include "tuning.hpp"

struct spknn_dataset {
  spknn::SpatialDataset data;
};

struct spknn_config {
  spknn::ExperimentConfig cfg;
};

struct spknn_outcome {
  int exit_code = 0;
  std::string summary;
  std::string report_path;
};

namespace {

thread_local std::string g_last_error;

spknn_status status_of(spknn::ErrorCode c) {
  using spknn::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return SPKNN_E_INVALID_ARGUMENT;
    case ErrorCode::InvalidState: return SPKNN_E_INVALID_STATE;
    case ErrorCode::InvalidData: return SPKNN_E_INVALID_DATA;
    case ErrorCode::Schema: return SPKNN_E_SCHEMA;
    case ErrorCode::Parse: return SPKNN_E_PARSE;
    case ErrorCode::Io: return SPKNN_E_IO;
    case ErrorCode::Config: return SPKNN_E_CONFIG;
    case ErrorCode::Numerical: return SPKNN_E_NUMERICAL;
    case ErrorCode::Degenerate: return SPKNN_E_DEGENERATE;
  }
  return SPKNN_E_INTERNAL;
}

spknn_status set_error(spknn_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

template <class Fn>
spknn_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SPKNN_OK;
  } catch (const spknn::Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SPKNN_E_OUT_OF_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SPKNN_E_INTERNAL, e.what());
  } catch (...) {
    return set_error(SPKNN_E_INTERNAL, "unknown exception");
  }
}

void need(const void* p, const char* name) {
  if (!p) spknn::fail(spknn::ErrorCode::InvalidArgument, std::string(name) + " is NULL");
}

spknn::Kernel to_kernel(spknn_kernel k) {
  const auto i = static_cast<int>(k);
  if (i < 0 || i >= static_cast<int>(spknn::kAllKernels.size()))
    spknn::fail(spknn::ErrorCode::InvalidArgument, "unknown kernel id " + std::to_string(i));
  return spknn::kAllKernels[static_cast<std::size_t>(i)];
}

spknn_kernel from_kernel(spknn::Kernel k) { return static_cast<spknn_kernel>(static_cast<int>(k)); }

spknn::KnnParams to_params(const spknn_knn_params* p) {
  need(p, "params");
  return {p->k, p->k_prime, to_kernel(p->k1), to_kernel(p->k2)};
}

spknn::NwParams to_params(const spknn_nw_params* p) {
  need(p, "params");
  return {p->h, p->rho, to_kernel(p->k1), to_kernel(p->k2)};
}

spknn::CsvSchema to_schema(const spknn_csv_schema* s) {
  spknn::CsvSchema out;
  if (!s) return out;
  out.site_columns.clear();
  out.covariate_columns.clear();
  for (std::size_t i = 0; i < s->n_site_columns; ++i) {
    need(s->site_columns[i], "site column name");
    out.site_columns.emplace_back(s->site_columns[i]);
  }
  for (std::size_t i = 0; i < s->n_covariate_columns; ++i) {
    need(s->covariate_columns[i], "covariate column name");
    out.covariate_columns.emplace_back(s->covariate_columns[i]);
  }
  out.response_column = s->response_column ? std::optional<std::string>(s->response_column) : std::nullopt;
  out.label_column = s->label_column ? std::optional<std::string>(s->label_column) : std::nullopt;
  out.delimiter = s->delimiter ? s->delimiter : ',';
  return out;
}

std::span<const double> site_of(const spknn_dataset* d, const double* s0) {
  return {s0, d->data.site_dim()};
}
std::span<const double> cov_of(const spknn_dataset* d, const double* x) { return {x, d->data.cov_dim()}; }

void copy_string(const std::string& s, char* buf, std::size_t cap, std::size_t* needed) {
  if (needed) *needed = s.size();
  if (cap == 0) return;
  need(buf, "buf");
  const std::size_t n = std::min(cap - 1, s.size());
  std::memcpy(buf, s.data(), n);
  buf[n] = '\0';
}

}  // namespace

extern "C" {

const char* spknn_version(void) { return "1.0.0"; }

const char* spknn_last_error(void) { return g_last_error.c_str(); }

const char* spknn_status_name(spknn_status s) {
  switch (s) {
    case SPKNN_OK: return "ok";
    case SPKNN_E_INVALID_ARGUMENT: return "invalid argument";
    case SPKNN_E_INVALID_STATE: return "invalid state";
    case SPKNN_E_INVALID_DATA: return "invalid data";
    case SPKNN_E_SCHEMA: return "schema error";
    case SPKNN_E_PARSE: return "parse error";
    case SPKNN_E_IO: return "i/o error";
    case SPKNN_E_CONFIG: return "configuration error";
    case SPKNN_E_NUMERICAL: return "numerical failure";
    case SPKNN_E_DEGENERATE: return "degenerate input";
    case SPKNN_E_OUT_OF_MEMORY: return "out of memory";
    case SPKNN_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

int spknn_exit_code(spknn_status s) {
  switch (s) {
    case SPKNN_OK: return 0;
    case SPKNN_E_INVALID_ARGUMENT:
    case SPKNN_E_CONFIG:
    case SPKNN_E_INTERNAL:
      return 1;
    case SPKNN_E_INVALID_STATE:
    case SPKNN_E_INVALID_DATA:
    case SPKNN_E_SCHEMA:
    case SPKNN_E_PARSE:
    case SPKNN_E_IO:
      return 2;
    case SPKNN_E_NUMERICAL:
    case SPKNN_E_DEGENERATE:
    case SPKNN_E_OUT_OF_MEMORY:
      return 3;
  }
  return 1;
}

const char* spknn_kernel_name(spknn_kernel k) {
  const auto i = static_cast<int>(k);
  if (i < 0 || i >= static_cast<int>(spknn::kAllKernels.size())) return nullptr;
  // names are string literals
  return spknn::kernel_name(spknn::kAllKernels[static_cast<std::size_t>(i)]).data();
}

spknn_status spknn_kernel_from_name(const char* name, spknn_kernel* out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    const auto k = spknn::kernel_from_name(name);
    if (!k) spknn::fail(spknn::ErrorCode::InvalidArgument, std::string("unknown kernel '") + name + "'");
    *out = from_kernel(*k);
  });
}

spknn_status spknn_kernel_eval(spknn_kernel k, double u, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = spknn::eval_scalar(to_kernel(k), u);
  });
}

spknn_status spknn_knn_bandwidth(const double* points, size_t n, size_t dim, const double* query, size_t k,
                                 double* out) {
  return guarded([&] {
    need(out, "out");
    need(query, "query");
    if (n > 0) need(points, "points");
    spknn::require(dim > 0, "dimension must be positive");
    const spknn::PointsView view{{points, n * dim}, dim};
    *out = spknn::knn_bandwidth(view, {query, dim}, k).bandwidth;
  });
}

spknn_status spknn_dataset_create(size_t n, size_t site_dim, const double* sites, size_t cov_dim,
                                  const double* covariates, const double* responses, const int* labels,
                                  spknn_dataset** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    if (n > 0) {
      need(sites, "sites");
      need(covariates, "covariates");
    }
    std::optional<std::vector<double>> y;
    if (responses) y.emplace(responses, responses + n);
    std::optional<std::vector<int>> l;
    if (labels) l.emplace(labels, labels + n);
    spknn::SiteSet s(site_dim, std::vector<double>(sites, sites + n * site_dim));
    *out = new spknn_dataset{spknn::SpatialDataset(std::move(s), cov_dim,
                                                   std::vector<double>(covariates, covariates + n * cov_dim),
                                                   std::move(y), std::move(l))};
  });
}

spknn_status spknn_dataset_read_csv(const char* path, const spknn_csv_schema* schema, spknn_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new spknn_dataset{spknn::read_dataset(path, to_schema(schema))};
  });
}

spknn_status spknn_dataset_write_csv(const spknn_dataset* data, const char* path, const spknn_csv_schema* schema) {
  return guarded([&] {
    need(data, "data");
    need(path, "path");
    spknn::write_dataset(data->data, path, to_schema(schema));
  });
}

void spknn_dataset_free(spknn_dataset* data) { delete data; }

size_t spknn_dataset_size(const spknn_dataset* d) { return d ? d->data.size() : 0; }
size_t spknn_dataset_site_dim(const spknn_dataset* d) { return d ? d->data.site_dim() : 0; }
size_t spknn_dataset_cov_dim(const spknn_dataset* d) { return d ? d->data.cov_dim() : 0; }
int spknn_dataset_has_responses(const spknn_dataset* d) { return d && d->data.has_responses() ? 1 : 0; }

int spknn_dataset_num_classes(const spknn_dataset* d) {
  if (!d || !d->data.has_labels()) return 0;
  if (d->data.label_coding() == spknn::LabelCoding::ZeroOne) return std::max(2, d->data.max_label());
  return d->data.max_label();
}

spknn_status spknn_dataset_row(const spknn_dataset* d, size_t i, double* site, double* covariate,
                               double* response, int* label) {
  return guarded([&] {
    need(d, "data");
    spknn::require(i < d->data.size(), "row index out of range");
    if (site) {
      const auto s = d->data.sites()[i];
      std::copy(s.begin(), s.end(), site);
    }
    if (covariate) {
      const auto x = d->data.covariate(i);
      std::copy(x.begin(), x.end(), covariate);
    }
    if (response) *response = d->data.responses()[i];
    if (label) *label = d->data.labels()[i];
  });
}

spknn_status spknn_simulate(size_t rows, size_t cols, double a, double z_variance, uint64_t seed,
                            spknn_dataset** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    spknn::DgpParams p;
    p.rows = rows;
    p.cols = cols;
    p.a = a;
    p.z_variance = z_variance;
    p.seed = seed;
    *out = new spknn_dataset{spknn::gen_dataset(p)};
  });
}

spknn_status spknn_predict_knn(const spknn_dataset* d, const double* s0, const double* x,
                               const spknn_knn_params* p, double* out) {
  return guarded([&] {
    need(d, "data");
    need(s0, "s0");
    need(x, "x");
    need(out, "out");
    *out = spknn::predict(d->data, site_of(d, s0), cov_of(d, x), to_params(p));
  });
}

spknn_status spknn_predict_nw(const spknn_dataset* d, const double* s0, const double* x, const spknn_nw_params* p,
                              double* out) {
  return guarded([&] {
    need(d, "data");
    need(s0, "s0");
    need(x, "x");
    need(out, "out");
    *out = spknn::predict_nw(d->data, site_of(d, s0), cov_of(d, x), to_params(p));
  });
}

spknn_status spknn_classify_knn(const spknn_dataset* d, const double* s0, const double* x,
                                const spknn_knn_params* p, int num_classes, int* out) {
  return guarded([&] {
    need(d, "data");
    need(s0, "s0");
    need(x, "x");
    need(out, "out");
    *out = spknn::classify(d->data, site_of(d, s0), cov_of(d, x), to_params(p), num_classes);
  });
}

spknn_status spknn_classify_nw(const spknn_dataset* d, const double* s0, const double* x,
                               const spknn_nw_params* p, int num_classes, int* out) {
  return guarded([&] {
    need(d, "data");
    need(s0, "s0");
    need(x, "x");
    need(out, "out");
    *out = spknn::classify_nw(d->data, site_of(d, s0), cov_of(d, x), to_params(p), num_classes);
  });
}

spknn_status spknn_loo_mae_knn(const spknn_dataset* d, const spknn_knn_params* p, unsigned threads, double* out) {
  return guarded([&] {
    need(d, "data");
    need(out, "out");
    *out = spknn::loo_score(d->data, to_params(p), threads);
  });
}

spknn_status spknn_loo_mae_nw(const spknn_dataset* d, const spknn_nw_params* p, unsigned threads, double* out) {
  return guarded([&] {
    need(d, "data");
    need(out, "out");
    *out = spknn::loo_score(d->data, to_params(p), threads);
  });
}

spknn_status spknn_cv_select_knn(const spknn_dataset* d, const size_t* k_values, size_t n_k,
                                 const size_t* k_prime_values, size_t n_k_prime, unsigned threads,
                                 spknn_knn_params* best, double* score) {
  return guarded([&] {
    need(d, "data");
    need(best, "best");
    if (n_k) need(k_values, "k_values");
    if (n_k_prime) need(k_prime_values, "k_prime_values");
    spknn::ParamGrid g;
    g.k_values.assign(k_values, k_values + n_k);
    g.k_prime_values.assign(k_prime_values, k_prime_values + n_k_prime);
    g = spknn::with_defaults(g, d->data);
    const auto s = spknn::cv_select_knn(d->data, g, threads);
    *best = {s.params.k, s.params.k_prime, from_kernel(s.params.k1), from_kernel(s.params.k2)};
    if (score) *score = s.score;
  });
}

spknn_status spknn_cv_select_nw(const spknn_dataset* d, const double* h_values, size_t n_h,
                                const double* rho_values, size_t n_rho, unsigned threads, spknn_nw_params* best,
                                double* score) {
  return guarded([&] {
    need(d, "data");
    need(best, "best");
    if (n_h) need(h_values, "h_values");
    if (n_rho) need(rho_values, "rho_values");
    spknn::ParamGrid g;
    g.h_values.assign(h_values, h_values + n_h);
    g.rho_values.assign(rho_values, rho_values + n_rho);
    g = spknn::with_defaults(g, d->data);
    const auto s = spknn::cv_select_nw(d->data, g, threads);
    *best = {s.params.h, s.params.rho, from_kernel(s.params.k1), from_kernel(s.params.k2)};
    if (score) *score = s.score;
  });
}

spknn_status spknn_paired_ttest(const double* a, const double* b, size_t n, double* t, double* p) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    const auto r = spknn::paired_ttest({a, n}, {b, n});
    if (t) *t = r.t;
    if (p) *p = r.p_value;
  });
}

spknn_status spknn_student_t_cdf(double t, double df, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = spknn::student_t_cdf(t, df);
  });
}

spknn_status spknn_config_new(spknn_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new spknn_config{};
  });
}

spknn_status spknn_config_parse_file(const char* path, spknn_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new spknn_config{spknn::parse_config(path)};
  });
}

spknn_status spknn_config_parse_text(const char* text, spknn_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = nullptr;
    *out = new spknn_config{spknn::parse_config_text(text)};
  });
}

spknn_status spknn_config_set(spknn_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(value, "value");
    spknn::set_config_value(cfg->cfg, key, value);
  });
}

spknn_status spknn_config_get(const spknn_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    copy_string(spknn::get_config_value(cfg->cfg, key), buf, cap, needed);
  });
}

spknn_status spknn_config_render(const spknn_config* cfg, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    need(cfg, "cfg");
    copy_string(spknn::render_config(cfg->cfg), buf, cap, needed);
  });
}

void spknn_config_free(spknn_config* cfg) { delete cfg; }

spknn_status spknn_run(const spknn_config* cfg, const char* mode, spknn_progress_fn progress, void* user,
                       spknn_outcome** out) {
  spknn_status status = SPKNN_OK;
  spknn_outcome result;
  const spknn_status arg = guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = nullptr;
  });
  if (arg != SPKNN_OK) return arg;

  status = guarded([&] {
    std::optional<spknn::Mode> m = cfg->cfg.mode;
    if (mode) {
      m = spknn::mode_from_name(mode);
      if (!m) spknn::fail(spknn::ErrorCode::InvalidArgument, std::string("unknown mode '") + mode + "'");
    }
    if (!m) spknn::fail(spknn::ErrorCode::Config, "missing required key 'mode'");
    spknn::ProgressFn fn;
    if (progress) fn = [progress, user](const std::string& msg) { progress(msg.c_str(), user); };
    spknn::CommandOutcome o;
    switch (*m) {
      case spknn::Mode::Simulate: o = spknn::cmd_simulate(cfg->cfg, fn); break;
      case spknn::Mode::Cv: o = spknn::cmd_cv(cfg->cfg, fn); break;
      case spknn::Mode::Predict: o = spknn::cmd_predict(cfg->cfg, fn); break;
      case spknn::Mode::Classify: o = spknn::cmd_classify(cfg->cfg, fn); break;
      case spknn::Mode::Benchmark: o = spknn::cmd_benchmark(cfg->cfg, fn); break;
    }
    result.exit_code = o.exit_code;
    result.summary = std::move(o.summary);
    result.report_path = std::move(o.report_path);
  });
  if (status != SPKNN_OK) {
    result.exit_code = spknn_exit_code(status);
    result.summary = g_last_error;
    result.report_path.clear();
  }
  try {
    *out = new spknn_outcome(std::move(result));
  } catch (const std::bad_alloc&) {
    return set_error(SPKNN_E_OUT_OF_MEMORY, "out of memory");
  }
  return status;
}

int spknn_outcome_exit_code(const spknn_outcome* o) { return o ? o->exit_code : 1; }
const char* spknn_outcome_summary(const spknn_outcome* o) { return o ? o->summary.c_str() : ""; }
const char* spknn_outcome_report_path(const spknn_outcome* o) { return o ? o->report_path.c_str() : ""; }
void spknn_outcome_free(spknn_outcome* o) { delete o; }

}  // extern "C"
