#include "config.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "error.hpp"

namespace spknn {

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Simulate: return "simulate";
    case Mode::Cv: return "cv";
    case Mode::Predict: return "predict";
    case Mode::Classify: return "classify";
    case Mode::Benchmark: return "benchmark";
  }
  return "?";
}

std::optional<Mode> mode_from_name(std::string_view name) {
  for (Mode m : {Mode::Simulate, Mode::Cv, Mode::Predict, Mode::Classify, Mode::Benchmark})
    if (mode_name(m) == name) return m;
  return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  v = trim(v);
  if (v.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = v.find(',', start);
    out.emplace_back(trim(v.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs, const std::function<std::string(const T&)>& f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += f(xs[i]);
  }
  return out;
}

[[noreturn]] void mismatch(std::string_view key, std::string_view expected, std::string_view value) {
  fail(ErrorCode::Config,
       "key '" + std::string(key) + "': expected " + std::string(expected) + ", got '" + std::string(value) + "'");
}

std::uint64_t as_u64(std::string_view key, std::string_view v) {
  const auto t = trim(v);
  const auto i = parse_integer(t);
  if (i && *i >= 0) return static_cast<std::uint64_t>(*i);
  // values above LLONG_MAX
  std::uint64_t out = 0;
  if (t.empty() || t.size() > 20) mismatch(key, "an unsigned 64-bit integer", v);
  for (char c : t) {
    if (c < '0' || c > '9') mismatch(key, "an unsigned 64-bit integer", v);
    const std::uint64_t d = static_cast<std::uint64_t>(c - '0');
    if (out > (UINT64_MAX - d) / 10) mismatch(key, "an unsigned 64-bit integer", v);
    out = out * 10 + d;
  }
  return out;
}

std::size_t as_count(std::string_view key, std::string_view v, long long min) {
  const auto i = parse_integer(v);
  if (!i || *i < min) mismatch(key, "an integer >= " + std::to_string(min), v);
  return static_cast<std::size_t>(*i);
}

double as_double(std::string_view key, std::string_view v) {
  const auto d = parse_double(v);
  if (!d) mismatch(key, "a finite number", v);
  return *d;
}

std::vector<std::size_t> as_counts(std::string_view key, std::string_view v) {
  std::vector<std::size_t> out;
  for (const auto& s : split_list(v)) out.push_back(as_count(key, s, 1));
  return out;
}

std::vector<double> as_doubles(std::string_view key, std::string_view v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(as_double(key, s));
  return out;
}

std::vector<Kernel> as_kernels(std::string_view key, std::string_view v) {
  std::vector<Kernel> out;
  for (const auto& s : split_list(v)) {
    if (s == "all") {
      out.insert(out.end(), kAllKernels.begin(), kAllKernels.end());
      continue;
    }
    const auto k = kernel_from_name(s);
    if (!k) mismatch(key, "kernel names (biweight, epanechnikov, gaussian, indicator, parzen, triangular)", s);
    out.push_back(*k);
  }
  return out;
}

std::vector<std::string> as_names(std::string_view v) { return split_list(v); }

bool is_auto(std::string_view v) { return trim(v) == "auto"; }

template <class T>
std::string fmt_opt(const std::optional<std::vector<T>>& xs, std::string (*f)(const std::vector<T>&)) {
  return xs ? f(*xs) : std::string("auto");
}

std::optional<std::string> as_optional_name(std::string_view v) {
  const auto t = trim(v);
  if (t.empty()) return std::nullopt;
  return std::string(t);
}

std::string fmt_counts(const std::vector<std::size_t>& xs) {
  return join<std::size_t>(xs, [](const std::size_t& x) { return std::to_string(x); });
}
std::string fmt_doubles(const std::vector<double>& xs) {
  return join<double>(xs, [](const double& x) { return format_double(x); });
}
std::string fmt_kernels(const std::vector<Kernel>& xs) {
  return join<Kernel>(xs, [](const Kernel& k) { return std::string(kernel_name(k)); });
}
std::string fmt_names(const std::vector<std::string>& xs) {
  return join<std::string>(xs, [](const std::string& s) { return s; });
}

struct Entry {
  std::function<void(ExperimentConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

// Ordered for rendering: top-level keys first, then sections.
const std::vector<std::pair<std::string, Entry>>& entries() {
  static const std::vector<std::pair<std::string, Entry>> table = {
      {"mode",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          const auto t = trim(v);
          if (t.empty()) {
            c.mode.reset();
            return;
          }
          const auto m = mode_from_name(t);
          if (!m) mismatch(k, "one of simulate, cv, predict, classify, benchmark", v);
          c.mode = m;
        },
        [](const ExperimentConfig& c) { return c.mode ? std::string(mode_name(*c.mode)) : std::string(); }}},
      {"seed",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          if (trim(v).empty()) c.seed.reset();
          else c.seed = as_u64(k, v);
        },
        [](const ExperimentConfig& c) { return c.seed ? std::to_string(*c.seed) : std::string(); }}},
      {"threads",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          c.threads = static_cast<unsigned>(as_count(k, v, 0));
        },
        [](const ExperimentConfig& c) { return std::to_string(c.threads); }}},
      {"data.path",
       {[](ExperimentConfig& c, std::string_view, std::string_view v) { c.data_path = trim(v); },
        [](const ExperimentConfig& c) { return c.data_path; }}},
      {"data.query_path",
       {[](ExperimentConfig& c, std::string_view, std::string_view v) { c.query_path = trim(v); },
        [](const ExperimentConfig& c) { return c.query_path; }}},
      {"data.site_columns",
       {[](ExperimentConfig& c, std::string_view, std::string_view v) { c.schema.site_columns = as_names(v); },
        [](const ExperimentConfig& c) { return fmt_names(c.schema.site_columns); }}},
      {"data.covariate_columns",
       {[](ExperimentConfig& c, std::string_view, std::string_view v) {
          c.schema.covariate_columns = as_names(v);
        },
        [](const ExperimentConfig& c) { return fmt_names(c.schema.covariate_columns); }}},
      {"data.response_column",
       {[](ExperimentConfig& c, std::string_view, std::string_view v) {
          c.schema.response_column = as_optional_name(v);
        },
        [](const ExperimentConfig& c) { return c.schema.response_column.value_or(""); }}},
      {"data.label_column",
       {[](ExperimentConfig& c, std::string_view, std::string_view v) {
          c.schema.label_column = as_optional_name(v);
        },
        [](const ExperimentConfig& c) { return c.schema.label_column.value_or(""); }}},
      {"data.label_coding",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          const auto t = trim(v);
          if (t.empty() || t == "auto") c.schema.label_coding.reset();
          else if (t == "native") c.schema.label_coding = LabelCoding::Native;
          else if (t == "zero_one") c.schema.label_coding = LabelCoding::ZeroOne;
          else mismatch(k, "auto, native or zero_one", v);
        },
        [](const ExperimentConfig& c) -> std::string {
          if (!c.schema.label_coding) return "auto";
          return *c.schema.label_coding == LabelCoding::ZeroOne ? "zero_one" : "native";
        }}},
      {"data.delimiter",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          // not trimmed: a tab must survive
          if (v == "tab" || v == "\\t") c.schema.delimiter = '\t';
          else if (trim(v).size() == 1) c.schema.delimiter = trim(v)[0];
          else mismatch(k, "a single character or 'tab'", v);
        },
        [](const ExperimentConfig& c) {
          return c.schema.delimiter == '\t' ? std::string("tab") : std::string(1, c.schema.delimiter);
        }}},
      {"simulation.shape",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          c.shapes.clear();
          for (const auto& s : split_list(v)) {
            const auto x = s.find('x');
            if (x == std::string::npos) mismatch(k, "grid shapes like 25x25", s);
            const auto r = parse_integer(std::string_view(s).substr(0, x));
            const auto q = parse_integer(std::string_view(s).substr(x + 1));
            if (!r || !q || *r < 1 || *q < 1) mismatch(k, "grid shapes like 25x25", s);
            c.shapes.emplace_back(static_cast<std::size_t>(*r), static_cast<std::size_t>(*q));
          }
        },
        [](const ExperimentConfig& c) {
          return join<std::pair<std::size_t, std::size_t>>(c.shapes, [](const auto& p) {
            return std::to_string(p.first) + "x" + std::to_string(p.second);
          });
        }}},
      {"simulation.a",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.a_values = as_doubles(k, v); },
        [](const ExperimentConfig& c) { return fmt_doubles(c.a_values); }}},
      {"simulation.z_variance",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.z_variances = as_doubles(k, v); },
        [](const ExperimentConfig& c) { return fmt_doubles(c.z_variances); }}},
      {"simulation.replications",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) { c.replications = as_count(k, v, 0); },
        [](const ExperimentConfig& c) { return std::to_string(c.replications); }}},
      {"grid.method",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          const auto t = trim(v);
          if (t == "knn") c.methods = MethodSet::Knn;
          else if (t == "nw") c.methods = MethodSet::Nw;
          else if (t == "both") c.methods = MethodSet::Both;
          else mismatch(k, "knn, nw or both", v);
        },
        [](const ExperimentConfig& c) -> std::string {
          switch (c.methods) {
            case MethodSet::Knn: return "knn";
            case MethodSet::Nw: return "nw";
            case MethodSet::Both: return "both";
          }
          return "both";
        }}},
      {"grid.k",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          if (is_auto(v)) c.grid.k.reset();
          else c.grid.k = as_counts(k, v);
        },
        [](const ExperimentConfig& c) { return fmt_opt(c.grid.k, fmt_counts); }}},
      {"grid.k_prime",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          if (is_auto(v)) c.grid.k_prime.reset();
          else c.grid.k_prime = as_counts(k, v);
        },
        [](const ExperimentConfig& c) { return fmt_opt(c.grid.k_prime, fmt_counts); }}},
      {"grid.k1",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          if (is_auto(v)) c.grid.k1.reset();
          else c.grid.k1 = as_kernels(k, v);
        },
        [](const ExperimentConfig& c) { return fmt_opt(c.grid.k1, fmt_kernels); }}},
      {"grid.k2",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          if (is_auto(v)) c.grid.k2.reset();
          else c.grid.k2 = as_kernels(k, v);
        },
        [](const ExperimentConfig& c) { return fmt_opt(c.grid.k2, fmt_kernels); }}},
      {"grid.h",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          if (is_auto(v)) c.grid.h.reset();
          else c.grid.h = as_doubles(k, v);
        },
        [](const ExperimentConfig& c) { return fmt_opt(c.grid.h, fmt_doubles); }}},
      {"grid.rho",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          if (is_auto(v)) c.grid.rho.reset();
          else c.grid.rho = as_doubles(k, v);
        },
        [](const ExperimentConfig& c) { return fmt_opt(c.grid.rho, fmt_doubles); }}},
      {"split.train_fraction",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          const double f = as_double(k, v);
          if (!(f > 0.0 && f < 1.0)) mismatch(k, "a fraction in (0, 1)", v);
          c.train_fraction = f;
        },
        [](const ExperimentConfig& c) { return format_double(c.train_fraction); }}},
      {"output.path",
       {[](ExperimentConfig& c, std::string_view, std::string_view v) { c.output_path = trim(v); },
        [](const ExperimentConfig& c) { return c.output_path; }}},
      {"output.format",
       {[](ExperimentConfig& c, std::string_view k, std::string_view v) {
          if (trim(v) != "csv") mismatch(k, "csv", v);
          c.format = "csv";
        },
        [](const ExperimentConfig& c) { return c.format; }}},
  };
  return table;
}

const Entry* find_entry(std::string_view key) {
  for (const auto& [name, e] : entries())
    if (name == key) return &e;
  return nullptr;
}

}  // namespace

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const Entry* e = find_entry(trim(key));
  if (!e) fail(ErrorCode::Config, "unknown key '" + std::string(trim(key)) + "'");
  e->set(cfg, trim(key), value);
}

std::string get_config_value(const ExperimentConfig& cfg, std::string_view key) {
  const Entry* e = find_entry(key);
  if (!e) fail(ErrorCode::Config, "unknown key '" + std::string(key) + "'");
  return e->get(cfg);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [name, e] : entries()) out.push_back(name);
  return out;
}

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig cfg;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail(ErrorCode::Config, "line " + std::to_string(line_no) + ": malformed section header");
      section = std::string(trim(t.substr(1, t.size() - 2)));
      static const std::vector<std::string> known{"data", "simulation", "grid", "split", "output"};
      if (std::find(known.begin(), known.end(), section) == known.end())
        fail(ErrorCode::Config, "line " + std::to_string(line_no) + ": unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorCode::Config, "line " + std::to_string(line_no) + ": expected 'key = value'");
    const auto name = trim(line.substr(0, eq));
    auto value = line.substr(eq + 1);
    if (!value.empty() && value.back() == '\r') value.remove_suffix(1);
    // leading blanks after '=' are padding; a lone tab is kept for the delimiter
    while (value.size() > 1 && value.front() == ' ') value.remove_prefix(1);
    if (value.size() == 1 && value.front() == ' ') value = "";
    const std::string key = section.empty() ? std::string(name) : section + "." + std::string(name);
    if (!find_entry(key)) fail(ErrorCode::Config, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    set_config_value(cfg, key, value);
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    fail(ErrorCode::Config, e.what());
  }
  return parse_config_text(text);
}

std::string render_config(const ExperimentConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& [name, e] : entries()) {
    const auto dot = name.find('.');
    const std::string sec = dot == std::string::npos ? "" : name.substr(0, dot);
    const std::string key = dot == std::string::npos ? name : name.substr(dot + 1);
    if (sec != section) {
      out += "\n[" + sec + "]\n";
      section = sec;
    }
    const std::string v = e.get(cfg);
    out += key + " =" + (v.empty() ? "" : " " + v) + "\n";
  }
  return out;
}

void validate_config(const ExperimentConfig& cfg, Mode mode) {
  auto missing = [](const std::string& key, const std::string& why) {
    fail(ErrorCode::Config, "missing required key '" + key + "' (" + why + ")");
  };
  const bool simulated = cfg.data_path.empty();
  const bool uses_sim = mode == Mode::Simulate || mode == Mode::Benchmark ||
                        (simulated && (mode == Mode::Cv || mode == Mode::Predict));
  if (uses_sim) {
    if (cfg.shapes.empty()) missing("simulation.shape", "simulated data");
    if (cfg.a_values.empty()) missing("simulation.a", "simulated data");
    if (cfg.z_variances.empty()) missing("simulation.z_variance", "simulated data");
    for (double a : cfg.a_values)
      if (!(a > 0.0)) fail(ErrorCode::InvalidArgument, "simulation.a must be positive, got " + format_double(a));
    for (double z : cfg.z_variances)
      if (!(z > 0.0))
        fail(ErrorCode::InvalidArgument, "simulation.z_variance must be positive, got " + format_double(z));
    if (mode != Mode::Benchmark && (cfg.shapes.size() != 1 || cfg.a_values.size() != 1 || cfg.z_variances.size() != 1))
      fail(ErrorCode::Config, "simulation.shape, simulation.a and simulation.z_variance take one value outside benchmark mode");
    if (!cfg.seed) missing("seed", std::string(mode_name(mode)) + " on simulated data needs a seed");
  }
  switch (mode) {
    case Mode::Simulate:
      if (cfg.output_path.empty()) missing("output.path", "simulate writes a dataset");
      break;
    case Mode::Cv:
      break;
    case Mode::Predict:
      if (cfg.query_path.empty()) missing("data.query_path", "predict needs query sites");
      break;
    case Mode::Classify:
      if (cfg.data_path.empty()) missing("data.path", "classify reads a labeled dataset");
      if (!cfg.schema.label_column) missing("data.label_column", "classify needs labels");
      if (!cfg.seed) missing("seed", "the train/test split is seeded");
      break;
    case Mode::Benchmark:
      if (cfg.replications < 2)
        fail(ErrorCode::InvalidArgument, "simulation.replications must be at least 2 for the paired t-test, got " +
                                             std::to_string(cfg.replications));
      break;
  }
}

ParamGrid effective_grid(const ExperimentConfig& cfg, Mode mode) {
  const bool knn = mode == Mode::Classify || mode == Mode::Benchmark || cfg.methods != MethodSet::Nw;
  const bool nw = mode == Mode::Classify || mode == Mode::Benchmark || cfg.methods != MethodSet::Knn;
  auto check = [](const auto& list, bool active, const char* key) {
    if (active && list && list->empty())
      fail(ErrorCode::InvalidArgument, std::string("parameter grid is empty (") + key + ")");
  };
  check(cfg.grid.k, knn, "grid.k");
  check(cfg.grid.k_prime, knn, "grid.k_prime");
  check(cfg.grid.h, nw, "grid.h");
  check(cfg.grid.rho, nw, "grid.rho");
  check(cfg.grid.k1, true, "grid.k1");
  check(cfg.grid.k2, true, "grid.k2");

  const std::vector<Kernel> all(kAllKernels.begin(), kAllKernels.end());
  ParamGrid g;
  g.k_values = cfg.grid.k.value_or(std::vector<std::size_t>{});
  g.k_prime_values = cfg.grid.k_prime.value_or(std::vector<std::size_t>{});
  g.h_values = cfg.grid.h.value_or(std::vector<double>{});
  g.rho_values = cfg.grid.rho.value_or(std::vector<double>{});
  g.k1_specs = cfg.grid.k1.value_or(mode == Mode::Classify ? all : std::vector<Kernel>{Kernel::Epanechnikov});
  g.k2_specs = cfg.grid.k2.value_or(mode == Mode::Classify ? all : std::vector<Kernel>{Kernel::Parzen});
  return g;
}

}  // namespace spknn
