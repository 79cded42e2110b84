#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "csv.hpp"
#include "tuning.hpp"

namespace spknn {

enum class Mode { Simulate, Cv, Predict, Classify, Benchmark };

std::string_view mode_name(Mode m);
std::optional<Mode> mode_from_name(std::string_view name);

enum class MethodSet { Knn, Nw, Both };

// Grid lists as configured: unset means "auto" (mode defaults), an empty
// list is an explicitly empty grid.
struct GridSpec {
  std::optional<std::vector<std::size_t>> k;
  std::optional<std::vector<std::size_t>> k_prime;
  std::optional<std::vector<Kernel>> k1;
  std::optional<std::vector<Kernel>> k2;
  std::optional<std::vector<double>> h;
  std::optional<std::vector<double>> rho;
};

struct ExperimentConfig {
  std::optional<Mode> mode;
  std::optional<std::uint64_t> seed;
  // 0: machine parallelism
  unsigned threads = 0;

  // [data]; an empty path means "simulate from [simulation]"
  std::string data_path;
  std::string query_path;
  CsvSchema schema;

  // [simulation]
  std::vector<std::pair<std::size_t, std::size_t>> shapes{{25, 25}};
  std::vector<double> a_values{5.0};
  std::vector<double> z_variances{0.1};
  std::size_t replications = 30;

  // [grid]
  MethodSet methods = MethodSet::Both;
  GridSpec grid;

  // [split]
  double train_fraction = 0.8;

  // [output]
  std::string output_path;
  std::string format = "csv";
};

// Flat `key = value` text. Top-level keys: mode, seed, threads. Sections
// [data], [simulation], [grid], [split], [output]. Lists are comma
// separated, `auto` selects the defaults; '#' and ';' start comment lines.
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config(const std::filesystem::path& path);

// key is "section.name" or a top-level name.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const ExperimentConfig& cfg, std::string_view key);
std::vector<std::string> config_keys();

// Every key with its current value, in parseable form.
std::string render_config(const ExperimentConfig& cfg);

// Throws Config naming the first missing or inconsistent key.
void validate_config(const ExperimentConfig& cfg, Mode mode);

// Grid with the mode's kernel defaults applied: all six kernels for
// classify, Epanechnikov (K1) and Parzen (K2) otherwise. Unset k/k'/h/rho
// lists stay empty for with_defaults. An explicitly empty list used by an
// active method throws InvalidArgument.
ParamGrid effective_grid(const ExperimentConfig& cfg, Mode mode);

}  // namespace spknn
