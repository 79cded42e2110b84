#pragma once

#include <string>

#include "benchmark.hpp"
#include "error.hpp"
#include "config.hpp"

namespace spknn {

struct CommandOutcome {
  int exit_code = 0;
  std::string summary;
  std::string report_path;
};

// Exit code for an error category: 1 user error, 2 data error, 3 numerical.
int exit_code_for(ErrorCode code);

// Runs one subcommand. Results go to cfg.output_path (or into the summary when
// no path is set); progress lines go to `progress`. Errors are returned as a
// nonzero outcome with the message in `summary`.
CommandOutcome run_command(Mode mode, const ExperimentConfig& cfg, const ProgressFn& progress = {});

CommandOutcome cmd_simulate(const ExperimentConfig& cfg, const ProgressFn& progress = {});
CommandOutcome cmd_cv(const ExperimentConfig& cfg, const ProgressFn& progress = {});
CommandOutcome cmd_predict(const ExperimentConfig& cfg, const ProgressFn& progress = {});
CommandOutcome cmd_classify(const ExperimentConfig& cfg, const ProgressFn& progress = {});
CommandOutcome cmd_benchmark(const ExperimentConfig& cfg, const ProgressFn& progress = {});

}  // namespace spknn
