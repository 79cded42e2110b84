// spknn command-line front end. Talks to the library only through the C API.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spknn/spknn.h"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string output;
  std::string format = "csv";
  std::string data;
  std::string query;
  std::vector<std::string> sets;
  bool print_config = false;
  bool quiet = false;
};

struct Failure {
  int code;
};

void check(spknn_status s) {
  if (s == SPKNN_OK) return;
  std::cerr << "error: " << spknn_last_error() << "\n";
  throw Failure{spknn_exit_code(s)};
}

void set(spknn_config* cfg, const std::string& key, const std::string& value) {
  check(spknn_config_set(cfg, key.c_str(), value.c_str()));
}

std::string get(const spknn_config* cfg, const char* key) {
  std::size_t n = 0;
  check(spknn_config_get(cfg, key, nullptr, 0, &n));
  std::string out(n + 1, '\0');
  check(spknn_config_get(cfg, key, out.data(), out.size(), &n));
  out.resize(n);
  return out;
}

void progress_to_stderr(const char* msg, void*) { std::fprintf(stderr, "[spknn] %s\n", msg); }

int run(const std::string& mode, const Options& o) {
  spknn_config* raw = nullptr;
  if (o.config_path.empty()) check(spknn_config_new(&raw));
  else check(spknn_config_parse_file(o.config_path.c_str(), &raw));
  std::unique_ptr<spknn_config, decltype(&spknn_config_free)> cfg(raw, spknn_config_free);

  set(cfg.get(), "mode", mode);
  if (get(cfg.get(), "threads") == "0") {
    if (const char* env = std::getenv("SPKNN_THREADS"); env && *env) set(cfg.get(), "threads", env);
  }
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
      return 1;
    }
    set(cfg.get(), kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) set(cfg.get(), "seed", std::to_string(*o.seed));
  if (o.threads) set(cfg.get(), "threads", std::to_string(*o.threads));
  if (!o.output.empty()) set(cfg.get(), "output.path", o.output);
  if (!o.data.empty()) set(cfg.get(), "data.path", o.data);
  if (!o.query.empty()) set(cfg.get(), "data.query_path", o.query);
  set(cfg.get(), "output.format", o.format);

  if (o.print_config) {
    std::size_t n = 0;
    check(spknn_config_render(cfg.get(), nullptr, 0, &n));
    std::string text(n + 1, '\0');
    check(spknn_config_render(cfg.get(), text.data(), text.size(), &n));
    text.resize(n);
    std::cout << text;
    return 0;
  }

  spknn_outcome* outcome = nullptr;
  spknn_run(cfg.get(), mode.c_str(), o.quiet ? nullptr : progress_to_stderr, nullptr, &outcome);
  if (!outcome) {
    std::cerr << "error: " << spknn_last_error() << "\n";
    return 1;
  }
  const int code = spknn_outcome_exit_code(outcome);
  if (code == 0) {
    std::cout << spknn_outcome_summary(outcome) << "\n";
  } else {
    std::cerr << "error: " << spknn_outcome_summary(outcome) << "\n";
  }
  spknn_outcome_free(outcome);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial kNN kernel regression and classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", spknn_version());

  Options o;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"simulate", "Write a simulated lattice dataset"},
      {"cv", "Leave-one-out grid search; prints the selected parameters"},
      {"predict", "Predict responses at query sites"},
      {"classify", "Stratified split, CV on train, CCR table on test"},
      {"benchmark", "kNN vs kernel replication study with paired t-test"},
  };
  std::string chosen;
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("--config", o.config_path, "Configuration file")->check(CLI::ExistingFile);
    sc->add_option("--seed", o.seed, "Base seed (required for benchmark)");
    sc->add_option("--threads", o.threads, "Thread cap (default: $SPKNN_THREADS or all cores)")
        ->check(CLI::Range(1u, 4096u));
    sc->add_option("--output", o.output, "Report or dataset path (default: standard output)");
    sc->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv"}));
    sc->add_option("--data", o.data, "Input dataset CSV");
    sc->add_option("--query", o.query, "Query sites CSV (predict)");
    sc->add_option("--set", o.sets, "Override a config key, e.g. --set grid.k=5,10");
    sc->add_flag("--print-config", o.print_config, "Print the effective configuration and exit");
    sc->add_flag("--quiet", o.quiet, "No progress output");
    sc->callback([&chosen, name = std::string(s.name)] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    // top level: every subcommand with its flags
    const auto parsed = app.get_subcommands();
    std::cout << (parsed.empty() ? app.help("", CLI::AppFormatMode::All) : parsed.back()->help());
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    return run(chosen, o);
  } catch (const Failure& f) {
    return f.code;
  }
}
