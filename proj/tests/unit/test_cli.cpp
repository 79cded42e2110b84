#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <sys/wait.h>

#include "commands.hpp"
#include "csv.hpp"
#include "reports.hpp"
#include "simulate.hpp"
#include "support.hpp"

using namespace spknn;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the spknn binary; stderr goes to `err_path` (or is discarded).
Run cli(const std::string& args, const fs::path& err_path = {}) {
  const std::string cmd = std::string(SPKNN_CLI) + " " + args + " 2>" +
                          (err_path.empty() ? std::string("/dev/null") : err_path.string());
  Run r;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool contains(const std::string& s, std::string_view part) { return s.find(part) != std::string::npos; }

fs::path dir() {
  static const fs::path d = [] {
    auto p = testutil::temp_dir() / "cli";
    fs::create_directories(p);
    return p;
  }();
  return d;
}

ExperimentConfig base(std::uint64_t seed = 7) {
  ExperimentConfig c;
  c.seed = seed;
  c.threads = 1;
  c.shapes = {{8, 8}};
  return c;
}

// Two well separated clusters: class 0 on the left with x < 0, class 1 on the right with x > 5.
fs::path separable_file() {
  const auto p = dir() / "separable.csv";
  testutil::Rng rng(3);
  std::string text = "lon,lat,x1,x2,presence\n";
  for (int i = 0; i < 60; ++i) {
    const bool one = i % 3 == 0;
    const double lon = (one ? 100.0 : 0.0) + 10.0 * rng.uniform();
    const double lat = 10.0 * rng.uniform();
    const double x1 = one ? 5.0 + rng.uniform() : -rng.uniform();
    const double x2 = rng.normal();
    text += format_double(lon) + "," + format_double(lat) + "," + format_double(x1) + "," + format_double(x2) + "," +
            (one ? "1" : "0") + "\n";
  }
  write_text_file(p, text);
  return p;
}

ExperimentConfig classify_config(const fs::path& data, std::uint64_t seed) {
  ExperimentConfig c = base(seed);
  c.data_path = data.string();
  set_config_value(c, "data.site_columns", "lon,lat");
  set_config_value(c, "data.covariate_columns", "x1,x2");
  set_config_value(c, "data.label_column", "presence");
  return c;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorCode::InvalidArgument) == 1);
  CHECK(exit_code_for(ErrorCode::Config) == 1);
  CHECK(exit_code_for(ErrorCode::Schema) == 2);
  CHECK(exit_code_for(ErrorCode::Parse) == 2);
  CHECK(exit_code_for(ErrorCode::Io) == 2);
  CHECK(exit_code_for(ErrorCode::InvalidData) == 2);
  CHECK(exit_code_for(ErrorCode::Numerical) == 3);
  CHECK(exit_code_for(ErrorCode::Degenerate) == 3);
}

TEST_CASE("simulate") {
  auto c = base(11);
  c.shapes = {{25, 25}};
  c.output_path = (dir() / "sim_a.csv").string();
  const auto r = run_command(Mode::Simulate, c);
  CHECK(r.exit_code == 0);
  CHECK(r.report_path == c.output_path);
  c.output_path = (dir() / "sim_b.csv").string();
  CHECK(run_command(Mode::Simulate, c).exit_code == 0);
  const auto a = read_text_file(dir() / "sim_a.csv");
  CHECK(a == read_text_file(dir() / "sim_b.csv"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 626);
  CHECK(a.rfind("s1,s2,x,y\n", 0) == 0);

  DgpParams p;
  p.seed = 11;
  const auto back = read_dataset(dir() / "sim_a.csv", CsvSchema{});
  const auto want = gen_dataset(p);
  CHECK(back.sites().flat() == want.sites().flat());
  CHECK(back.covariates_flat() == want.covariates_flat());
  CHECK(back.responses() == want.responses());

  c.a_values = {0.0};
  const auto bad = run_command(Mode::Simulate, c);
  CHECK(bad.exit_code == 1);
  CHECK(contains(bad.summary, "simulation.a"));
  c.a_values = {5.0};
  c.output_path.clear();
  CHECK(run_command(Mode::Simulate, c).exit_code == 1);
}

TEST_CASE("cv") {
  auto c = base();
  c.shapes = {{10, 10}};
  DgpParams p;
  p.rows = p.cols = 10;
  p.seed = 7;
  const auto data = gen_dataset(p);

  SUBCASE("singleton grid is echoed") {
    set_config_value(c, "grid.k", "6");
    set_config_value(c, "grid.k_prime", "9");
    set_config_value(c, "grid.k1", "gaussian");
    set_config_value(c, "grid.k2", "triangular");
    set_config_value(c, "grid.h", "0.25");
    set_config_value(c, "grid.rho", "2");
    const auto r = run_command(Mode::Cv, c);
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.summary);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1] == CsvRow{"knn", "6", "9", "", "", "gaussian", "triangular",
                            format_double(loo_score(data, KnnParams{6, 9, Kernel::Gaussian, Kernel::Triangular})), "1"});
    CHECK(rows[2] == CsvRow{"nw", "", "", "0.25", "2", "gaussian", "triangular",
                            format_double(loo_score(data, NwParams{0.25, 2.0, Kernel::Gaussian, Kernel::Triangular})),
                            "1"});
  }

  SUBCASE("matches the library on a data file") {
    const auto path = dir() / "cv_data.csv";
    write_dataset(data, path, CsvSchema{});
    c.data_path = path.string();
    c.output_path = (dir() / "cv_out.csv").string();
    set_config_value(c, "grid.k1", "epanechnikov,biweight");
    const auto r = run_command(Mode::Cv, c);
    REQUIRE(r.exit_code == 0);
    const auto rows = read_csv_file(c.output_path);
    const auto grid = with_defaults(effective_grid(c, Mode::Cv), data);
    const auto k = cv_select_knn(data, grid);
    const auto n = cv_select_nw(data, grid);
    CHECK(rows[1][1] == std::to_string(k.params.k));
    CHECK(rows[1][2] == std::to_string(k.params.k_prime));
    CHECK(rows[1][5] == std::string(kernel_name(k.params.k1)));
    CHECK(rows[1][7] == format_double(k.score));
    CHECK(rows[1][8] == std::to_string(k.candidates.size()));
    CHECK(rows[2][3] == format_double(n.params.h));
    CHECK(rows[2][4] == format_double(n.params.rho));
    CHECK(rows[2][7] == format_double(n.score));
    CHECK(contains(r.summary, "loo_mae=" + format_double(k.score)));
  }

  SUBCASE("method selection") {
    set_config_value(c, "grid.method", "knn");
    set_config_value(c, "grid.k", "3,5");
    set_config_value(c, "grid.k_prime", "4");
    const auto r = run_command(Mode::Cv, c);
    REQUIRE(r.exit_code == 0);
    CHECK(parse_csv(r.summary).size() == 2);
  }

  SUBCASE("empty grid") {
    set_config_value(c, "grid.k", "");
    CHECK(run_command(Mode::Cv, c).exit_code == 1);
    set_config_value(c, "grid.k", "auto");
    set_config_value(c, "grid.k2", "");
    CHECK(run_command(Mode::Cv, c).exit_code == 1);
  }

  SUBCASE("missing data file") {
    c.data_path = (dir() / "absent.csv").string();
    CHECK(run_command(Mode::Cv, c).exit_code == 2);
  }
}

TEST_CASE("predict") {
  DgpParams p;
  p.rows = p.cols = 8;
  p.seed = 5;
  const auto train = gen_dataset(p);
  const auto train_path = dir() / "pred_train.csv";
  write_dataset(train, train_path, CsvSchema{});
  const SpatialDataset query(SiteSet(2, {0.5, 0.5, 3.25, 6.0, 7.0, 7.0, 2.0, 2.0}), 1, {0.1, -1.2, 2.0, 0.4},
                             std::vector<double>{0.2, 1.0, 4.1, 0.0});
  const auto query_path = dir() / "pred_query.csv";
  write_dataset(query, query_path, CsvSchema{});

  auto c = base();
  c.data_path = train_path.string();
  c.query_path = query_path.string();
  set_config_value(c, "grid.k", "5");
  set_config_value(c, "grid.k_prime", "12");
  set_config_value(c, "grid.h", "0.4");
  set_config_value(c, "grid.rho", "2.5");

  SUBCASE("matches library calls") {
    const auto r = run_command(Mode::Predict, c);
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.summary);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == CsvRow{"index", "s1", "s2", "y", "knn_pred", "nw_pred"});
    const KnnParams kp{5, 12, Kernel::Epanechnikov, Kernel::Parzen};
    const NwParams np{0.4, 2.5, Kernel::Epanechnikov, Kernel::Parzen};
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(rows[i + 1][4] == format_double(predict(train, query.sites()[i], query.covariate(i), kp)));
      CHECK(rows[i + 1][5] == format_double(predict_nw(train, query.sites()[i], query.covariate(i), np)));
    }
    c.output_path = (dir() / "pred_out.csv").string();
    const auto w = run_command(Mode::Predict, c);
    CHECK(contains(w.summary, "mae="));
    CHECK(contains(w.summary, "4 predictions"));
  }

  SUBCASE("query without responses") {
    const auto bare = dir() / "pred_bare.csv";
    write_text_file(bare, "s1,s2,x\n1,1,0.5\n");
    c.query_path = bare.string();
    const auto r = run_command(Mode::Predict, c);
    REQUIRE(r.exit_code == 0);
    CHECK(parse_csv(r.summary)[0] == CsvRow{"index", "s1", "s2", "knn_pred", "nw_pred"});
  }

  SUBCASE("constant responses") {
    const auto flat = train.with_responses(std::vector<double>(train.size(), 2.75));
    write_dataset(flat, train_path, CsvSchema{});
    set_config_value(c, "grid.k", "auto");
    set_config_value(c, "grid.h", "auto");
    const auto r = run_command(Mode::Predict, c);
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.summary);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(*parse_double(rows[i][4]) == doctest::Approx(2.75).epsilon(1e-12));
      CHECK(*parse_double(rows[i][5]) == doctest::Approx(2.75).epsilon(1e-12));
    }
  }

  SUBCASE("missing response column") {
    write_text_file(train_path, "s1,s2,x\n0,0,1\n1,0,2\n");
    CHECK(run_command(Mode::Predict, c).exit_code == 2);
  }

  SUBCASE("dimension mismatch") {
    write_text_file(query_path, "s1,s2,x\n");
    CsvSchema three;
    three.site_columns = {"s1", "s2", "s3"};
    c.schema = three;
    CHECK(run_command(Mode::Predict, c).exit_code == 2);
  }
}

TEST_CASE("classify") {
  const auto data = separable_file();

  SUBCASE("separable data is classified perfectly") {
    auto c = classify_config(data, 21);
    c.output_path = (dir() / "cls_a.csv").string();
    const auto r = run_command(Mode::Classify, c);
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.summary, "36 kernel pairs"));
    CHECK(contains(r.summary, "labels 0/1 mapped to classes 1/2"));
    const auto text = read_text_file(c.output_path);
    CHECK(text.rfind("k1,k2,knn_k,knn_k_prime,knn_all,knn_y1,knn_y0,nw_h,nw_rho,nw_all,nw_y1,nw_y0\n", 0) == 0);
    const auto table = parse_classification_table(text);
    REQUIRE(table.rows.size() == 36);
    for (const auto& row : table.rows) CHECK(row.knn_ccr.overall == 1.0);

    c.output_path = (dir() / "cls_b.csv").string();
    REQUIRE(run_command(Mode::Classify, c).exit_code == 0);
    CHECK(read_text_file(c.output_path) == text);
  }

  SUBCASE("kernel subset") {
    auto c = classify_config(data, 22);
    set_config_value(c, "grid.k1", "gaussian");
    set_config_value(c, "grid.k2", "indicator,parzen");
    const auto r = run_command(Mode::Classify, c);
    REQUIRE(r.exit_code == 0);
    CHECK(parse_csv(r.summary).size() == 3);
  }

  SUBCASE("errors") {
    auto c = classify_config(data, 23);
    c.schema.label_column.reset();
    CHECK(run_command(Mode::Classify, c).exit_code == 1);
    c = classify_config(data, 23);
    set_config_value(c, "data.label_column", "nothing");
    CHECK(run_command(Mode::Classify, c).exit_code == 2);
    c = classify_config(data, 23);
    c.seed.reset();
    CHECK(run_command(Mode::Classify, c).exit_code == 1);
  }
}

TEST_CASE("benchmark") {
  auto c = base(100);
  c.shapes = {{6, 6}, {7, 6}};
  c.a_values = {5.0, 10.0};
  c.replications = 3;
  set_config_value(c, "grid.k", "3,8");
  set_config_value(c, "grid.k_prime", "4,12");
  set_config_value(c, "grid.h", "0.2,0.8");
  set_config_value(c, "grid.rho", "1.5,4");
  c.output_path = (dir() / "bench_a.csv").string();
  const auto r = run_command(Mode::Benchmark, c);
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_benchmark_table(read_text_file(c.output_path));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].rows == 6);
  CHECK(rows[0].a == 5.0);
  CHECK(rows[1].a == 10.0);
  CHECK(rows[2].rows == 7);
  CHECK(rows[3].replications == 3);
  const auto reps = read_csv_file(dir() / "bench_a.replications.csv");
  CHECK(reps.size() == 1 + 4 * 3);

  c.output_path = (dir() / "bench_b.csv").string();
  c.threads = 2;
  REQUIRE(run_command(Mode::Benchmark, c).exit_code == 0);
  CHECK(read_text_file(dir() / "bench_a.csv") == read_text_file(dir() / "bench_b.csv"));
  CHECK(read_text_file(dir() / "bench_a.replications.csv") == read_text_file(dir() / "bench_b.replications.csv"));

  c.replications = 1;
  CHECK(run_command(Mode::Benchmark, c).exit_code == 1);
  c.replications = 3;
  c.seed.reset();
  const auto unseeded = run_command(Mode::Benchmark, c);
  CHECK(unseeded.exit_code == 1);
  CHECK(contains(unseeded.summary, "seed"));
}

TEST_CASE("command-line binary") {
  SUBCASE("help and flags") {
    const auto h = cli("--help");
    CHECK(h.code == 0);
    for (const char* flag : {"--config", "--seed", "--threads", "--output", "--format", "simulate", "cv", "predict",
                             "classify", "benchmark"})
      CHECK_MESSAGE(contains(h.out, flag), flag);
    CHECK(cli("benchmark --help").code == 0);
    CHECK(cli("--no-such-flag").code == 1);
    CHECK(cli("simulate --no-such-flag").code == 1);
    CHECK(cli("").code == 1);
    CHECK(cli("simulate --format json").code == 1);
    CHECK(cli("simulate --threads 0").code == 1);
    CHECK(cli("simulate --config /nonexistent.conf").code == 1);
  }

  SUBCASE("simulate twice") {
    const auto a = dir() / "cli_sim_a.csv", b = dir() / "cli_sim_b.csv";
    const auto err = dir() / "cli_sim.err";
    const auto r = cli("simulate --seed 9 --output " + a.string(), err);
    CHECK(r.code == 0);
    CHECK(contains(r.out, "wrote 625 sites"));
    CHECK(contains(read_text_file(err), "[spknn]"));
    CHECK(cli("simulate --quiet --seed 9 --output " + b.string(), err).code == 0);
    CHECK(read_text_file(err).empty());
    CHECK(read_text_file(a) == read_text_file(b));
    CHECK(cli("simulate --seed 9 --set simulation.a=0 --output " + b.string()).code == 1);
    CHECK(cli("simulate --seed 9 --set simulation.nope=1 --output " + b.string()).code == 1);
    CHECK(cli("simulate --seed 9 --set badpair --output " + b.string()).code == 1);
  }

  SUBCASE("config file, overrides and echo") {
    const auto conf = dir() / "bench.conf";
    write_text_file(conf,
                    "seed = 1\n[simulation]\nshape = 6x6\na = 5\nz_variance = 0.1, 5\nreplications = 2\n"
                    "[grid]\nk = 3\nk_prime = 5, 10\nh = 0.5\nrho = 2\n");
    const auto echo = cli("benchmark --config " + conf.string() + " --seed 42 --set simulation.a=10 --print-config");
    CHECK(echo.code == 0);
    CHECK(contains(echo.out, "mode = benchmark\n"));
    CHECK(contains(echo.out, "seed = 42\n"));
    CHECK(contains(echo.out, "a = 10\n"));
    CHECK(contains(echo.out, "z_variance = 0.1,5\n"));
    CHECK(contains(echo.out, "k_prime = 5,10\n"));
    const auto reparsed = parse_config_text(echo.out);
    CHECK(render_config(reparsed) == echo.out);

    const auto a = dir() / "cli_bench_a.csv", b = dir() / "cli_bench_b.csv";
    CHECK(cli("benchmark --quiet --config " + conf.string() + " --output " + a.string()).code == 0);
    CHECK(cli("benchmark --quiet --threads 2 --config " + conf.string() + " --output " + b.string()).code == 0);
    CHECK(read_text_file(a) == read_text_file(b));
    CHECK(parse_benchmark_table(read_text_file(a)).size() == 2);
  }

  SUBCASE("benchmark needs a seed") {
    CHECK(cli("benchmark --quiet --set simulation.replications=2").code == 1);
  }

  SUBCASE("data errors map to exit 2") {
    CHECK(cli("cv --quiet --data " + (dir() / "absent.csv").string()).code == 2);
    const auto bad = dir() / "bad.csv";
    write_text_file(bad, "s1,s2,x,y\n0,0,zero,1\n");
    CHECK(cli("cv --quiet --data " + bad.string()).code == 2);
  }

  SUBCASE("thread cap from the environment") {
    const auto out = dir() / "env_sim.csv";
    const auto r = cli("simulate --quiet --seed 3 --output " + out.string());
    const auto e = ::setenv("SPKNN_THREADS", "2", 1);
    REQUIRE(e == 0);
    const auto with_env = cli("simulate --quiet --seed 3 --print-config");
    ::unsetenv("SPKNN_THREADS");
    CHECK(r.code == 0);
    CHECK(contains(with_env.out, "threads = 2\n"));
  }
}
