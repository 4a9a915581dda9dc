// `bench` command-line front end. Talks to the toolkit exclusively through
// the C API so it exercises the same surface any other binding would.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <CLI11.hpp>

#include "imbal.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;     // bad invocation, config, spec, or input file
constexpr int kExitAllFailed = 3;  // the matrix ran but no cell finished "ok"

int fail_with(const char* stage, imbal_status status) {
  // imbal_last_error() already leads with the status name for library errors.
  const char* message = imbal_last_error();
  if (*message == '\0') message = imbal_status_name(status);
  std::fprintf(stderr, "bench: %s: %s\n", stage, message);
  return kExitConfig;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  out.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return true;
}

// BENCH_THREADS, when set, beats --parallel.
bool apply_thread_env(int& parallel) {
  const char* env = std::getenv("BENCH_THREADS");
  if (env == nullptr || *env == '\0') return true;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) {
    std::fprintf(stderr, "bench: BENCH_THREADS must be a positive integer, got '%s'\n", env);
    return false;
  }
  parallel = static_cast<int>(v);
  return true;
}

int run_command(const std::string& config_path, const std::string& out_dir, int reps,
                long long seed, int parallel) {
  std::string config;
  if (!read_file(config_path, config)) {
    std::fprintf(stderr, "bench: cannot read config '%s'\n", config_path.c_str());
    return kExitConfig;
  }
  if (!apply_thread_env(parallel)) return kExitConfig;

  imbal_bench_result* result = nullptr;
  imbal_status status = imbal_bench_run(config.c_str(), reps, seed, parallel, &result);
  if (status != IMBAL_OK) return fail_with("run", status);

  std::error_code fs_error;
  std::filesystem::create_directories(out_dir, fs_error);
  status = imbal_bench_write_report(result, 0, (out_dir + "/rows.csv").c_str());
  if (status == IMBAL_OK) status = imbal_bench_write_report(result, 1, (out_dir + "/rows.json").c_str());
  if (status != IMBAL_OK) {
    imbal_bench_result_free(result);
    return fail_with("writing reports", status);
  }
  status = imbal_bench_write_charts(result, out_dir.c_str());
  if (status != IMBAL_OK) {
    imbal_bench_result_free(result);
    return fail_with("writing charts", status);
  }

  size_t rows = 0, ok = 0;
  imbal_bench_row_count(result, &rows);
  imbal_bench_ok_count(result, &ok);
  imbal_bench_result_free(result);
  std::printf("wrote %zu rows (%zu ok) to %s\n", rows, ok, out_dir.c_str());
  return ok == 0 ? kExitAllFailed : kExitOk;
}

int datagen_command(const std::string& spec_path, const std::string& out_csv) {
  std::string spec;
  if (!read_file(spec_path, spec)) {
    std::fprintf(stderr, "bench: cannot read spec '%s'\n", spec_path.c_str());
    return kExitConfig;
  }
  imbal_status status = imbal_datagen_csv(spec.c_str(), out_csv.c_str());
  if (status != IMBAL_OK) return fail_with("datagen", status);
  std::printf("wrote %s\n", out_csv.c_str());
  return kExitOk;
}

int report_command(const std::string& rows_path, bool charts, std::string out_dir) {
  imbal_bench_result* result = nullptr;
  imbal_status status = imbal_report_load(rows_path.c_str(), &result);
  if (status != IMBAL_OK) return fail_with("loading rows", status);

  if (out_dir.empty()) {
    std::filesystem::path parent = std::filesystem::path(rows_path).parent_path();
    out_dir = parent.empty() ? std::string(".") : parent.string();
  }
  std::error_code fs_error;
  std::filesystem::create_directories(out_dir, fs_error);
  status = imbal_bench_write_report(result, 1, (out_dir + "/rows.json").c_str());
  if (status == IMBAL_OK && charts) status = imbal_bench_write_charts(result, out_dir.c_str());
  if (status != IMBAL_OK) {
    imbal_bench_result_free(result);
    return fail_with("report", status);
  }

  size_t rows = 0, ok = 0;
  imbal_bench_row_count(result, &rows);
  imbal_bench_ok_count(result, &ok);
  imbal_bench_result_free(result);
  std::printf("reloaded %zu rows (%zu ok) into %s\n", rows, ok, out_dir.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"class-imbalance mitigation benchmark harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int reps = -1, parallel = -1;
  long long seed = -1;
  auto* run = app.add_subcommand("run", "Run the dataset x technique matrix from a JSON config");
  run->add_option("--config", config_path, "benchmark config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory for rows.csv/rows.json/charts")->required();
  run->add_option("--reps", reps, "override the config's repetitions")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "override the config's master seed")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--parallel", parallel, "worker count (BENCH_THREADS env wins)")
      ->check(CLI::PositiveNumber);

  std::string spec_path, out_csv;
  auto* datagen = app.add_subcommand("datagen", "Sample a dataset from a generator spec (JSON)");
  datagen->add_option("--spec", spec_path, "generator spec (JSON)")->required();
  datagen->add_option("--out", out_csv, "output CSV path")->required();

  std::string rows_path, report_dir;
  bool charts = false;
  auto* report = app.add_subcommand("report", "Re-emit JSON (and charts) from a rows CSV");
  report->add_option("--rows", rows_path, "rows.csv from a previous run")->required();
  report->add_flag("--charts", charts, "also regenerate the SVG charts");
  report->add_option("--out", report_dir, "output directory (default: alongside the CSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (run->parsed()) return run_command(config_path, out_dir, reps, seed, parallel);
  if (datagen->parsed()) return datagen_command(spec_path, out_csv);
  return report_command(rows_path, charts, report_dir);
}
