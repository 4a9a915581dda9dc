#include "imbal.h"

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "imbal/bench.hpp"
#include "imbal/datagen.hpp"
#include "imbal/error.hpp"

struct imbal_bench_result {
  std::vector<imbal::BenchRow> rows;
};

namespace {

thread_local std::string g_last_error;

// Runs the body, translating exceptions into status codes + the thread-local
// message. Success clears the message so stale errors never leak through.
template <typename Fn>
imbal_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return IMBAL_OK;
  } catch (const imbal::ImbError& e) {
    g_last_error = e.what();
    return static_cast<imbal_status>(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IMBAL_INTERNAL;
  }
}

imbal_status invalid(const char* message) {
  g_last_error = message;
  return IMBAL_INVALID_ARGUMENT;
}

std::string row_as_csv(const imbal::BenchRow& r) {
  char buf[64];
  std::string line = r.dataset + "," + r.technique;
  for (double v : {r.mean_f1, r.vmr, r.train_ms, r.infer_ms_per_1k, r.improvement_pct}) {
    std::snprintf(buf, sizeof buf, "%.6g", v);
    line += ",";
    line += buf;
  }
  line += "," + std::to_string(r.reps) + "," + r.status;
  return line;
}

}  // namespace

extern "C" {

const char* imbal_version(void) { return "1.0.0"; }

const char* imbal_status_name(imbal_status status) {
  if (status < 0 || status > static_cast<imbal_status>(imbal::ErrorCode::Internal))
    return "Unknown";
  return imbal::error_code_name(static_cast<imbal::ErrorCode>(status));
}

const char* imbal_last_error(void) { return g_last_error.c_str(); }

imbal_status imbal_bench_run(const char* config_json, int32_t reps_override,
                             int64_t seed_override, int32_t parallel_override,
                             imbal_bench_result** out) {
  if (config_json == nullptr) return invalid("config_json must not be null");
  if (out == nullptr) return invalid("out must not be null");
  *out = nullptr;
  return guarded([&] {
    imbal::BenchConfig cfg = imbal::bench_config_from_json(config_json);
    if (reps_override > 0) cfg.repetitions = reps_override;
    if (seed_override >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed_override);
    if (parallel_override > 0) cfg.parallel = parallel_override;
    auto* result = new imbal_bench_result{imbal::run_benchmark(cfg)};
    *out = result;
  });
}

imbal_status imbal_report_load(const char* csv_path, imbal_bench_result** out) {
  if (csv_path == nullptr) return invalid("csv_path must not be null");
  if (out == nullptr) return invalid("out must not be null");
  *out = nullptr;
  return guarded([&] { *out = new imbal_bench_result{imbal::load_report_csv(csv_path)}; });
}

imbal_status imbal_bench_row_count(const imbal_bench_result* result, size_t* out) {
  if (result == nullptr || out == nullptr) return invalid("result and out must not be null");
  *out = result->rows.size();
  g_last_error.clear();
  return IMBAL_OK;
}

imbal_status imbal_bench_ok_count(const imbal_bench_result* result, size_t* out) {
  if (result == nullptr || out == nullptr) return invalid("result and out must not be null");
  size_t n = 0;
  for (const auto& r : result->rows)
    if (r.ok()) ++n;
  *out = n;
  g_last_error.clear();
  return IMBAL_OK;
}

imbal_status imbal_bench_row_csv(const imbal_bench_result* result, size_t index, char* buf,
                                 size_t buf_len) {
  if (result == nullptr || buf == nullptr) return invalid("result and buf must not be null");
  if (index >= result->rows.size()) return invalid("row index out of range");
  std::string line = row_as_csv(result->rows[index]);
  if (line.size() + 1 > buf_len) return invalid("buffer too small for row");
  std::memcpy(buf, line.c_str(), line.size() + 1);
  g_last_error.clear();
  return IMBAL_OK;
}

imbal_status imbal_bench_write_report(const imbal_bench_result* result, int32_t format,
                                      const char* path) {
  if (result == nullptr || path == nullptr) return invalid("result and path must not be null");
  if (format != 0 && format != 1) return invalid("format must be 0 (csv) or 1 (json)");
  return guarded([&] {
    imbal::emit_report(result->rows,
                       format == 0 ? imbal::ReportFormat::csv : imbal::ReportFormat::json, path);
  });
}

imbal_status imbal_bench_write_charts(const imbal_bench_result* result, const char* out_dir) {
  if (result == nullptr || out_dir == nullptr) return invalid("result and out_dir must not be null");
  return guarded([&] { imbal::emit_charts(result->rows, out_dir); });
}

void imbal_bench_result_free(imbal_bench_result* result) { delete result; }

imbal_status imbal_datagen_csv(const char* genspec_json, const char* out_csv_path) {
  if (genspec_json == nullptr || out_csv_path == nullptr)
    return invalid("genspec_json and out_csv_path must not be null");
  return guarded([&] {
    imbal::GenSpec spec = imbal::genspec_from_json(genspec_json);
    if (spec.target_fdr.has_value()) spec = imbal::calibrate_to_fdr(spec);
    imbal::Dataset ds = imbal::generate(spec);
    imbal::save_csv(out_csv_path, ds, imbal::default_schema(ds, spec.feature_names));
  });
}

}  // extern "C"
