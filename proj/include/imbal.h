/* C API of the imbalance toolkit's benchmark harness.
 *
 * Every function returns an imbal_status: 0 on success, otherwise one of the
 * stable error codes below (they mirror the C++ ErrorCode enum one-to-one).
 * On failure, imbal_last_error() returns a thread-local message describing
 * what went wrong. Handles are opaque and must be released with their _free
 * function; all other pointers are borrowed for the duration of the call.
 */
#ifndef IMBAL_H
#define IMBAL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int32_t imbal_status;

#define IMBAL_OK 0
#define IMBAL_INVALID_ARGUMENT 1
#define IMBAL_INVALID_SPEC 24
#define IMBAL_CALIBRATION_FAILED 25
#define IMBAL_IO_ERROR 29
#define IMBAL_CONFIG_ERROR 30
#define IMBAL_INTERNAL 32

/* "major.minor.patch" of the library. */
const char* imbal_version(void);

/* Stable name of a status code ("Ok", "ConfigError", ...); "Unknown" for
 * values outside the enum. */
const char* imbal_status_name(imbal_status status);

/* Message of the most recent failure on the calling thread; "" if the last
 * call succeeded. The pointer stays valid until the thread's next API call. */
const char* imbal_last_error(void);

/* --- benchmark runs ----------------------------------------------------- */

/* Rows of a completed benchmark run (or a reloaded report). */
typedef struct imbal_bench_result imbal_bench_result;

/* Parses the JSON config, runs the full dataset x technique matrix, and
 * hands back the aggregated rows. Overrides replace config values when
 * non-negative (reps_override/parallel_override > 0, seed_override >= 0);
 * pass -1 to keep the config's values. */
imbal_status imbal_bench_run(const char* config_json, int32_t reps_override,
                             int64_t seed_override, int32_t parallel_override,
                             imbal_bench_result** out);

/* Reloads the rows of a previously written CSV report. */
imbal_status imbal_report_load(const char* csv_path, imbal_bench_result** out);

imbal_status imbal_bench_row_count(const imbal_bench_result* result, size_t* out);

/* Rows whose status is "ok" (techniques that completed every repetition). */
imbal_status imbal_bench_ok_count(const imbal_bench_result* result, size_t* out);

/* Copies row `index` as a CSV line (no trailing newline, NUL-terminated)
 * into buf. Fails with InvalidArgument when buf_len is too small. */
imbal_status imbal_bench_row_csv(const imbal_bench_result* result, size_t index, char* buf,
                                 size_t buf_len);

/* format: 0 = CSV, 1 = JSON. */
imbal_status imbal_bench_write_report(const imbal_bench_result* result, int32_t format,
                                      const char* path);

/* Writes f1_<dataset>.svg and tradeoff_<dataset>.svg per dataset. */
imbal_status imbal_bench_write_charts(const imbal_bench_result* result, const char* out_dir);

void imbal_bench_result_free(imbal_bench_result* result);

/* --- dataset generation -------------------------------------------------- */

/* Parses a generator spec (JSON), calibrates the class separation when the
 * spec carries a target_fdr, and writes the sampled dataset as CSV. */
imbal_status imbal_datagen_csv(const char* genspec_json, const char* out_csv_path);

#ifdef __cplusplus
}
#endif

#endif /* IMBAL_H */
