#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imbal/datagen.hpp"
#include "imbal/dataset.hpp"

namespace imbal {

// Where a benchmark dataset comes from: an inline generator spec (possibly
// one of the canned analogs) or a CSV file on disk.
struct BenchDataset {
  std::string id;
  std::optional<GenSpec> gen;  // generator-backed when set
  std::string csv_path;        // file-backed otherwise
  CsvSchema schema;            // column layout for csv_path

  // Baseline learner for this task: "forest" or "mlp". Techniques that fit
  // a plain model (baseline, pre- and post-processors) use this learner.
  std::string baseline = "forest";
  std::map<std::string, double> baseline_params;  // learner knobs (n_estimators, epochs, ...)
};

struct BenchTechnique {
  std::string id;  // registry key; "baseline" is always available
  std::map<std::string, double> params;
};

struct BenchConfig {
  std::vector<BenchDataset> datasets;
  std::vector<BenchTechnique> techniques;  // "baseline" is prepended when absent
  int repetitions = 100;
  double test_fraction = 0.2;
  double tuning_fraction = 0.2;  // post-processors tune on this split only
  std::uint64_t master_seed = 0;
  std::string out_dir;
  std::string averaging = "mean";  // "mean" or "median" for the timing columns
  // false zeroes every wall-clock read so the full report becomes a pure
  // function of the seed (byte-identical across runs and machines).
  bool timing = true;
  int parallel = 1;
};

// Parses and validates the JSON config schema documented in the README.
// Unknown keys, malformed entries, and unregistered technique ids all
// throw ConfigError before anything runs.
BenchConfig bench_config_from_json(const std::string& text);

struct BenchRow {
  std::string dataset;
  std::string technique;
  double mean_f1 = 0.0;
  double vmr = 0.0;
  double train_ms = 0.0;         // per the configured averaging mode
  double infer_ms_per_1k = 0.0;  // wall-clock per 1000 test samples
  double improvement_pct = 0.0;  // vs the dataset's baseline row; baseline = 0 exactly
  int reps = 0;                  // completed repetitions
  std::string status = "ok";     // "ok" or "n/a: <error id>"

  // Both aggregations are kept on the row; the serialized columns pick one.
  double train_ms_mean = 0.0;
  double train_ms_median = 0.0;
  double infer_ms_per_1k_mean = 0.0;
  double infer_ms_per_1k_median = 0.0;

  // Per-repetition F1 scores, retained for paired comparisons across
  // techniques (splits are seed-shared within a dataset). Not serialized.
  std::vector<double> f1_per_rep;

  bool ok() const { return status == "ok"; }
};

// Sorted ids of every registered technique implementation.
std::vector<std::string> registered_techniques();

// Generates (calibrating first when target_fdr is set) or loads the dataset
// behind a config entry.
Dataset materialize_dataset(const BenchDataset& spec);

// Runs the dataset x technique matrix, cfg.repetitions repetitions per
// cell. Split and model seeds are shared across techniques within a
// (dataset, repetition) pair so comparisons are paired; technique-specific
// randomness comes from a per-(dataset, technique, repetition) seed. A cell
// whose technique throws is reported with status "n/a: <error id>" and the
// run continues. Rows come back sorted by (dataset, technique).
std::vector<BenchRow> run_benchmark(const BenchConfig& cfg);

enum class ReportFormat { csv, json };

// Writes rows as CSV (columns exactly: dataset,technique,mean_f1,vmr,
// train_ms,infer_ms_per_1k,improvement_pct,reps,status) or as a JSON array
// mirroring those fields. Numbers carry 6 significant digits.
void emit_report(const std::vector<BenchRow>& rows, ReportFormat format, const std::string& path);

// Reads back a CSV written by emit_report (per-rep details are gone).
std::vector<BenchRow> load_report_csv(const std::string& path);

// Grouped mean-F1 bars with a dashed baseline reference line. Rows must all
// belong to one dataset; output is a standalone SVG 1.1 document and a pure
// function of the rows (byte-identical across reruns).
std::string render_f1_chart(const std::vector<BenchRow>& dataset_rows);

// Dual-axis trade-off chart: improvement-% bars on the left axis,
// inference-time markers on the right axis.
std::string render_tradeoff_chart(const std::vector<BenchRow>& dataset_rows);

// Writes f1_<dataset>.svg and tradeoff_<dataset>.svg per dataset id.
void emit_charts(const std::vector<BenchRow>& rows, const std::string& out_dir);

}  // namespace imbal
