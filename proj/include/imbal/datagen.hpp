#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imbal/dataset.hpp"
#include "imbal/rng.hpp"

namespace imbal {

// One Gaussian mixture component with diagonal covariance.
struct GaussComponent {
  std::vector<double> mean;
  std::vector<double> variance;  // diagonal entries, all positive
  double weight = 1.0;           // per-class component weights sum to 1
};

struct ClassSpec {
  std::int64_t count = 0;
  std::vector<GaussComponent> components;
};

struct GenSpec {
  std::vector<ClassSpec> classes;
  int n_features = 2;
  std::vector<std::string> feature_names;  // empty = f0, f1, ...
  std::optional<double> target_fdr;
  double fdr_tolerance = 0.05;
  std::uint64_t seed = 0;
};

// JSON round trip for spec files ("classes" array of {count, components}).
GenSpec genspec_from_json(const std::string& json_text);
std::string genspec_to_json(const GenSpec& spec);

// Samples each class from its mixture; rows grouped by class id, exact
// counts, deterministic under spec.seed.
Dataset generate(const GenSpec& spec);

// Scales the between-class mean separation (a single scalar around the
// count-weighted center) by bisection until compute_fdr(generate(spec))
// lands within target_fdr +- fdr_tolerance. Returns the adjusted spec.
GenSpec calibrate_to_fdr(const GenSpec& spec);

// The paper-regime analogs: class counts are fixed, separability comes from
// calibrate_to_fdr on the returned spec.
GenSpec detection_analog_spec();       // {7859, 194}, low-FDR overlap, target 0.769
GenSpec soft_failure_analog_spec();    // {6253, 714}, fully separated, target 2.254
GenSpec identification_analog_spec();  // 6 classes, Table-style counts, target 181.2

struct CsvSchema {
  std::vector<std::string> feature_columns;
  std::string label_column = "label";
  std::map<std::string, int> label_mapping;
};

// Identity mapping "0".."C-1" with f0..f{d-1} (or the given names) columns.
CsvSchema default_schema(const Dataset& ds, const std::vector<std::string>& feature_names = {});

struct CsvLoadResult {
  Dataset dataset;
  std::int64_t dropped_rows = 0;  // rows lost to non-numeric/empty feature cells
};

// Comma-separated, "." decimal, case-sensitive header required. Rows with a
// non-numeric or empty feature cell are dropped and counted; labels are
// mapped verbatim through schema.label_mapping.
CsvLoadResult load_csv(const std::string& path, const CsvSchema& schema);

// Round-trips through load_csv bit-exactly (17 significant digits).
void save_csv(const std::string& path, const Dataset& ds, const CsvSchema& schema);

}  // namespace imbal
