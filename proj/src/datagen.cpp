#include "imbal/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "imbal/error.hpp"
#include "imbal/metrics.hpp"

namespace imbal {

namespace {

void validate_spec(const GenSpec& spec) {
  require(!spec.classes.empty(), ErrorCode::InvalidSpec, "genspec: no classes");
  require(spec.n_features >= 1, ErrorCode::InvalidSpec, "genspec: n_features must be >= 1");
  require(spec.feature_names.empty() ||
              int(spec.feature_names.size()) == spec.n_features,
          ErrorCode::InvalidSpec, "genspec: one feature name per feature required");
  for (const auto& cls : spec.classes) {
    require(cls.count >= 1, ErrorCode::InvalidSpec, "genspec: class counts must be >= 1");
    require(!cls.components.empty(), ErrorCode::InvalidSpec, "genspec: class has no components");
    double weight_sum = 0.0;
    for (const auto& comp : cls.components) {
      require(int(comp.mean.size()) == spec.n_features, ErrorCode::InvalidSpec,
              "genspec: component mean has wrong dimension");
      require(int(comp.variance.size()) == spec.n_features, ErrorCode::InvalidSpec,
              "genspec: component variance has wrong dimension");
      for (double v : comp.variance) {
        require(v > 0.0, ErrorCode::InvalidSpec, "genspec: variances must be positive");
      }
      require(comp.weight >= 0.0, ErrorCode::InvalidSpec,
              "genspec: component weights must be non-negative");
      weight_sum += comp.weight;
    }
    require(std::abs(weight_sum - 1.0) < 1e-9, ErrorCode::InvalidSpec,
            "genspec: component weights must sum to 1");
  }
}

// Count-weighted center of the class means, the fixed point of separation
// scaling.
std::vector<double> weighted_center(const GenSpec& spec) {
  std::vector<double> center(std::size_t(spec.n_features), 0.0);
  double total = 0.0;
  for (const auto& cls : spec.classes) {
    for (int j = 0; j < spec.n_features; ++j) {
      double mean_j = 0.0;
      for (const auto& comp : cls.components) mean_j += comp.weight * comp.mean[std::size_t(j)];
      center[std::size_t(j)] += double(cls.count) * mean_j;
    }
    total += double(cls.count);
  }
  for (auto& c : center) c /= total;
  return center;
}

GenSpec scale_separation(const GenSpec& spec, const std::vector<double>& center, double s) {
  GenSpec scaled = spec;
  for (auto& cls : scaled.classes) {
    for (auto& comp : cls.components) {
      for (int j = 0; j < spec.n_features; ++j) {
        comp.mean[std::size_t(j)] =
            center[std::size_t(j)] + s * (comp.mean[std::size_t(j)] - center[std::size_t(j)]);
      }
    }
  }
  return scaled;
}

GaussComponent component_from_json(const nlohmann::json& j) {
  GaussComponent comp;
  comp.mean = j.at("mean").get<std::vector<double>>();
  comp.variance = j.at("variance").get<std::vector<double>>();
  comp.weight = j.value("weight", 1.0);
  return comp;
}

double parse_cell(const std::string& cell, bool& ok) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  double value = 0.0;
  const auto result = std::from_chars(begin, end, value);
  ok = result.ec == std::errc() && result.ptr == end && !cell.empty();
  return value;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

GenSpec genspec_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidSpec, std::string("genspec: bad JSON: ") + e.what());
  }
  GenSpec spec;
  try {
    spec.n_features = j.value("n_features", 2);
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.fdr_tolerance = j.value("fdr_tolerance", 0.05);
    if (j.contains("target_fdr")) spec.target_fdr = j.at("target_fdr").get<double>();
    if (j.contains("feature_names")) {
      spec.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    }
    for (const auto& jc : j.at("classes")) {
      ClassSpec cls;
      cls.count = jc.at("count").get<std::int64_t>();
      for (const auto& comp : jc.at("components")) cls.components.push_back(component_from_json(comp));
      spec.classes.push_back(std::move(cls));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidSpec, std::string("genspec: missing or mistyped field: ") + e.what());
  }
  validate_spec(spec);
  return spec;
}

std::string genspec_to_json(const GenSpec& spec) {
  nlohmann::json j;
  j["n_features"] = spec.n_features;
  j["seed"] = spec.seed;
  j["fdr_tolerance"] = spec.fdr_tolerance;
  if (spec.target_fdr) j["target_fdr"] = *spec.target_fdr;
  if (!spec.feature_names.empty()) j["feature_names"] = spec.feature_names;
  j["classes"] = nlohmann::json::array();
  for (const auto& cls : spec.classes) {
    nlohmann::json jc;
    jc["count"] = cls.count;
    jc["components"] = nlohmann::json::array();
    for (const auto& comp : cls.components) {
      jc["components"].push_back(
          {{"mean", comp.mean}, {"variance", comp.variance}, {"weight", comp.weight}});
    }
    j["classes"].push_back(std::move(jc));
  }
  return j.dump(2);
}

Dataset generate(const GenSpec& spec) {
  validate_spec(spec);
  std::int64_t total = 0;
  for (const auto& cls : spec.classes) total += cls.count;

  Rng rng(spec.seed);
  Matrix f(total, spec.n_features);
  std::vector<int> labels;
  labels.reserve(std::size_t(total));

  std::int64_t row = 0;
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    const auto& cls = spec.classes[c];
    for (std::int64_t i = 0; i < cls.count; ++i) {
      // Component choice burns one uniform regardless of the mixture size,
      // so separation scaling never shifts the draw sequence.
      const double u = rng.uniform();
      std::size_t pick = 0;
      double cum = 0.0;
      for (std::size_t k = 0; k < cls.components.size(); ++k) {
        cum += cls.components[k].weight;
        if (u < cum) {
          pick = k;
          break;
        }
        pick = k;  // weights sum to 1; keep the last on rounding shortfall
      }
      const auto& comp = cls.components[pick];
      for (int j = 0; j < spec.n_features; ++j) {
        f(row, j) = rng.normal(comp.mean[std::size_t(j)],
                               std::sqrt(comp.variance[std::size_t(j)]));
      }
      labels.push_back(int(c));
      ++row;
    }
  }
  return Dataset::create(std::move(f), std::move(labels), int(spec.classes.size()));
}

GenSpec calibrate_to_fdr(const GenSpec& spec) {
  validate_spec(spec);
  require(spec.target_fdr.has_value() && *spec.target_fdr > 0.0, ErrorCode::InvalidSpec,
          "calibrate_to_fdr: positive target_fdr required");
  require(spec.classes.size() >= 2, ErrorCode::InvalidSpec,
          "calibrate_to_fdr: need >= 2 classes");

  const double target = *spec.target_fdr;
  const double tol = spec.fdr_tolerance;
  const auto center = weighted_center(spec);
  const auto measure = [&](double s) {
    return compute_fdr(generate(scale_separation(spec, center, s))).mean;
  };

  double lo = 1e-3, hi = 1e3;
  const double f_lo = measure(lo);
  if (std::abs(f_lo - target) <= tol) return scale_separation(spec, center, lo);
  const double f_hi = measure(hi);
  if (std::abs(f_hi - target) <= tol) return scale_separation(spec, center, hi);
  require(f_lo < target && target < f_hi, ErrorCode::CalibrationFailed,
          "calibrate_to_fdr: target outside the reachable separation range");

  for (int iter = 0; iter < 60; ++iter) {
    const double mid = std::sqrt(lo * hi);  // geometric: the range spans six decades
    const double f_mid = measure(mid);
    if (std::abs(f_mid - target) <= tol) return scale_separation(spec, center, mid);
    (f_mid < target ? lo : hi) = mid;
  }
  fail(ErrorCode::CalibrationFailed, "calibrate_to_fdr: no convergence within 60 bisections");
}

GenSpec detection_analog_spec() {
  // A radially thin failure strip rides the normal cloud's shoulder, holding
  // its posterior just under one half along its whole length: the prior-driven
  // majority vote misses it, while any prior-shifted learner captures it at a
  // near-even precision trade. The far mass keeps the count-weighted Fisher
  // ratio at the low target by inflating within-class scatter.
  GenSpec spec;
  spec.seed = 7001;
  spec.feature_names = {"BER", "OSNR_rx"};
  spec.target_fdr = 0.769;
  spec.fdr_tolerance = 0.05;
  spec.classes = {
      {7859, {{{0.0, 0.0}, {1.0, 1.0}, 1.0}}},
      {194, {{{2.55, 0.0}, {0.06, 1.2}, 0.35}, {{9.5, 9.5}, {1.0, 1.0}, 0.65}}},
  };
  return spec;
}

GenSpec soft_failure_analog_spec() {
  // Unit-variance classes land ~7 sigma apart at the 2.254 target: no
  // boundary region at all.
  GenSpec spec;
  spec.seed = 7002;
  spec.feature_names = {"BER", "OSNR_rx"};
  spec.target_fdr = 2.254;
  spec.fdr_tolerance = 0.05;
  spec.classes = {
      {6253, {{{0.0, 0.0}, {1.0, 1.0}, 1.0}}},
      {714, {{{4.0, 4.0}, {1.0, 1.0}, 1.0}}},
  };
  return spec;
}

GenSpec identification_analog_spec() {
  // Classes 1, 2 and 4 share a tight region; 0, 3 and 5 sit far apart.
  GenSpec spec;
  spec.seed = 7003;
  spec.feature_names = {"BER", "OSNR_rx"};
  spec.target_fdr = 181.2;
  spec.fdr_tolerance = 5.0;
  spec.classes = {
      {2184, {{{0.0, 0.0}, {1.0, 1.0}, 1.0}}},
      {224, {{{12.0, 12.0}, {1.0, 1.0}, 1.0}}},
      {152, {{{13.2, 12.0}, {1.0, 1.0}, 1.0}}},
      {991, {{{24.0, 0.0}, {1.0, 1.0}, 1.0}}},
      {254, {{{12.0, 13.4}, {1.0, 1.0}, 1.0}}},
      {325, {{{0.0, 24.0}, {1.0, 1.0}, 1.0}}},
  };
  return spec;
}

CsvSchema default_schema(const Dataset& ds, const std::vector<std::string>& feature_names) {
  require(feature_names.empty() || std::int64_t(feature_names.size()) == ds.n_features(),
          ErrorCode::InvalidArgument, "default_schema: one name per feature required");
  CsvSchema schema;
  if (feature_names.empty()) {
    for (std::int64_t j = 0; j < ds.n_features(); ++j) {
      schema.feature_columns.push_back("f" + std::to_string(j));
    }
  } else {
    schema.feature_columns = feature_names;
  }
  for (int c = 0; c < ds.n_classes; ++c) schema.label_mapping[std::to_string(c)] = c;
  return schema;
}

CsvLoadResult load_csv(const std::string& path, const CsvSchema& schema) {
  require(!schema.feature_columns.empty(), ErrorCode::InvalidArgument,
          "load_csv: schema needs feature columns");
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "load_csv: cannot open " + path);

  std::string line;
  require(bool(std::getline(in, line)), ErrorCode::IoError, "load_csv: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);

  const auto column_of = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    require(it != header.end(), ErrorCode::MissingColumn, "load_csv: missing column " + name);
    return std::size_t(it - header.begin());
  };
  std::vector<std::size_t> feature_cols;
  for (const auto& name : schema.feature_columns) feature_cols.push_back(column_of(name));
  const std::size_t label_col = column_of(schema.label_column);

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::int64_t dropped = 0;
  int max_label = -1;
  for (const auto& [name, id] : schema.label_mapping) max_label = std::max(max_label, id);

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);

    std::vector<double> row(feature_cols.size());
    bool valid = true;
    for (std::size_t j = 0; j < feature_cols.size() && valid; ++j) {
      if (feature_cols[j] >= cells.size()) {
        valid = false;
        break;
      }
      bool ok = false;
      row[j] = parse_cell(cells[feature_cols[j]], ok);
      valid = ok && std::isfinite(row[j]);
    }
    if (!valid) {
      ++dropped;
      continue;
    }

    require(label_col < cells.size(), ErrorCode::UnmappableLabel,
            "load_csv: row is missing its label cell");
    const auto it = schema.label_mapping.find(cells[label_col]);
    require(it != schema.label_mapping.end(), ErrorCode::UnmappableLabel,
            "load_csv: no mapping for label \"" + cells[label_col] + "\"");
    rows.push_back(std::move(row));
    labels.push_back(it->second);
  }
  require(!rows.empty(), ErrorCode::EmptyAfterCleaning,
          "load_csv: no rows survived cleaning (" + std::to_string(dropped) + " dropped)");

  Matrix f(std::int64_t(rows.size()), std::int64_t(feature_cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      f(std::int64_t(i), std::int64_t(j)) = rows[i][j];
    }
  }
  CsvLoadResult result;
  result.dataset = Dataset::create(std::move(f), std::move(labels), max_label + 1);
  result.dropped_rows = dropped;
  return result;
}

void save_csv(const std::string& path, const Dataset& ds, const CsvSchema& schema) {
  require(std::int64_t(schema.feature_columns.size()) == ds.n_features(),
          ErrorCode::InvalidArgument, "save_csv: one column name per feature required");
  std::map<int, std::string> reverse;
  for (const auto& [name, id] : schema.label_mapping) reverse.emplace(id, name);

  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "save_csv: cannot open " + path);

  for (std::size_t j = 0; j < schema.feature_columns.size(); ++j) {
    out << schema.feature_columns[j] << ',';
  }
  out << schema.label_column << '\n';

  char buf[64];
  for (std::int64_t i = 0; i < ds.n_samples(); ++i) {
    for (std::int64_t j = 0; j < ds.n_features(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", ds.features(i, j));
      out << buf << ',';
    }
    const auto it = reverse.find(ds.labels[std::size_t(i)]);
    require(it != reverse.end(), ErrorCode::UnmappableLabel,
            "save_csv: no name for class " + std::to_string(ds.labels[std::size_t(i)]));
    out << it->second << '\n';
  }
  require(out.good(), ErrorCode::IoError, "save_csv: write failed for " + path);
}

}  // namespace imbal
