#include "imbal/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "imbal/error.hpp"
#include "imbal/forest.hpp"
#include "imbal/inprocess.hpp"
#include "imbal/metrics.hpp"
#include "imbal/mlp.hpp"
#include "imbal/postprocess.hpp"
#include "imbal/preprocess.hpp"

namespace imbal {
namespace {

using nlohmann::json;

double param(const std::map<std::string, double>& params, const std::string& key, double dflt) {
  auto it = params.find(key);
  return it == params.end() ? dflt : it->second;
}

ForestConfig forest_config_from(const BenchDataset& d) {
  ForestConfig cfg;
  cfg.n_estimators = static_cast<int>(param(d.baseline_params, "n_estimators", 100));
  cfg.max_depth = static_cast<int>(param(d.baseline_params, "max_depth", -1));
  cfg.min_samples_leaf = static_cast<int>(param(d.baseline_params, "min_samples_leaf", 1));
  return cfg;
}

MlpConfig mlp_config_from(const BenchDataset& d) {
  MlpConfig cfg;  // empty layers = n_features-20-10-n_classes
  cfg.epochs = static_cast<int>(param(d.baseline_params, "epochs", 80));
  cfg.lr = param(d.baseline_params, "lr", 1e-3);
  cfg.batch_size = static_cast<int>(param(d.baseline_params, "batch_size", 16));
  cfg.patience = static_cast<int>(param(d.baseline_params, "patience", 20));
  return cfg;
}

// The plain learner every non-ensemble technique builds on: the dataset's
// configured baseline, fitted with the shared per-(dataset, rep) seed so
// post-processed pipelines wrap the exact model the baseline cell scores.
std::shared_ptr<const Model> fit_plain(const Dataset& train, const BenchDataset& d, Seed seed) {
  if (d.baseline == "mlp")
    return std::make_shared<MlpModel>(train_mlp(train, mlp_config_from(d), LossSpec{}, seed));
  return std::make_shared<ForestModel>(train_forest(train, forest_config_from(d), seed));
}

// One benchmark cell, resolved to the splits and seeds of one repetition.
struct Cell {
  const Dataset& train;
  const Dataset& tune;
  const BenchDataset& dspec;
  const BenchTechnique& tspec;
  Seed model_seed;  // shared across techniques within (dataset, rep)
  Seed tech_seed;   // unique per (dataset, technique, rep)
};

double p(const Cell& c, const std::string& key, double dflt) {
  return param(c.tspec.params, key, dflt);
}

// The timed region of a repetition: raw features in, final labels out, with
// any post-prediction adjustment inside.
using Predictor = std::function<std::vector<int>(const Matrix&)>;

Predictor plain_predictor(std::shared_ptr<const Model> model) {
  return [model](const Matrix& x) { return model->predict(x); };
}

std::vector<int> argmax_rows(const Matrix& probs) {
  std::vector<int> out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index best = 0;
    probs.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

Predictor tech_baseline(const Cell& c) {
  return plain_predictor(fit_plain(c.train, c.dspec, c.model_seed));
}

ResampleMethod method_for(const std::string& id) {
  static const std::map<std::string, ResampleMethod> table = {
      {"ros", ResampleMethod::ros},
      {"smote", ResampleMethod::smote},
      {"adasyn", ResampleMethod::adasyn},
      {"rus", ResampleMethod::rus},
      {"cluster_centroids", ResampleMethod::cluster_centroids},
      {"smote_tomek", ResampleMethod::smote_tomek},
      {"massaging", ResampleMethod::massaging},
      {"perturbation", ResampleMethod::perturbation},
      {"cluster_massaging", ResampleMethod::cluster_massaging},
      {"cvae", ResampleMethod::cvae},
  };
  return table.at(id);
}

Predictor tech_resample(const Cell& c) {
  ResampleSpec spec;
  spec.method = method_for(c.tspec.id);
  spec.k_neighbors = static_cast<int>(p(c, "k_neighbors", 5));
  spec.n_clusters = static_cast<int>(p(c, "n_clusters", 0));
  spec.flip_fraction = p(c, "flip_fraction", 0.20);
  spec.p_majority_flip = p(c, "p_majority_flip", 0.05);
  spec.p_minority_flip = p(c, "p_minority_flip", 0.0);
  spec.cvae.epochs = static_cast<int>(p(c, "epochs", 150));
  spec.cvae.latent_dim = static_cast<int>(p(c, "latent_dim", 4));
  spec.cvae.hidden = {static_cast<int>(p(c, "hidden", 16))};
  spec.cvae.lr = p(c, "lr", 1e-3);
  spec.cvae.batch_size = static_cast<int>(p(c, "batch_size", 16));
  spec.cvae.beta = p(c, "beta", 1.0);
  Dataset resampled = resample(c.train, spec, c.tech_seed);
  return plain_predictor(fit_plain(resampled, c.dspec, c.model_seed));
}

Predictor tech_weighted(const Cell& c) {
  WeightedFitConfig cfg;
  cfg.learner = c.dspec.baseline == "mlp" ? BaseLearner::mlp : BaseLearner::forest;
  cfg.forest = forest_config_from(c.dspec);
  cfg.mlp = mlp_config_from(c.dspec);
  return plain_predictor(weighted_fit(c.train, cfg, c.model_seed));
}

Predictor tech_focal(const Cell& c) {
  LossSpec loss;
  loss.kind = LossKind::focal;
  loss.gamma = p(c, "gamma", 2.0);
  return plain_predictor(
      std::make_shared<MlpModel>(train_mlp(c.train, mlp_config_from(c.dspec), loss, c.model_seed)));
}

Predictor tech_weighted_focal(const Cell& c) {
  WeightedFitConfig cfg;
  cfg.learner = BaseLearner::mlp;
  cfg.mlp = mlp_config_from(c.dspec);
  cfg.focal = true;
  cfg.gamma = p(c, "gamma", 2.0);
  return plain_predictor(weighted_fit(c.train, cfg, c.model_seed));
}

Predictor tech_bagging(const Cell& c) {
  BaggingConfig cfg;
  cfg.base = p(c, "base_mlp", 0.0) != 0.0 ? BaseLearner::mlp : BaseLearner::tree;
  cfg.n_estimators = static_cast<int>(p(c, "n_estimators", 10));
  cfg.tree.max_depth = static_cast<int>(p(c, "max_depth", -1));
  cfg.mlp = mlp_config_from(c.dspec);
  return plain_predictor(std::make_shared<EnsembleModel>(bagging_fit(c.train, cfg, c.tech_seed)));
}

Predictor tech_boosting(const Cell& c) {
  BoostingConfig cfg;
  cfg.n_rounds = static_cast<int>(p(c, "n_rounds", 10));
  cfg.tree.max_depth = static_cast<int>(p(c, "max_depth", 2));
  cfg.max_retries = static_cast<int>(p(c, "max_retries", 10));
  return plain_predictor(std::make_shared<EnsembleModel>(boosting_fit(c.train, cfg, c.tech_seed)));
}

Predictor tech_brf(const Cell& c) {
  int n_trees = static_cast<int>(p(c, "n_trees", param(c.dspec.baseline_params, "n_estimators", 100)));
  return plain_predictor(std::make_shared<ForestModel>(brf_fit(c.train, n_trees, c.tech_seed)));
}

Predictor tech_balanced_epochs(const Cell& c) {
  return plain_predictor(std::make_shared<MlpModel>(
      balanced_epoch_train(c.train, mlp_config_from(c.dspec), c.tech_seed)));
}

Predictor tech_meta(const Cell& c) {
  ForestConfig sub;
  sub.n_estimators = static_cast<int>(p(c, "submodel_trees", 10));
  sub.max_depth = static_cast<int>(p(c, "max_depth", -1));
  return plain_predictor(std::make_shared<MetaModel>(
      meta_fit(c.train, p(c, "contamination", 0.10), c.tech_seed, sub)));
}

Predictor rule_predictor(std::shared_ptr<const Model> model, ThresholdRule rule) {
  return [model, rule](const Matrix& x) { return rule.apply(model->predict_proba(x)); };
}

Predictor tech_threshold_adjustment(const Cell& c) {
  auto model = fit_plain(c.train, c.dspec, c.model_seed);
  Matrix probs = model->predict_proba(c.tune.features);
  double delta = p(c, "delta", 0.01);
  ThresholdRule rule;
  if (c.train.n_classes == 2) {
    std::vector<double> pos(static_cast<std::size_t>(probs.rows()));
    for (Eigen::Index i = 0; i < probs.rows(); ++i)
      pos[static_cast<std::size_t>(i)] = probs(i, 1);
    rule = tune_threshold(pos, c.tune.labels, delta);
  } else {
    rule = tune_thresholds_ovr(probs, c.tune.labels, delta);
  }
  return rule_predictor(model, rule);
}

Predictor tech_cost_threshold(const Cell& c) {
  CostSpec cost{p(c, "c_fp", 1.0), p(c, "c_fn", 4.0)};
  ThresholdRule rule;
  if (c.train.n_classes == 2) {
    rule.taus = {cost_threshold(cost)};
    rule.positive_class = 1;
  } else {
    rule = cost_thresholds_ovr(
        std::vector<CostSpec>(static_cast<std::size_t>(c.train.n_classes), cost));
  }
  return rule_predictor(fit_plain(c.train, c.dspec, c.model_seed), rule);
}

Predictor tech_reweighting(const Cell& c) {
  auto model = fit_plain(c.train, c.dspec, c.model_seed);
  ClassWeights cw = class_weights(c.train);
  double scale = p(c, "scale", 1.0);
  return [model, cw, scale](const Matrix& x) {
    return argmax_rows(reweight_predictions(model->predict_proba(x), cw, scale));
  };
}

Predictor tech_isotonic(const Cell& c) {
  auto model = fit_plain(c.train, c.dspec, c.model_seed);
  auto maps = isotonic_fit_ovr(model->predict_proba(c.tune.features), c.tune.labels);
  return [model, maps](const Matrix& x) {
    return argmax_rows(isotonic_apply_ovr(maps, model->predict_proba(x)));
  };
}

Predictor tech_sample_weighting(const Cell& c) {
  SampleWeightingConfig cfg;
  cfg.learner = p(c, "use_tree", 0.0) != 0.0 ? SampleWeightingConfig::Learner::tree
                                             : SampleWeightingConfig::Learner::forest;
  cfg.forest = forest_config_from(c.dspec);
  cfg.tree.max_depth = static_cast<int>(p(c, "max_depth", -1));
  cfg.factor = p(c, "factor", 2.0);
  return plain_predictor(sample_weighting(c.train, cfg, c.model_seed));
}

using TechniqueFn = Predictor (*)(const Cell&);

const std::map<std::string, TechniqueFn>& registry() {
  static const std::map<std::string, TechniqueFn> reg = {
      {"baseline", &tech_baseline},
      {"ros", &tech_resample},
      {"smote", &tech_resample},
      {"adasyn", &tech_resample},
      {"rus", &tech_resample},
      {"cluster_centroids", &tech_resample},
      {"smote_tomek", &tech_resample},
      {"massaging", &tech_resample},
      {"perturbation", &tech_resample},
      {"cluster_massaging", &tech_resample},
      {"cvae", &tech_resample},
      {"weighted", &tech_weighted},
      {"focal", &tech_focal},
      {"weighted_focal", &tech_weighted_focal},
      {"bagging", &tech_bagging},
      {"boosting", &tech_boosting},
      {"brf", &tech_brf},
      {"balanced_epochs", &tech_balanced_epochs},
      {"meta", &tech_meta},
      {"threshold_adjustment", &tech_threshold_adjustment},
      {"cost_threshold", &tech_cost_threshold},
      {"reweighting", &tech_reweighting},
      {"isotonic", &tech_isotonic},
      {"sample_weighting", &tech_sample_weighting},
  };
  return reg;
}

bool valid_id(const std::string& id) {
  if (id.empty()) return false;
  for (char ch : id) {
    bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
              ch == '_' || ch == '-' || ch == '.';
    if (!ok) return false;
  }
  return true;
}

void validate_config(const BenchConfig& cfg) {
  if (cfg.datasets.empty()) fail(ErrorCode::ConfigError, "config needs at least one dataset");
  std::set<std::string> ids;
  for (const auto& d : cfg.datasets) {
    if (!valid_id(d.id))
      fail(ErrorCode::ConfigError,
           "dataset id '" + d.id + "' must be non-empty [A-Za-z0-9_.-]");
    if (!ids.insert(d.id).second)
      fail(ErrorCode::ConfigError, "duplicate dataset id '" + d.id + "'");
    if (d.baseline != "forest" && d.baseline != "mlp")
      fail(ErrorCode::ConfigError, "dataset '" + d.id + "': baseline must be forest or mlp");
    if (d.gen.has_value() == !d.csv_path.empty())
      fail(ErrorCode::ConfigError,
           "dataset '" + d.id + "' needs exactly one of a generator spec or a csv path");
    if (!d.csv_path.empty() &&
        (d.schema.feature_columns.empty() || d.schema.label_mapping.empty()))
      fail(ErrorCode::ConfigError,
           "dataset '" + d.id + "': csv datasets need feature_columns and label_mapping");
  }
  if (cfg.techniques.empty()) fail(ErrorCode::ConfigError, "config needs at least one technique");
  std::set<std::string> tids;
  for (const auto& t : cfg.techniques) {
    if (!tids.insert(t.id).second)
      fail(ErrorCode::ConfigError, "duplicate technique id '" + t.id + "'");
    if (registry().find(t.id) == registry().end())
      fail(ErrorCode::ConfigError, "unknown technique id '" + t.id + "'");
  }
  if (cfg.repetitions < 1) fail(ErrorCode::ConfigError, "repetitions must be >= 1");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0) ||
      !(cfg.tuning_fraction > 0.0 && cfg.tuning_fraction < 1.0) ||
      cfg.test_fraction + cfg.tuning_fraction >= 1.0)
    fail(ErrorCode::ConfigError, "fractions must lie in (0,1) with test + tuning < 1");
  if (cfg.parallel < 1) fail(ErrorCode::ConfigError, "parallel must be >= 1");
  if (cfg.averaging != "mean" && cfg.averaging != "median")
    fail(ErrorCode::ConfigError, "averaging must be mean or median");
}

void ensure_baseline(std::vector<BenchTechnique>& techniques) {
  for (const auto& t : techniques)
    if (t.id == "baseline") return;
  techniques.insert(techniques.begin(), BenchTechnique{"baseline", {}});
}

// --- config JSON -----------------------------------------------------------

[[noreturn]] void bad_config(const std::string& message) {
  fail(ErrorCode::ConfigError, message);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : obj.items())
    if (allowed.find(item.key()) == allowed.end())
      bad_config("unknown key '" + item.key() + "' in " + where);
}

double num_or(const json& obj, const char* key, double dflt, const std::string& where) {
  if (!obj.contains(key)) return dflt;
  if (!obj.at(key).is_number()) bad_config(std::string(key) + " in " + where + " must be a number");
  return obj.at(key).get<double>();
}

std::string str_or(const json& obj, const char* key, const std::string& dflt,
                   const std::string& where) {
  if (!obj.contains(key)) return dflt;
  if (!obj.at(key).is_string()) bad_config(std::string(key) + " in " + where + " must be a string");
  return obj.at(key).get<std::string>();
}

std::map<std::string, double> params_or(const json& obj, const char* key,
                                        const std::string& where) {
  std::map<std::string, double> out;
  if (!obj.contains(key)) return out;
  if (!obj.at(key).is_object()) bad_config(std::string(key) + " in " + where + " must be an object");
  for (const auto& item : obj.at(key).items()) {
    if (!item.value().is_number())
      bad_config(key + (" value '" + item.key() + "' in " + where + " must be a number"));
    out[item.key()] = item.value().get<double>();
  }
  return out;
}

GenSpec analog_by_name(const std::string& name, const std::string& where) {
  if (name == "detection") return detection_analog_spec();
  if (name == "soft_failure") return soft_failure_analog_spec();
  if (name == "identification") return identification_analog_spec();
  bad_config("unknown analog '" + name + "' in " + where +
             " (expected detection, soft_failure, or identification)");
}

BenchDataset parse_dataset(const json& obj) {
  if (!obj.is_object()) bad_config("datasets entries must be objects");
  std::string where = "dataset '" + str_or(obj, "id", "", "datasets entry") + "'";
  check_keys(obj,
             {"id", "analog", "gen", "csv", "feature_columns", "label_column", "label_mapping",
              "baseline", "baseline_params"},
             where);
  BenchDataset d;
  d.id = str_or(obj, "id", "", where);
  int sources = int(obj.contains("analog")) + int(obj.contains("gen")) + int(obj.contains("csv"));
  if (sources != 1) bad_config(where + " needs exactly one of analog, gen, or csv");
  std::string default_baseline = "forest";
  if (obj.contains("analog")) {
    std::string name = str_or(obj, "analog", "", where);
    d.gen = analog_by_name(name, where);
    if (name == "identification") default_baseline = "mlp";
  } else if (obj.contains("gen")) {
    try {
      d.gen = genspec_from_json(obj.at("gen").dump());
    } catch (const ImbError& e) {
      bad_config(where + ": " + e.what());
    }
  } else {
    d.csv_path = str_or(obj, "csv", "", where);
    if (d.csv_path.empty()) bad_config(where + ": csv path must be non-empty");
    if (!obj.contains("feature_columns") || !obj.at("feature_columns").is_array())
      bad_config(where + ": csv datasets need a feature_columns array");
    for (const auto& col : obj.at("feature_columns")) {
      if (!col.is_string()) bad_config(where + ": feature_columns must hold strings");
      d.schema.feature_columns.push_back(col.get<std::string>());
    }
    d.schema.label_column = str_or(obj, "label_column", "label", where);
    if (!obj.contains("label_mapping") || !obj.at("label_mapping").is_object())
      bad_config(where + ": csv datasets need a label_mapping object");
    for (const auto& item : obj.at("label_mapping").items()) {
      if (!item.value().is_number_integer() || item.value().get<int>() < 0)
        bad_config(where + ": label_mapping values must be non-negative integers");
      d.schema.label_mapping[item.key()] = item.value().get<int>();
    }
  }
  d.baseline = str_or(obj, "baseline", default_baseline, where);
  d.baseline_params = params_or(obj, "baseline_params", where);
  return d;
}

BenchTechnique parse_technique(const json& entry) {
  if (entry.is_string()) return BenchTechnique{entry.get<std::string>(), {}};
  if (!entry.is_object()) bad_config("techniques entries must be strings or objects");
  std::string where = "technique '" + str_or(entry, "id", "", "techniques entry") + "'";
  check_keys(entry, {"id", "params"}, where);
  BenchTechnique t;
  t.id = str_or(entry, "id", "", where);
  if (t.id.empty()) bad_config("technique id must be non-empty");
  t.params = params_or(entry, "params", where);
  return t;
}

// --- engine ------------------------------------------------------------------

double ms_between(std::chrono::steady_clock::time_point a,
                  std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

BenchRow run_cell(const BenchConfig& cfg, const BenchDataset& dspec, const Dataset& full,
                  const BenchTechnique& tech) {
  BenchRow row;
  row.dataset = dspec.id;
  row.technique = tech.id;
  const TechniqueFn fn = registry().at(tech.id);

  std::vector<double> f1s, train_times, infer_times;
  for (int r = 0; r < cfg.repetitions; ++r) {
    try {
      Seed split_seed =
          derive_seed(Seed{cfg.master_seed}, dspec.id, static_cast<std::uint64_t>(r), "split");
      auto rest_and_test =
          stratified_split(full, cfg.test_fraction, derive_seed(split_seed, "test"));
      double tune_of_rest = cfg.tuning_fraction / (1.0 - cfg.test_fraction);
      auto train_and_tune =
          stratified_split(rest_and_test.first, tune_of_rest, derive_seed(split_seed, "tune"));
      const Dataset& test = rest_and_test.second;
      Seed model_seed =
          derive_seed(Seed{cfg.master_seed}, dspec.id, static_cast<std::uint64_t>(r), "model");
      Seed tech_seed =
          derive_seed(Seed{cfg.master_seed}, dspec.id, tech.id, static_cast<std::uint64_t>(r));
      Cell cell{train_and_tune.first, train_and_tune.second, dspec, tech, model_seed, tech_seed};

      std::vector<int> pred;
      double train_ms = 0.0, infer_ms = 0.0;
      if (cfg.timing) {
        auto t0 = std::chrono::steady_clock::now();
        Predictor predict = fn(cell);
        auto t1 = std::chrono::steady_clock::now();
        pred = predict(test.features);
        auto t2 = std::chrono::steady_clock::now();
        train_ms = ms_between(t0, t1);
        infer_ms = ms_between(t1, t2);
      } else {
        pred = fn(cell)(test.features);
      }
      auto scored = confusion_and_metrics(test.labels, pred, full.n_classes);
      f1s.push_back(full.n_classes == 2 ? scored.second.f1[1] : scored.second.macro_f1);
      train_times.push_back(train_ms);
      infer_times.push_back(infer_ms * 1000.0 / static_cast<double>(test.n_samples()));
    } catch (const ImbError& e) {
      row.status = std::string("n/a: ") + error_code_name(e.code());
      row.reps = static_cast<int>(f1s.size());
      return row;  // numeric fields stay zero; the status column explains
    }
  }

  row.reps = static_cast<int>(f1s.size());
  row.f1_per_rep = f1s;
  row.mean_f1 = mean_of(f1s);
  row.vmr = (f1s.size() >= 2 && row.mean_f1 > 0.0) ? vmr(f1s) : 0.0;
  row.train_ms_mean = mean_of(train_times);
  row.train_ms_median = median_of(train_times);
  row.infer_ms_per_1k_mean = mean_of(infer_times);
  row.infer_ms_per_1k_median = median_of(infer_times);
  bool use_median = cfg.averaging == "median";
  row.train_ms = use_median ? row.train_ms_median : row.train_ms_mean;
  row.infer_ms_per_1k = use_median ? row.infer_ms_per_1k_median : row.infer_ms_per_1k_mean;
  return row;
}

}  // namespace

std::vector<std::string> registered_techniques() {
  std::vector<std::string> ids;
  for (const auto& entry : registry()) ids.push_back(entry.first);
  return ids;
}

Dataset materialize_dataset(const BenchDataset& spec) {
  if (spec.gen.has_value()) {
    GenSpec gen = *spec.gen;
    if (gen.target_fdr.has_value()) gen = calibrate_to_fdr(gen);
    return generate(gen);
  }
  return load_csv(spec.csv_path, spec.schema).dataset;
}

BenchConfig bench_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad_config(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) bad_config("config root must be an object");
  check_keys(j,
             {"datasets", "techniques", "repetitions", "test_fraction", "tuning_fraction",
              "master_seed", "out_dir", "averaging", "timing", "parallel"},
             "config");

  BenchConfig cfg;
  if (!j.contains("datasets") || !j.at("datasets").is_array())
    bad_config("config needs a datasets array");
  for (const auto& entry : j.at("datasets")) cfg.datasets.push_back(parse_dataset(entry));
  if (j.contains("techniques")) {
    if (!j.at("techniques").is_array()) bad_config("techniques must be an array");
    for (const auto& entry : j.at("techniques")) cfg.techniques.push_back(parse_technique(entry));
  }
  ensure_baseline(cfg.techniques);

  double reps = num_or(j, "repetitions", 100.0, "config");
  if (reps != std::floor(reps)) bad_config("repetitions must be an integer");
  cfg.repetitions = static_cast<int>(reps);
  cfg.test_fraction = num_or(j, "test_fraction", 0.2, "config");
  cfg.tuning_fraction = num_or(j, "tuning_fraction", 0.2, "config");
  double seed = num_or(j, "master_seed", 0.0, "config");
  if (seed < 0 || seed != std::floor(seed)) bad_config("master_seed must be a non-negative integer");
  cfg.master_seed = static_cast<std::uint64_t>(seed);
  cfg.out_dir = str_or(j, "out_dir", "", "config");
  cfg.averaging = str_or(j, "averaging", "mean", "config");
  if (j.contains("timing")) {
    if (!j.at("timing").is_boolean()) bad_config("timing must be a boolean");
    cfg.timing = j.at("timing").get<bool>();
  }
  cfg.parallel = static_cast<int>(num_or(j, "parallel", 1.0, "config"));

  validate_config(cfg);
  return cfg;
}

std::vector<BenchRow> run_benchmark(const BenchConfig& config) {
  BenchConfig cfg = config;
  ensure_baseline(cfg.techniques);
  validate_config(cfg);  // unknown technique ids fail here, before any training

  std::vector<Dataset> data;
  data.reserve(cfg.datasets.size());
  for (const auto& d : cfg.datasets) data.push_back(materialize_dataset(d));

  const std::size_t n_datasets = cfg.datasets.size();
  const std::size_t n_techniques = cfg.techniques.size();
  const std::size_t n_cells = n_datasets * n_techniques;
  std::vector<BenchRow> rows(n_cells);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto work = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= n_cells) return;
      std::size_t di = i / n_techniques, ti = i % n_techniques;
      try {
        rows[i] = run_cell(cfg, cfg.datasets[di], data[di], cfg.techniques[ti]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::size_t workers = std::min(static_cast<std::size_t>(cfg.parallel), n_cells);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Improvement vs the dataset's own baseline row.
  for (std::size_t di = 0; di < n_datasets; ++di) {
    const BenchRow* base = nullptr;
    for (std::size_t ti = 0; ti < n_techniques; ++ti)
      if (rows[di * n_techniques + ti].technique == "baseline")
        base = &rows[di * n_techniques + ti];
    for (std::size_t ti = 0; ti < n_techniques; ++ti) {
      BenchRow& row = rows[di * n_techniques + ti];
      if (row.technique == "baseline")
        row.improvement_pct = 0.0;
      else if (row.ok() && base != nullptr && base->ok() && base->mean_f1 > 0.0)
        row.improvement_pct = (row.mean_f1 - base->mean_f1) / base->mean_f1 * 100.0;
    }
  }

  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return a.dataset != b.dataset ? a.dataset < b.dataset : a.technique < b.technique;
  });
  return rows;
}

namespace {

constexpr const char* kCsvHeader =
    "dataset,technique,mean_f1,vmr,train_ms,infer_ms_per_1k,improvement_pct,reps,status";

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Pins a value to what the CSV carries, so JSON and CSV agree exactly.
double round6(double v) { return std::strtod(fmt6(v).c_str(), nullptr); }

std::string csv_safe(std::string text) {
  for (char& ch : text)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return text;
}

}  // namespace

void emit_report(const std::vector<BenchRow>& rows, ReportFormat format, const std::string& path) {
  if (rows.empty()) fail(ErrorCode::InvalidArgument, "emit_report: rows must be non-empty");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  if (format == ReportFormat::csv) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
      out << csv_safe(r.dataset) << ',' << csv_safe(r.technique) << ',' << fmt6(r.mean_f1) << ','
          << fmt6(r.vmr) << ',' << fmt6(r.train_ms) << ',' << fmt6(r.infer_ms_per_1k) << ','
          << fmt6(r.improvement_pct) << ',' << r.reps << ',' << csv_safe(r.status) << '\n';
    }
  } else {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json obj;
      obj["dataset"] = r.dataset;
      obj["technique"] = r.technique;
      obj["mean_f1"] = round6(r.mean_f1);
      obj["vmr"] = round6(r.vmr);
      obj["train_ms"] = round6(r.train_ms);
      obj["infer_ms_per_1k"] = round6(r.infer_ms_per_1k);
      obj["improvement_pct"] = round6(r.improvement_pct);
      obj["reps"] = r.reps;
      obj["status"] = r.status;
      arr.push_back(std::move(obj));
    }
    out << arr.dump(2) << '\n';
  }
  if (!out.good()) fail(ErrorCode::IoError, "failed writing '" + path + "'");
}

std::vector<BenchRow> load_report_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ConfigError, "report CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    fail(ErrorCode::ConfigError, "report CSV header mismatch: got '" + line + "'");

  std::vector<BenchRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (int k = 0; k < 8; ++k) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos)
        fail(ErrorCode::ConfigError, "report CSV row has too few columns: '" + line + "'");
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    fields.push_back(line.substr(start));  // status, the remainder

    auto as_double = [&](const std::string& s) {
      char* end = nullptr;
      double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str() || *end != '\0')
        fail(ErrorCode::ConfigError, "report CSV has a non-numeric field '" + s + "'");
      return v;
    };
    BenchRow row;
    row.dataset = fields[0];
    row.technique = fields[1];
    row.mean_f1 = as_double(fields[2]);
    row.vmr = as_double(fields[3]);
    row.train_ms = as_double(fields[4]);
    row.infer_ms_per_1k = as_double(fields[5]);
    row.improvement_pct = as_double(fields[6]);
    row.reps = static_cast<int>(as_double(fields[7]));
    row.status = fields[8];
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::ConfigError, "report CSV has no data rows");
  return rows;
}

}  // namespace imbal
