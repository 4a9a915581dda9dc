#pragma once

#include <memory>
#include <vector>

#include "imbal/dataset.hpp"
#include "imbal/forest.hpp"
#include "imbal/metrics.hpp"
#include "imbal/model.hpp"
#include "imbal/rng.hpp"
#include "imbal/tree.hpp"

namespace imbal {

// Decision rule produced by threshold tuning. One tau = binary rule on the
// positive class; C taus = one-vs-rest rule over a C-column probability
// matrix.
struct ThresholdRule {
  std::vector<double> taus;          // all in [0, 1]
  int positive_class = 1;            // binary only
  double best_f1 = 0.0;              // binary: F1 achieved on the tuning data
  std::vector<double> per_class_f1;  // one-vs-rest: per-class tuned F1

  // Binary: positive iff p_positive >= tau. One-vs-rest: among classes with
  // p_c >= tau_c pick argmax p_c / tau_c (tau_c = 0 counts as 1e-12); if no
  // class qualifies, argmax p_c.
  std::vector<int> apply(const Matrix& probs) const;
};

// Grid scan tau in {0, delta, 2*delta, ..., 1} (0.5 always evaluated) for the
// smallest tau maximizing positive-class F1 on the tuning data.
ThresholdRule tune_threshold(const std::vector<double>& probs_positive,
                             const std::vector<int>& y_true, double delta = 0.01);

// Per-class binary tuning of class c vs rest; classes whose binary task is
// single-class are skipped with tau_c = 0.5.
ThresholdRule tune_thresholds_ovr(const Matrix& probs, const std::vector<int>& y_true,
                                  double delta = 0.01);

struct CostSpec {
  double c_fp = 1.0;
  double c_fn = 1.0;
};

// tau* = C_FP / (C_FP + C_FN).
double cost_threshold(const CostSpec& costs);
ThresholdRule cost_thresholds_ovr(const std::vector<CostSpec>& per_class);

// p'_c proportional to p_c * (1 + scale * (CW_c - 1)), rows renormalized.
// scale 0 is the identity; negative factors clamp to zero mass.
Matrix reweight_predictions(const Matrix& probs, const ClassWeights& weights, double scale = 1.0);

// Monotone score-to-probability map fitted by pool-adjacent-violators.
struct IsotonicMap {
  std::vector<double> breakpoints;  // strictly increasing training scores
  std::vector<double> values;       // non-decreasing fitted values

  bool empty() const { return breakpoints.empty(); }
};

// Exact score ties are pooled before PAVA runs.
IsotonicMap isotonic_fit(const std::vector<double>& scores, const std::vector<int>& y_binary);
// Stepwise-constant: value of the largest breakpoint <= score, clamped to the
// first/last value outside the training range.
std::vector<double> isotonic_apply(const IsotonicMap& map, const std::vector<double>& scores);

// Per-class one-vs-rest calibration of probability columns; apply
// renormalizes rows (uniform fallback for all-zero rows).
std::vector<IsotonicMap> isotonic_fit_ovr(const Matrix& probs, const std::vector<int>& y_true);
Matrix isotonic_apply_ovr(const std::vector<IsotonicMap>& maps, const Matrix& probs);

struct SampleWeightingConfig {
  enum class Learner { tree, forest };  // the per-sample-weight learners
  Learner learner = Learner::forest;
  TreeConfig tree;
  ForestConfig forest;
  double factor = 2.0;  // multiplier on misclassified sample weights
};

// Train M0, double the weights of its training misclassifications, retrain
// once with the same seed. misclassified_out (test hook) receives the row
// indices found after the M0 pass.
std::shared_ptr<Model> sample_weighting(const Dataset& ds, const SampleWeightingConfig& cfg,
                                        Seed seed,
                                        std::vector<std::int64_t>* misclassified_out = nullptr);

}  // namespace imbal
