#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "imbal/dataset.hpp"
#include "imbal/forest.hpp"
#include "imbal/logistic.hpp"
#include "imbal/mlp.hpp"
#include "imbal/model.hpp"
#include "imbal/rng.hpp"
#include "imbal/tree.hpp"

namespace imbal {

enum class BaseLearner { tree, forest, mlp };

enum class CombineRule { majority_vote, weighted_vote, mean_proba };

// Immutable bag of trained members. predict_proba is the (alpha-weighted
// vote share / arithmetic mean) surface matching the combine rule, so
// post-processing composes with ensembles unchanged.
class EnsembleModel final : public Model {
 public:
  std::vector<std::shared_ptr<const Model>> members;
  CombineRule combine = CombineRule::majority_vote;
  std::vector<double> alphas;  // one finite weight per member under weighted_vote
  std::vector<Seed> member_seeds;

  Matrix predict_proba(const Matrix& features) const override;
  // Vote of member argmaxes; ties broken by mean probability, then lower id.
  std::vector<int> predict(const Matrix& features) const override;
  int n_classes() const override;
};

struct WeightedFitConfig {
  BaseLearner learner = BaseLearner::forest;
  TreeConfig tree;
  ForestConfig forest;
  MlpConfig mlp;
  bool focal = false;  // MLP: weighted focal loss instead of weighted CE
  double gamma = 2.0;  // exponent for the focal variant
};

// Class weights CW_c = n/(C*n_c) injected as per-sample weights (tree,
// forest) or as the per-class alpha of the weighted losses (MLP).
std::shared_ptr<Model> weighted_fit(const Dataset& ds, const WeightedFitConfig& cfg, Seed seed);

// With-replacement draw of min-class-count rows from every present class,
// grouped by class id: C_present * min_count rows, all classes equal.
Dataset balanced_bootstrap(const Dataset& ds, Seed seed);

struct BaggingConfig {
  BaseLearner base = BaseLearner::tree;  // tree or mlp
  int n_estimators = 10;
  TreeConfig tree;
  MlpConfig mlp;
  std::optional<Seed> pinned_member_seed;  // test hook: forces identical members
};

// Independent members, each on its own balanced bootstrap; majority vote.
EnsembleModel bagging_fit(const Dataset& ds, const BaggingConfig& cfg, Seed seed);

struct BoostingConfig {
  int n_rounds = 10;
  TreeConfig tree;       // shallow members
  int max_retries = 10;  // redraw attempts for a rejected round

  BoostingConfig() { tree.max_depth = 2; }
};

// alpha_t = ln((1 - eps)/eps) + ln(C - 1); positive for every accepted round.
double boosting_alpha(double epsilon, int n_classes);

// Sequential multiclass AdaBoost (SAMME) over weight-biased balanced
// bootstraps. Rounds with eps_t >= 1 - 1/C are redrawn (up to max_retries);
// a perfect round clamps eps to 1e-10 and stops training early. weight_trace,
// when set, receives the renormalized sample-weight vector after every
// accepted round.
EnsembleModel boosting_fit(const Dataset& ds, const BoostingConfig& cfg, Seed seed,
                           std::vector<std::vector<double>>* weight_trace = nullptr);

// Balanced Random Forest: every tree on its own balanced bootstrap with
// sqrt-feature subsampling; predict = mean probability.
ForestModel brf_fit(const Dataset& ds, int n_trees, Seed seed);

// Fresh balanced bootstrap of row indices per epoch (epoch-indexed seeds).
// Exposed separately so the subsets themselves are testable.
EpochSampler balanced_epoch_sampler(const Dataset& ds, Seed seed);

MlpModel balanced_epoch_train(const Dataset& ds, const MlpConfig& cfg, Seed seed);

// One forest per class, each trained on that class's focused dataset (all of
// the class's rows plus a small contamination of the others); a logistic
// meta-learner consumes the concatenated submodel probabilities.
class MetaModel final : public Model {
 public:
  std::vector<ForestModel> submodels;  // indexed by class id
  LogisticModel meta;
  int n_classes_ = 0;
  // Rows in each class's focused training set: count(c) + contamination.
  std::vector<std::int64_t> focused_sizes;

  // Concatenated submodel predict_proba: width n_classes^2.
  Matrix meta_features(const Matrix& features) const;
  Matrix predict_proba(const Matrix& features) const override;
  int n_classes() const override { return n_classes_; }
};

MetaModel meta_fit(const Dataset& ds, double contamination, Seed seed,
                   const ForestConfig& submodel_cfg = {});
std::vector<int> meta_predict(const MetaModel& m, const Matrix& features);

}  // namespace imbal
