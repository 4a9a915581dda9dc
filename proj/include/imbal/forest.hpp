#pragma once

#include <vector>

#include "imbal/tree.hpp"

namespace imbal {

struct ForestConfig {
  int n_estimators = 100;
  int max_depth = -1;
  int min_samples_leaf = 1;
  int max_features = -1;  // -1 = floor(sqrt(n_features)), min 1; 0 = all
  bool bootstrap = true;
  // Balanced Random Forest: each tree trains on a bootstrap drawing
  // min-class-count samples with replacement from every class.
  bool balanced = false;
};

class ForestModel final : public Model {
 public:
  std::vector<TreeModel> trees;
  ForestConfig config;
  std::vector<Seed> tree_seeds;

  Matrix predict_proba(const Matrix& features) const override;
  int n_classes() const override { return trees.empty() ? 0 : trees.front().n_classes_; }
};

// Optional sample_weights (one per row) flow into every tree's Gini masses;
// bootstrapped trees receive the weights of the rows they drew.
ForestModel train_forest(const Dataset& ds, const ForestConfig& cfg, Seed seed,
                         const std::vector<double>* sample_weights = nullptr);

}  // namespace imbal
