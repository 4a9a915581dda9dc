#pragma once

#include <optional>
#include <vector>

#include "imbal/dataset.hpp"
#include "imbal/model.hpp"
#include "imbal/rng.hpp"

namespace imbal {

struct TreeConfig {
  int max_depth = -1;         // -1 = unlimited
  int min_samples_leaf = 1;   // raw sample count per leaf
  int max_features = 0;       // 0 = consider all features at every split
  Seed seed{0};               // consumed only when max_features < n_features
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Vector proba;  // leaf class distribution; empty on internal nodes
};

class TreeModel final : public Model {
 public:
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int n_features_in = 0;
  int n_classes_ = 0;
  TreeConfig config;

  Matrix predict_proba(const Matrix& features) const override;
  int n_classes() const override { return n_classes_; }
  int leaf_for(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  int depth() const;
  int n_leaves() const;
};

// CART with weighted Gini impurity. Splits are midpoints between consecutive
// distinct feature values; ties keep the lowest (feature, threshold) pair.
TreeModel train_tree(const Dataset& ds, const std::vector<double>* sample_weights,
                     const TreeConfig& cfg = {});

}  // namespace imbal
