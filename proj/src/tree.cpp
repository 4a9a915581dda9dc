#include "imbal/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "imbal/error.hpp"

namespace imbal {
namespace {

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  // Sum over children of (Σ_c mass_c²)/mass — maximizing it minimizes the
  // weighted Gini impurity, and the ratio form is exactly invariant under
  // power-of-two weight scaling.
  double score = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& ds, const std::vector<double>& weights, const TreeConfig& cfg)
      : ds_(ds), weights_(weights), cfg_(cfg), rng_(cfg.seed) {}

  TreeModel build() {
    TreeModel model;
    model.n_features_in = int(ds_.n_features());
    model.n_classes_ = ds_.n_classes;
    model.config = cfg_;
    std::vector<int> indices(std::size_t(ds_.n_samples()));
    std::iota(indices.begin(), indices.end(), 0);
    nodes_ = &model.nodes;
    grow(std::move(indices), 0);
    return model;
  }

 private:
  int grow(std::vector<int> indices, int depth) {
    const int id = int(nodes_->size());
    nodes_->emplace_back();

    Vector mass = Vector::Zero(ds_.n_classes);
    for (int i : indices) mass[ds_.labels[std::size_t(i)]] += weights_[std::size_t(i)];
    const double total = mass.sum();

    const bool pure = (mass.array() > 0.0).count() <= 1;
    const bool depth_capped = cfg_.max_depth >= 0 && depth >= cfg_.max_depth;
    const bool too_small = int(indices.size()) < 2 * cfg_.min_samples_leaf;

    SplitCandidate split;
    if (!pure && !depth_capped && !too_small) split = find_split(indices, mass, total);

    if (split.feature < 0) {
      (*nodes_)[std::size_t(id)].proba = mass / total;
      return id;
    }

    std::vector<int> left, right;
    for (int i : indices) {
      (ds_.features(i, split.feature) <= split.threshold ? left : right).push_back(i);
    }
    indices.clear();
    indices.shrink_to_fit();

    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    TreeNode& node = (*nodes_)[std::size_t(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  SplitCandidate find_split(const std::vector<int>& indices, const Vector& mass, double total) {
    std::vector<int> features;
    const int d = int(ds_.n_features());
    if (cfg_.max_features > 0 && cfg_.max_features < d) {
      for (std::size_t f :
           rng_.sample_without_replacement(std::size_t(d), std::size_t(cfg_.max_features))) {
        features.push_back(int(f));
      }
      std::sort(features.begin(), features.end());
    } else {
      features.resize(std::size_t(d));
      std::iota(features.begin(), features.end(), 0);
    }

    SplitCandidate best;
    best.score = mass.squaredNorm() / total;  // parent score: no-split baseline
    const double parent_score = best.score;

    std::vector<int> order = indices;
    Vector left_mass(ds_.n_classes);
    for (int f : features) {
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double va = ds_.features(a, f), vb = ds_.features(b, f);
        return va != vb ? va < vb : a < b;
      });
      left_mass.setZero();
      double left_sq = 0.0, left_total = 0.0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const int idx = order[i];
        const double w = weights_[std::size_t(idx)];
        const int c = ds_.labels[std::size_t(idx)];
        left_sq += w * (2.0 * left_mass[c] + w);
        left_mass[c] += w;
        left_total += w;

        const double lo = ds_.features(idx, f);
        const double hi = ds_.features(order[i + 1], f);
        if (lo == hi) continue;
        const int left_count = int(i) + 1;
        if (left_count < cfg_.min_samples_leaf ||
            int(order.size()) - left_count < cfg_.min_samples_leaf)
          continue;
        const double right_total = total - left_total;
        if (left_total <= 0.0 || right_total <= 0.0) continue;
        const double right_sq = (mass - left_mass).squaredNorm();
        const double score = left_sq / left_total + right_sq / right_total;
        if (score > best.score * (1.0 + 1e-12) && score > parent_score * (1.0 + 1e-12)) {
          double thr = lo + (hi - lo) / 2.0;
          if (thr >= hi) thr = lo;  // midpoint rounded up between adjacent doubles
          best = {f, thr, score};
        }
      }
    }
    return best;
  }

  const Dataset& ds_;
  const std::vector<double>& weights_;
  const TreeConfig& cfg_;
  Rng rng_;
  std::vector<TreeNode>* nodes_ = nullptr;
};

}  // namespace

TreeModel train_tree(const Dataset& ds, const std::vector<double>* sample_weights,
                     const TreeConfig& cfg) {
  require(ds.n_samples() >= cfg.min_samples_leaf, ErrorCode::EmptyDataset,
          "train_tree: fewer samples than min_samples_leaf");
  require(cfg.min_samples_leaf >= 1, ErrorCode::InvalidArgument,
          "train_tree: min_samples_leaf must be >= 1");

  std::vector<double> weights;
  if (sample_weights) {
    require(std::int64_t(sample_weights->size()) == ds.n_samples(), ErrorCode::LengthMismatch,
            "train_tree: sample_weights length mismatch");
    double total = 0.0;
    for (double w : *sample_weights) {
      require(std::isfinite(w) && w >= 0.0, ErrorCode::InvalidArgument,
              "train_tree: sample weights must be finite and non-negative");
      total += w;
    }
    require(total > 0.0, ErrorCode::InvalidArgument, "train_tree: total sample weight is zero");
    weights = *sample_weights;
  } else {
    weights.assign(std::size_t(ds.n_samples()), 1.0);
  }

  TreeBuilder builder(ds, weights, cfg);
  return builder.build();
}

int TreeModel::leaf_for(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int id = 0;
  while (nodes[std::size_t(id)].feature >= 0) {
    const TreeNode& node = nodes[std::size_t(id)];
    id = row[node.feature] <= node.threshold ? node.left : node.right;
  }
  return id;
}

Matrix TreeModel::predict_proba(const Matrix& features) const {
  require(int(features.cols()) == n_features_in, ErrorCode::ShapeMismatch,
          "tree: feature width does not match training data");
  Matrix out(features.rows(), n_classes_);
  for (std::int64_t i = 0; i < features.rows(); ++i) {
    out.row(i) = nodes[std::size_t(leaf_for(features.row(i)))].proba.transpose();
  }
  return out;
}

int TreeModel::depth() const {
  int deepest = 0;
  // (node id, depth) pairs; the tree is stored pre-order so ids ascend.
  std::vector<std::pair<int, int>> stack = {{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const TreeNode& node = nodes[std::size_t(id)];
    if (node.feature >= 0) {
      stack.push_back({node.left, d + 1});
      stack.push_back({node.right, d + 1});
    }
  }
  return deepest;
}

int TreeModel::n_leaves() const {
  int leaves = 0;
  for (const TreeNode& node : nodes) leaves += node.feature < 0 ? 1 : 0;
  return leaves;
}

}  // namespace imbal
