#include "imbal/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "imbal/error.hpp"

namespace imbal {

ForestModel train_forest(const Dataset& ds, const ForestConfig& cfg, Seed seed,
                         const std::vector<double>* sample_weights) {
  require(cfg.n_estimators >= 1, ErrorCode::InvalidArgument,
          "train_forest: n_estimators must be >= 1");
  require(ds.n_samples() >= cfg.min_samples_leaf, ErrorCode::EmptyDataset,
          "train_forest: fewer samples than min_samples_leaf");
  require(sample_weights == nullptr || std::int64_t(sample_weights->size()) == ds.n_samples(),
          ErrorCode::LengthMismatch, "train_forest: sample_weights size mismatch");

  int max_features = cfg.max_features;
  if (max_features < 0) {
    max_features = std::max(1, int(std::floor(std::sqrt(double(ds.n_features())))));
  }

  std::vector<std::vector<std::int64_t>> class_indices;
  std::int64_t min_count = 0;
  if (cfg.balanced) {
    for (int c = 0; c < ds.n_classes; ++c) {
      if (ds.class_counts[std::size_t(c)] > 0) class_indices.push_back(ds.indices_of(c));
    }
    min_count = ds.n_samples();
    for (const auto& idx : class_indices)
      min_count = std::min(min_count, std::int64_t(idx.size()));
  }

  ForestModel model;
  model.config = cfg;
  model.trees.reserve(std::size_t(cfg.n_estimators));
  for (int t = 0; t < cfg.n_estimators; ++t) {
    const Seed tree_seed = derive_seed(seed, std::uint64_t(t));
    model.tree_seeds.push_back(tree_seed);
    Rng rng(derive_seed(tree_seed, "bootstrap"));

    TreeConfig tree_cfg;
    tree_cfg.max_depth = cfg.max_depth;
    tree_cfg.min_samples_leaf = cfg.min_samples_leaf;
    tree_cfg.max_features = max_features >= int(ds.n_features()) ? 0 : max_features;
    tree_cfg.seed = derive_seed(tree_seed, "splits");

    const auto fit_on = [&](const std::vector<std::int64_t>& draw) {
      if (sample_weights == nullptr) return train_tree(ds.select(draw), nullptr, tree_cfg);
      std::vector<double> w(draw.size());
      for (std::size_t i = 0; i < draw.size(); ++i) w[i] = (*sample_weights)[std::size_t(draw[i])];
      return train_tree(ds.select(draw), &w, tree_cfg);
    };

    if (cfg.balanced) {
      std::vector<std::int64_t> draw;
      draw.reserve(std::size_t(min_count) * class_indices.size());
      for (const auto& idx : class_indices) {
        for (std::int64_t i = 0; i < min_count; ++i)
          draw.push_back(idx[rng.uniform_index(idx.size())]);
      }
      model.trees.push_back(fit_on(draw));
    } else if (cfg.bootstrap) {
      std::vector<std::int64_t> draw(std::size_t(ds.n_samples()));
      for (auto& i : draw) i = std::int64_t(rng.uniform_index(std::size_t(ds.n_samples())));
      model.trees.push_back(fit_on(draw));
    } else {
      model.trees.push_back(train_tree(ds, sample_weights, tree_cfg));
    }
  }
  return model;
}

Matrix ForestModel::predict_proba(const Matrix& features) const {
  require(!trees.empty(), ErrorCode::EmptyDataset, "forest: no trees");
  Matrix sum = trees.front().predict_proba(features);
  for (std::size_t t = 1; t < trees.size(); ++t) sum += trees[t].predict_proba(features);
  return sum / double(trees.size());
}

}  // namespace imbal
