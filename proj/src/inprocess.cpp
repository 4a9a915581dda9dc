#include "imbal/inprocess.hpp"

#include <algorithm>
#include <cmath>

#include "imbal/error.hpp"
#include "imbal/metrics.hpp"

namespace imbal {

namespace {

// Stacks per-member probabilities once; vote rules and tie-breaks all read
// from this single pass.
std::vector<Matrix> member_probas(const std::vector<std::shared_ptr<const Model>>& members,
                                  const Matrix& features) {
  std::vector<Matrix> probas;
  probas.reserve(members.size());
  for (const auto& m : members) probas.push_back(m->predict_proba(features));
  return probas;
}

}  // namespace

int EnsembleModel::n_classes() const {
  require(!members.empty(), ErrorCode::EmptyDataset, "ensemble: no members");
  return members.front()->n_classes();
}

Matrix EnsembleModel::predict_proba(const Matrix& features) const {
  require(!members.empty(), ErrorCode::EmptyDataset, "ensemble: no members");
  const auto probas = member_probas(members, features);
  const std::int64_t n = features.rows();
  const int c = members.front()->n_classes();

  if (combine == CombineRule::weighted_vote) {
    require(alphas.size() == members.size(), ErrorCode::LengthMismatch,
            "ensemble: one alpha per member required");
    Matrix scores = Matrix::Zero(n, c);
    double total = 0.0;
    for (std::size_t t = 0; t < members.size(); ++t) {
      total += alphas[t];
      for (std::int64_t i = 0; i < n; ++i) scores(i, argmax_class(probas[t].row(i))) += alphas[t];
    }
    if (total <= 0.0) return Matrix::Constant(n, c, 1.0 / double(c));
    return scores / total;
  }

  Matrix sum = Matrix::Zero(n, c);
  for (const auto& p : probas) sum += p;
  return sum / double(members.size());
}

std::vector<int> EnsembleModel::predict(const Matrix& features) const {
  require(!members.empty(), ErrorCode::EmptyDataset, "ensemble: no members");
  if (combine == CombineRule::mean_proba || combine == CombineRule::weighted_vote) {
    return Model::predict(features);  // argmax of the combined surface
  }

  const auto probas = member_probas(members, features);
  const std::int64_t n = features.rows();
  const int c = members.front()->n_classes();
  std::vector<int> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    Eigen::VectorXd votes = Eigen::VectorXd::Zero(c);
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(c);
    for (const auto& p : probas) {
      votes[argmax_class(p.row(i))] += 1.0;
      mean += p.row(i);
    }
    const double top = votes.maxCoeff();
    int winner = -1;
    double best_mean = -1.0;
    for (int k = 0; k < c; ++k) {
      if (votes[k] == top && mean[k] > best_mean) {
        best_mean = mean[k];
        winner = k;
      }
    }
    out[std::size_t(i)] = winner;
  }
  return out;
}

std::shared_ptr<Model> weighted_fit(const Dataset& ds, const WeightedFitConfig& cfg, Seed seed) {
  const ClassWeights cw = class_weights(ds);  // throws MissingClass

  switch (cfg.learner) {
    case BaseLearner::tree: {
      std::vector<double> w(ds.labels.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = cw.weights[std::size_t(ds.labels[i])];
      TreeConfig tc = cfg.tree;
      tc.seed = seed;
      return std::make_shared<TreeModel>(train_tree(ds, &w, tc));
    }
    case BaseLearner::forest: {
      std::vector<double> w(ds.labels.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = cw.weights[std::size_t(ds.labels[i])];
      return std::make_shared<ForestModel>(train_forest(ds, cfg.forest, seed, &w));
    }
    case BaseLearner::mlp: {
      LossSpec loss;
      loss.kind = cfg.focal ? LossKind::weighted_focal : LossKind::weighted_ce;
      loss.gamma = cfg.gamma;
      loss.alpha = Eigen::Map<const Vector>(cw.weights.data(), std::int64_t(cw.weights.size()));
      return std::make_shared<MlpModel>(train_mlp(ds, cfg.mlp, loss, seed));
    }
  }
  fail(ErrorCode::InvalidArgument, "weighted_fit: unknown learner");
}

Dataset balanced_bootstrap(const Dataset& ds, Seed seed) {
  std::vector<std::vector<std::int64_t>> class_indices;
  for (int c = 0; c < ds.n_classes; ++c) {
    if (ds.class_counts[std::size_t(c)] > 0) class_indices.push_back(ds.indices_of(c));
  }
  require(class_indices.size() >= 2, ErrorCode::SingleClass,
          "balanced_bootstrap: need at least two present classes");

  std::int64_t min_count = ds.n_samples();
  for (const auto& idx : class_indices) min_count = std::min(min_count, std::int64_t(idx.size()));

  Rng rng(seed);
  std::vector<std::int64_t> draw;
  draw.reserve(std::size_t(min_count) * class_indices.size());
  for (const auto& idx : class_indices) {
    for (std::int64_t i = 0; i < min_count; ++i) draw.push_back(idx[rng.uniform_index(idx.size())]);
  }
  return ds.select(draw);
}

EnsembleModel bagging_fit(const Dataset& ds, const BaggingConfig& cfg, Seed seed) {
  require(cfg.n_estimators >= 1, ErrorCode::InvalidArgument,
          "bagging_fit: n_estimators must be >= 1");
  require(cfg.base != BaseLearner::forest, ErrorCode::InvalidArgument,
          "bagging_fit: base learner must be tree or mlp");

  EnsembleModel ens;
  ens.combine = CombineRule::majority_vote;
  for (int t = 0; t < cfg.n_estimators; ++t) {
    const Seed member_seed =
        cfg.pinned_member_seed ? *cfg.pinned_member_seed : derive_seed(seed, std::uint64_t(t));
    ens.member_seeds.push_back(member_seed);
    const Dataset subset = balanced_bootstrap(ds, derive_seed(member_seed, "bootstrap"));
    if (cfg.base == BaseLearner::tree) {
      TreeConfig tc = cfg.tree;
      tc.seed = derive_seed(member_seed, "train");
      ens.members.push_back(std::make_shared<TreeModel>(train_tree(subset, nullptr, tc)));
    } else {
      ens.members.push_back(std::make_shared<MlpModel>(
          train_mlp(subset, cfg.mlp, LossSpec{}, derive_seed(member_seed, "train"))));
    }
  }
  return ens;
}

double boosting_alpha(double epsilon, int n_classes) {
  require(n_classes >= 2, ErrorCode::InvalidArgument, "boosting_alpha: need >= 2 classes");
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::InvalidArgument,
          "boosting_alpha: epsilon must lie in (0, 1)");
  return std::log((1.0 - epsilon) / epsilon) + std::log(double(n_classes - 1));
}

EnsembleModel boosting_fit(const Dataset& ds, const BoostingConfig& cfg, Seed seed,
                           std::vector<std::vector<double>>* weight_trace) {
  require(cfg.n_rounds >= 1, ErrorCode::InvalidArgument, "boosting_fit: n_rounds must be >= 1");
  std::vector<std::vector<std::int64_t>> class_indices;
  for (int c = 0; c < ds.n_classes; ++c) {
    if (ds.class_counts[std::size_t(c)] > 0) class_indices.push_back(ds.indices_of(c));
  }
  require(class_indices.size() >= 2, ErrorCode::SingleClass,
          "boosting_fit: need at least two present classes");
  const int c_present = int(class_indices.size());
  std::int64_t min_count = ds.n_samples();
  for (const auto& idx : class_indices) min_count = std::min(min_count, std::int64_t(idx.size()));

  const std::int64_t n = ds.n_samples();
  std::vector<double> w(std::size_t(n), 1.0 / double(n));

  EnsembleModel ens;
  ens.combine = CombineRule::weighted_vote;
  const double reject_at = 1.0 - 1.0 / double(c_present);

  for (int t = 0; t < cfg.n_rounds; ++t) {
    bool accepted = false;
    for (int attempt = 0; attempt <= cfg.max_retries && !accepted; ++attempt) {
      const Seed round_seed = derive_seed(seed, std::uint64_t(t), std::uint64_t(attempt));
      Rng rng(derive_seed(round_seed, "bootstrap"));

      // Balanced bootstrap where each class's draws are biased by the
      // current sample weights.
      std::vector<std::int64_t> draw;
      draw.reserve(std::size_t(min_count) * class_indices.size());
      for (const auto& idx : class_indices) {
        std::vector<double> class_w(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) class_w[i] = w[std::size_t(idx[i])];
        for (std::int64_t i = 0; i < min_count; ++i) draw.push_back(idx[rng.weighted_index(class_w)]);
      }

      TreeConfig tc = cfg.tree;
      tc.seed = derive_seed(round_seed, "train");
      auto member = std::make_shared<TreeModel>(train_tree(ds.select(draw), nullptr, tc));

      const auto pred = member->predict(ds.features);
      double eps = 0.0;
      for (std::int64_t i = 0; i < n; ++i) {
        if (pred[std::size_t(i)] != ds.labels[std::size_t(i)]) eps += w[std::size_t(i)];
      }

      const bool perfect = eps == 0.0;
      if (!perfect && eps >= reject_at) continue;  // discard and redraw

      const double alpha = boosting_alpha(perfect ? 1e-10 : eps, c_present);
      ens.members.push_back(std::move(member));
      ens.alphas.push_back(alpha);
      ens.member_seeds.push_back(round_seed);
      accepted = true;

      if (!perfect) {
        const double bump = std::exp(alpha);
        double total = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
          if (pred[std::size_t(i)] != ds.labels[std::size_t(i)]) w[std::size_t(i)] *= bump;
          total += w[std::size_t(i)];
        }
        for (auto& wi : w) wi /= total;
      }
      if (weight_trace) weight_trace->push_back(w);
      if (perfect) return ens;  // nothing left to learn from
    }
    if (!accepted) {
      require(!ens.members.empty(), ErrorCode::AllRoundsRejected,
              "boosting_fit: every attempt of the first round was rejected");
      break;  // keep the rounds gathered so far
    }
  }
  return ens;
}

ForestModel brf_fit(const Dataset& ds, int n_trees, Seed seed) {
  ForestConfig cfg;
  cfg.n_estimators = n_trees;
  cfg.balanced = true;
  return train_forest(ds, cfg, seed);
}

EpochSampler balanced_epoch_sampler(const Dataset& ds, Seed seed) {
  std::vector<std::vector<std::int64_t>> class_indices;
  for (int c = 0; c < ds.n_classes; ++c) {
    if (ds.class_counts[std::size_t(c)] > 0) class_indices.push_back(ds.indices_of(c));
  }
  require(class_indices.size() >= 2, ErrorCode::SingleClass,
          "balanced_epoch_sampler: need at least two present classes");
  std::int64_t min_count = ds.n_samples();
  for (const auto& idx : class_indices) min_count = std::min(min_count, std::int64_t(idx.size()));

  return [class_indices, min_count, seed](int epoch, Rng&) {
    Rng rng(derive_seed(seed, "epoch", std::uint64_t(epoch)));
    std::vector<int> rows;
    rows.reserve(std::size_t(min_count) * class_indices.size());
    for (const auto& idx : class_indices) {
      for (std::int64_t i = 0; i < min_count; ++i) {
        rows.push_back(int(idx[rng.uniform_index(idx.size())]));
      }
    }
    return rows;
  };
}

MlpModel balanced_epoch_train(const Dataset& ds, const MlpConfig& cfg, Seed seed) {
  return train_mlp(ds, cfg, LossSpec{}, seed, balanced_epoch_sampler(ds, derive_seed(seed, "epochs")));
}

Matrix MetaModel::meta_features(const Matrix& features) const {
  require(!submodels.empty(), ErrorCode::EmptyDataset, "meta: no submodels");
  Matrix out(features.rows(), std::int64_t(submodels.size()) * n_classes_);
  for (std::size_t s = 0; s < submodels.size(); ++s) {
    out.middleCols(std::int64_t(s) * n_classes_, n_classes_) = submodels[s].predict_proba(features);
  }
  return out;
}

Matrix MetaModel::predict_proba(const Matrix& features) const {
  return meta.predict_proba(meta_features(features));
}

MetaModel meta_fit(const Dataset& ds, double contamination, Seed seed,
                   const ForestConfig& submodel_cfg) {
  require(contamination >= 0.0 && contamination <= 1.0, ErrorCode::InvalidArgument,
          "meta_fit: contamination must lie in [0, 1]");
  require(ds.n_classes >= 2, ErrorCode::TooFewSamples, "meta_fit: need >= 2 classes");
  for (int c = 0; c < ds.n_classes; ++c) {
    require(ds.class_counts[std::size_t(c)] >= 2, ErrorCode::TooFewSamples,
            "meta_fit: every class needs >= 2 samples");
  }

  MetaModel m;
  m.n_classes_ = ds.n_classes;
  for (int c = 0; c < ds.n_classes; ++c) {
    const auto own = ds.indices_of(c);
    std::vector<std::int64_t> other;
    other.reserve(std::size_t(ds.n_samples()) - own.size());
    for (std::int64_t i = 0; i < ds.n_samples(); ++i) {
      if (ds.labels[std::size_t(i)] != c) other.push_back(i);
    }

    auto take = std::max<std::int64_t>(
        1, std::int64_t(std::floor(contamination * double(own.size()))));
    take = std::min(take, std::int64_t(other.size()));

    Rng rng(derive_seed(seed, "contaminate", std::uint64_t(c)));
    std::vector<std::int64_t> rows = own;
    for (auto pick : rng.sample_without_replacement(other.size(), std::size_t(take))) {
      rows.push_back(other[pick]);
    }
    m.focused_sizes.push_back(std::int64_t(rows.size()));
    m.submodels.push_back(
        train_forest(ds.select(rows), submodel_cfg, derive_seed(seed, "submodel", std::uint64_t(c))));
  }

  m.meta = train_logistic(m.meta_features(ds.features), ds.labels);
  return m;
}

std::vector<int> meta_predict(const MetaModel& m, const Matrix& features) {
  return m.predict(features);
}

}  // namespace imbal
