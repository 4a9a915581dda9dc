#include "imbal/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "imbal/error.hpp"

namespace imbal {

namespace {

constexpr double kZeroTau = 1e-12;

// Positive-class F1 of the rule "positive iff p >= tau".
double binary_f1_at(const std::vector<double>& probs, const std::vector<int>& y, double tau) {
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool pred = probs[i] >= tau;
    if (pred && y[i] == 1) ++tp;
    if (pred && y[i] == 0) ++fp;
    if (!pred && y[i] == 1) ++fn;
  }
  const double denom = double(2 * tp + fp + fn);
  return denom > 0.0 ? 2.0 * double(tp) / denom : 0.0;
}

std::vector<double> threshold_grid(double delta) {
  require(delta > 0.0 && delta <= 1.0, ErrorCode::InvalidArgument,
          "tune_threshold: delta must lie in (0, 1]");
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    const double tau = double(k) * delta;
    if (tau > 1.0 + 1e-12) break;
    grid.push_back(std::min(tau, 1.0));
  }
  if (grid.back() < 1.0) grid.push_back(1.0);
  grid.push_back(0.5);  // keeps F1(tau*) >= F1(0.5) for any delta
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

std::vector<int> ThresholdRule::apply(const Matrix& probs) const {
  require(!taus.empty(), ErrorCode::InvalidArgument, "threshold rule: no thresholds");
  std::vector<int> out(std::size_t(probs.rows()));

  if (taus.size() == 1) {
    require(probs.cols() == 2, ErrorCode::ShapeMismatch,
            "binary threshold rule needs a two-column probability matrix");
    const int negative = positive_class == 1 ? 0 : 1;
    for (std::int64_t i = 0; i < probs.rows(); ++i) {
      out[std::size_t(i)] = probs(i, positive_class) >= taus[0] ? positive_class : negative;
    }
    return out;
  }

  require(probs.cols() == std::int64_t(taus.size()), ErrorCode::ShapeMismatch,
          "one-vs-rest rule: one threshold per probability column required");
  for (std::int64_t i = 0; i < probs.rows(); ++i) {
    int winner = -1;
    double best_ratio = -1.0;
    for (int c = 0; c < int(taus.size()); ++c) {
      const double tau = std::max(taus[std::size_t(c)], kZeroTau);
      const double p = probs(i, c);
      if (probs(i, c) >= taus[std::size_t(c)] && p / tau > best_ratio) {
        best_ratio = p / tau;
        winner = c;
      }
    }
    out[std::size_t(i)] = winner >= 0 ? winner : argmax_class(probs.row(i));
  }
  return out;
}

ThresholdRule tune_threshold(const std::vector<double>& probs_positive,
                             const std::vector<int>& y_true, double delta) {
  require(probs_positive.size() == y_true.size(), ErrorCode::LengthMismatch,
          "tune_threshold: probabilities and labels differ in length");
  require(!y_true.empty(), ErrorCode::EmptyDataset, "tune_threshold: no tuning samples");
  bool has0 = false, has1 = false;
  for (int y : y_true) {
    require(y == 0 || y == 1, ErrorCode::InvalidArgument, "tune_threshold: labels must be 0/1");
    (y == 1 ? has1 : has0) = true;
  }
  require(has0 && has1, ErrorCode::SingleClassLabels,
          "tune_threshold: tuning labels contain a single class");

  ThresholdRule rule;
  rule.taus = {0.0};
  rule.best_f1 = -1.0;
  for (double tau : threshold_grid(delta)) {
    const double f1 = binary_f1_at(probs_positive, y_true, tau);
    if (f1 > rule.best_f1) {  // strict: keeps the smallest maximizing tau
      rule.best_f1 = f1;
      rule.taus[0] = tau;
    }
  }
  return rule;
}

ThresholdRule tune_thresholds_ovr(const Matrix& probs, const std::vector<int>& y_true,
                                  double delta) {
  require(std::int64_t(y_true.size()) == probs.rows(), ErrorCode::LengthMismatch,
          "tune_thresholds_ovr: probabilities and labels differ in length");
  require(probs.cols() >= 3, ErrorCode::InvalidArgument,
          "tune_thresholds_ovr: need >= 3 classes (use tune_threshold for binary)");

  ThresholdRule rule;
  for (int c = 0; c < probs.cols(); ++c) {
    std::vector<double> p(std::size_t(probs.rows()));
    std::vector<int> y(std::size_t(probs.rows()));
    bool any_pos = false, any_neg = false;
    for (std::int64_t i = 0; i < probs.rows(); ++i) {
      p[std::size_t(i)] = probs(i, c);
      y[std::size_t(i)] = y_true[std::size_t(i)] == c ? 1 : 0;
      (y[std::size_t(i)] == 1 ? any_pos : any_neg) = true;
    }
    if (!any_pos || !any_neg) {  // degenerate binary task: record and skip
      rule.taus.push_back(0.5);
      rule.per_class_f1.push_back(0.0);
      continue;
    }
    const ThresholdRule binary = tune_threshold(p, y, delta);
    rule.taus.push_back(binary.taus[0]);
    rule.per_class_f1.push_back(binary.best_f1);
  }
  return rule;
}

double cost_threshold(const CostSpec& costs) {
  require(costs.c_fp >= 0.0 && costs.c_fn >= 0.0, ErrorCode::InvalidArgument,
          "cost_threshold: costs must be non-negative");
  require(costs.c_fp + costs.c_fn > 0.0, ErrorCode::ZeroCosts,
          "cost_threshold: C_FP + C_FN must be positive");
  return costs.c_fp / (costs.c_fp + costs.c_fn);
}

ThresholdRule cost_thresholds_ovr(const std::vector<CostSpec>& per_class) {
  require(per_class.size() >= 2, ErrorCode::InvalidArgument,
          "cost_thresholds_ovr: need one cost pair per class");
  ThresholdRule rule;
  for (const auto& costs : per_class) rule.taus.push_back(cost_threshold(costs));
  return rule;
}

Matrix reweight_predictions(const Matrix& probs, const ClassWeights& weights, double scale) {
  require(std::int64_t(weights.weights.size()) == probs.cols(), ErrorCode::ShapeMismatch,
          "reweight_predictions: one weight per probability column required");
  require(scale >= 0.0, ErrorCode::InvalidArgument, "reweight_predictions: scale must be >= 0");

  Matrix out(probs.rows(), probs.cols());
  for (std::int64_t c = 0; c < probs.cols(); ++c) {
    const double factor = std::max(0.0, 1.0 + scale * (weights.weights[std::size_t(c)] - 1.0));
    out.col(c) = probs.col(c) * factor;
  }
  for (std::int64_t i = 0; i < out.rows(); ++i) {
    const double sum = out.row(i).sum();
    if (sum > 0.0) {
      out.row(i) /= sum;
    } else {
      out.row(i).setConstant(1.0 / double(out.cols()));
    }
  }
  return out;
}

IsotonicMap isotonic_fit(const std::vector<double>& scores, const std::vector<int>& y_binary) {
  require(scores.size() == y_binary.size(), ErrorCode::LengthMismatch,
          "isotonic_fit: scores and labels differ in length");
  require(scores.size() >= 2, ErrorCode::TooFewSamples, "isotonic_fit: need >= 2 samples");
  bool has0 = false, has1 = false;
  for (int y : y_binary) {
    require(y == 0 || y == 1, ErrorCode::InvalidArgument, "isotonic_fit: labels must be 0/1");
    (y == 1 ? has1 : has0) = true;
  }
  require(has0 && has1, ErrorCode::SingleClassLabels,
          "isotonic_fit: labels contain a single class");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Blocks carry (score, weight, mean target); exact score ties pool first.
  struct Block {
    double score;
    double weight;
    double mean;
  };
  std::vector<Block> tied;
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    double w = 0.0, sum = 0.0;
    while (k < order.size() && scores[order[k]] == s) {
      w += 1.0;
      sum += double(y_binary[order[k]]);
      ++k;
    }
    tied.push_back({s, w, sum / w});
  }

  // Pool-adjacent-violators over the tie-pooled blocks.
  std::vector<Block> stack;
  std::vector<int> span;  // tie-blocks covered by each stack block
  for (const auto& b : tied) {
    stack.push_back(b);
    span.push_back(1);
    while (stack.size() > 1 && stack[stack.size() - 2].mean > stack.back().mean) {
      const Block top = stack.back();
      stack.pop_back();
      Block& prev = stack.back();
      prev.mean = (prev.mean * prev.weight + top.mean * top.weight) / (prev.weight + top.weight);
      prev.weight += top.weight;
      span[span.size() - 2] += span.back();
      span.pop_back();
    }
  }

  IsotonicMap map;
  std::size_t tie_index = 0;
  for (std::size_t b = 0; b < stack.size(); ++b) {
    for (int k = 0; k < span[b]; ++k) {
      map.breakpoints.push_back(tied[tie_index++].score);
      map.values.push_back(stack[b].mean);
    }
  }
  return map;
}

std::vector<double> isotonic_apply(const IsotonicMap& map, const std::vector<double>& scores) {
  require(!map.empty(), ErrorCode::InvalidArgument, "isotonic_apply: empty map");
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = scores[i];
    if (s <= map.breakpoints.front()) {
      out[i] = map.values.front();
    } else if (s >= map.breakpoints.back()) {
      out[i] = map.values.back();
    } else {
      const auto it = std::upper_bound(map.breakpoints.begin(), map.breakpoints.end(), s);
      out[i] = map.values[std::size_t(it - map.breakpoints.begin()) - 1];
    }
  }
  return out;
}

std::vector<IsotonicMap> isotonic_fit_ovr(const Matrix& probs, const std::vector<int>& y_true) {
  require(std::int64_t(y_true.size()) == probs.rows(), ErrorCode::LengthMismatch,
          "isotonic_fit_ovr: probabilities and labels differ in length");
  std::vector<IsotonicMap> maps;
  for (int c = 0; c < probs.cols(); ++c) {
    std::vector<double> scores(std::size_t(probs.rows()));
    std::vector<int> y(std::size_t(probs.rows()));
    for (std::int64_t i = 0; i < probs.rows(); ++i) {
      scores[std::size_t(i)] = probs(i, c);
      y[std::size_t(i)] = y_true[std::size_t(i)] == c ? 1 : 0;
    }
    maps.push_back(isotonic_fit(scores, y));
  }
  return maps;
}

Matrix isotonic_apply_ovr(const std::vector<IsotonicMap>& maps, const Matrix& probs) {
  require(std::int64_t(maps.size()) == probs.cols(), ErrorCode::ShapeMismatch,
          "isotonic_apply_ovr: one map per probability column required");
  Matrix out(probs.rows(), probs.cols());
  for (std::int64_t c = 0; c < probs.cols(); ++c) {
    std::vector<double> scores(std::size_t(probs.rows()));
    for (std::int64_t i = 0; i < probs.rows(); ++i) scores[std::size_t(i)] = probs(i, c);
    const auto calibrated = isotonic_apply(maps[std::size_t(c)], scores);
    for (std::int64_t i = 0; i < probs.rows(); ++i) out(i, c) = calibrated[std::size_t(i)];
  }
  for (std::int64_t i = 0; i < out.rows(); ++i) {
    const double sum = out.row(i).sum();
    if (sum > 0.0) {
      out.row(i) /= sum;
    } else {
      out.row(i).setConstant(1.0 / double(out.cols()));
    }
  }
  return out;
}

std::shared_ptr<Model> sample_weighting(const Dataset& ds, const SampleWeightingConfig& cfg,
                                        Seed seed,
                                        std::vector<std::int64_t>* misclassified_out) {
  require(cfg.factor > 0.0, ErrorCode::InvalidArgument,
          "sample_weighting: factor must be positive");

  const auto fit = [&](const std::vector<double>* w) -> std::shared_ptr<Model> {
    if (cfg.learner == SampleWeightingConfig::Learner::tree) {
      TreeConfig tc = cfg.tree;
      tc.seed = seed;
      return std::make_shared<TreeModel>(train_tree(ds, w, tc));
    }
    return std::make_shared<ForestModel>(train_forest(ds, cfg.forest, seed, w));
  };

  const auto m0 = fit(nullptr);
  const auto pred = m0->predict(ds.features);

  std::vector<double> weights(std::size_t(ds.n_samples()), 1.0);
  for (std::int64_t i = 0; i < ds.n_samples(); ++i) {
    if (pred[std::size_t(i)] != ds.labels[std::size_t(i)]) {
      weights[std::size_t(i)] *= cfg.factor;
      if (misclassified_out) misclassified_out->push_back(i);
    }
  }
  return fit(&weights);
}

}  // namespace imbal
