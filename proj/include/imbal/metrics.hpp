#pragma once

#include <limits>
#include <vector>

#include "imbal/dataset.hpp"

namespace imbal {

// counts(i, j) = samples of true class i predicted as class j.
struct ConfusionMatrix {
  Eigen::MatrixXi counts;

  std::int64_t total() const { return counts.sum(); }
};

struct MetricsReport {
  std::vector<double> precision;  // per class
  std::vector<double> recall;
  std::vector<double> f1;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
};

// Standard per-class precision/recall/F1. A class with no true and no
// predicted samples gets F1 = 0. n_classes < 0 infers from the labels.
std::pair<ConfusionMatrix, MetricsReport> confusion_and_metrics(
    const std::vector<int>& y_true, const std::vector<int>& y_pred, int n_classes = -1);

// Population variance divided by mean. Needs >= 2 scores and mean > 0.
double vmr(const std::vector<double>& scores);

// Class weights CW_i = n_samples / (n_classes * n_samples_i). Every class
// must be present; satisfies sum_i CW_i * n_i = n_samples.
struct ClassWeights {
  std::vector<double> weights;  // indexed by class id
};

ClassWeights class_weights(const Dataset& ds);

// Fisher Discriminant Ratio per feature: between-class scatter over
// within-class scatter with population (divide-by-n_k) class variances.
// Features whose within-class scatter is zero are reported as +infinity
// and excluded from the mean.
struct FdrScore {
  std::vector<double> per_feature;
  double mean = 0.0;

  static constexpr double kDegenerate = std::numeric_limits<double>::infinity();
};

FdrScore compute_fdr(const Dataset& ds);

// Projection onto the two leading principal components of the standardized
// features. Eigenvector signs are fixed so the largest-magnitude entry is
// positive; with fewer than two positive eigenvalues the missing component
// is zero-padded.
Matrix pca_2d(const Dataset& ds);

}  // namespace imbal
