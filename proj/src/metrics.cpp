#include "imbal/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace imbal {

std::pair<ConfusionMatrix, MetricsReport> confusion_and_metrics(
    const std::vector<int>& y_true, const std::vector<int>& y_pred, int n_classes) {
  require(y_true.size() == y_pred.size(), ErrorCode::LengthMismatch,
          "y_true and y_pred differ in length");
  require(!y_true.empty(), ErrorCode::EmptyDataset, "no samples to evaluate");

  if (n_classes < 0) {
    int max_label = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      max_label = std::max({max_label, y_true[i], y_pred[i]});
    }
    n_classes = max_label + 1;
  }

  ConfusionMatrix cm;
  cm.counts = Eigen::MatrixXi::Zero(n_classes, n_classes);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    require(y_true[i] >= 0 && y_true[i] < n_classes && y_pred[i] >= 0 &&
                y_pred[i] < n_classes,
            ErrorCode::InvalidArgument, "label outside class range");
    cm.counts(y_true[i], y_pred[i])++;
  }

  MetricsReport report;
  report.precision.resize(static_cast<std::size_t>(n_classes), 0.0);
  report.recall.resize(static_cast<std::size_t>(n_classes), 0.0);
  report.f1.resize(static_cast<std::size_t>(n_classes), 0.0);

  const double total = static_cast<double>(y_true.size());
  double f1_sum = 0.0;
  double weighted_sum = 0.0;
  for (int c = 0; c < n_classes; ++c) {
    const double tp = cm.counts(c, c);
    const double predicted = cm.counts.col(c).sum();
    const double actual = cm.counts.row(c).sum();
    const double precision = predicted > 0 ? tp / predicted : 0.0;
    const double recall = actual > 0 ? tp / actual : 0.0;
    const double f1 =
        (precision + recall) > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    report.precision[static_cast<std::size_t>(c)] = precision;
    report.recall[static_cast<std::size_t>(c)] = recall;
    report.f1[static_cast<std::size_t>(c)] = f1;
    f1_sum += f1;
    weighted_sum += f1 * actual / total;
  }
  report.macro_f1 = f1_sum / static_cast<double>(n_classes);
  report.weighted_f1 = weighted_sum;
  report.accuracy = static_cast<double>(cm.counts.trace()) / total;
  return {cm, report};
}

double vmr(const std::vector<double>& scores) {
  require(scores.size() >= 2, ErrorCode::TooFewSamples, "vmr needs at least two scores");
  const double n = static_cast<double>(scores.size());
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= n;
  require(mean > 0.0, ErrorCode::ZeroMean, "vmr undefined for non-positive mean");
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  var /= n;
  return var / mean;
}

ClassWeights class_weights(const Dataset& ds) {
  const double n = static_cast<double>(ds.n_samples());
  const double c = static_cast<double>(ds.n_classes);
  ClassWeights cw;
  cw.weights.resize(ds.class_counts.size());
  for (std::size_t i = 0; i < ds.class_counts.size(); ++i) {
    require(ds.class_counts[i] > 0, ErrorCode::MissingClass,
            "class weights need every class present");
    cw.weights[i] = n / (c * static_cast<double>(ds.class_counts[i]));
  }
  return cw;
}

FdrScore compute_fdr(const Dataset& ds) {
  require(ds.present_classes() >= 2, ErrorCode::SingleClass,
          "FDR needs at least two classes present");

  const std::int64_t d = ds.n_features();
  FdrScore score;
  score.per_feature.resize(static_cast<std::size_t>(d), 0.0);

  double mean_acc = 0.0;
  std::int64_t usable = 0;
  for (std::int64_t j = 0; j < d; ++j) {
    const double overall_mean = ds.features.col(j).mean();
    double numerator = 0.0;
    double denominator = 0.0;
    for (int c = 0; c < ds.n_classes; ++c) {
      const auto n_k = static_cast<double>(ds.class_counts[static_cast<std::size_t>(c)]);
      if (n_k == 0.0) continue;
      double class_mean = 0.0;
      for (std::int64_t i = 0; i < ds.n_samples(); ++i) {
        if (ds.labels[static_cast<std::size_t>(i)] == c) class_mean += ds.features(i, j);
      }
      class_mean /= n_k;
      double class_var = 0.0;
      for (std::int64_t i = 0; i < ds.n_samples(); ++i) {
        if (ds.labels[static_cast<std::size_t>(i)] == c) {
          const double delta = ds.features(i, j) - class_mean;
          class_var += delta * delta;
        }
      }
      class_var /= n_k;  // population variance
      numerator += n_k * (class_mean - overall_mean) * (class_mean - overall_mean);
      denominator += n_k * class_var;
    }
    if (denominator == 0.0) {
      score.per_feature[static_cast<std::size_t>(j)] = FdrScore::kDegenerate;
      continue;
    }
    const double fdr = numerator / denominator;
    score.per_feature[static_cast<std::size_t>(j)] = fdr;
    mean_acc += fdr;
    ++usable;
  }
  require(usable > 0, ErrorCode::AllDegenerate, "every feature has zero within-class scatter");
  score.mean = mean_acc / static_cast<double>(usable);
  return score;
}

Matrix pca_2d(const Dataset& ds) {
  require(ds.n_features() >= 2, ErrorCode::ShapeMismatch, "pca_2d needs >= 2 features");
  require(ds.n_samples() >= 3, ErrorCode::TooFewSamples, "pca_2d needs >= 3 samples");

  const Matrix x = Standardizer::fit(ds.features).transform(ds.features);
  const Matrix cov = (x.transpose() * x) / static_cast<double>(x.rows());

  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  const Vector eigenvalues = solver.eigenvalues();   // ascending
  const Matrix eigenvectors = solver.eigenvectors();

  const double cutoff = std::max(eigenvalues.cwiseAbs().maxCoeff(), 1.0) * 1e-12;
  Matrix projection = Matrix::Zero(ds.n_samples(), 2);
  int out_col = 0;
  for (std::int64_t k = eigenvalues.size() - 1; k >= 0 && out_col < 2; --k) {
    if (eigenvalues(k) <= cutoff) break;  // rank-deficient: zero-pad the rest
    Vector v = eigenvectors.col(k);
    std::int64_t arg_max = 0;
    v.cwiseAbs().maxCoeff(&arg_max);
    if (v(arg_max) < 0.0) v = -v;
    projection.col(out_col++) = x * v;
  }
  return projection;
}

}  // namespace imbal
