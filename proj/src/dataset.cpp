#include "imbal/dataset.hpp"

#include <algorithm>
#include <cmath>

namespace imbal {

Dataset Dataset::create(Matrix features, std::vector<int> labels, int n_classes) {
  require(features.rows() >= 1, ErrorCode::EmptyDataset, "dataset needs at least one sample");
  require(static_cast<std::int64_t>(labels.size()) == features.rows(),
          ErrorCode::LengthMismatch, "labels do not match feature rows");
  require(features.allFinite(), ErrorCode::InvalidArgument,
          "non-finite feature values are rejected at ingestion");

  int max_label = -1;
  for (int label : labels) {
    require(label >= 0, ErrorCode::InvalidArgument, "negative class id");
    max_label = std::max(max_label, label);
  }
  if (n_classes < 0) n_classes = max_label + 1;
  require(max_label < n_classes, ErrorCode::InvalidArgument, "label out of class range");

  Dataset ds;
  ds.features = std::move(features);
  ds.labels = std::move(labels);
  ds.n_classes = n_classes;
  ds.class_counts.assign(static_cast<std::size_t>(n_classes), 0);
  for (int label : ds.labels) ds.class_counts[static_cast<std::size_t>(label)]++;
  return ds;
}

int Dataset::present_classes() const {
  int present = 0;
  for (auto c : class_counts) present += (c > 0);
  return present;
}

int Dataset::majority_class() const {
  std::size_t best = 0;
  for (std::size_t c = 1; c < class_counts.size(); ++c) {
    if (class_counts[c] > class_counts[best]) best = c;
  }
  return static_cast<int>(best);
}

int Dataset::minority_class() const {
  // Lowest count among present classes; empty classes do not qualify.
  int best = -1;
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    if (class_counts[c] == 0) continue;
    if (best < 0 || class_counts[c] < class_counts[static_cast<std::size_t>(best)]) {
      best = static_cast<int>(c);
    }
  }
  require(best >= 0, ErrorCode::EmptyDataset, "no class present");
  return best;
}

std::vector<std::int64_t> Dataset::indices_of(int class_id) const {
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; i < n_samples(); ++i) {
    if (labels[static_cast<std::size_t>(i)] == class_id) out.push_back(i);
  }
  return out;
}

Dataset Dataset::select(const std::vector<std::int64_t>& rows) const {
  Matrix f(static_cast<std::int64_t>(rows.size()), n_features());
  std::vector<int> l(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    f.row(static_cast<std::int64_t>(i)) = features.row(rows[i]);
    l[i] = labels[static_cast<std::size_t>(rows[i])];
  }
  return Dataset::create(std::move(f), std::move(l), n_classes);
}

Dataset Dataset::append(const Matrix& rows, const std::vector<int>& row_labels) const {
  require(rows.cols() == n_features(), ErrorCode::ShapeMismatch,
          "appended rows have wrong feature width");
  require(static_cast<std::int64_t>(row_labels.size()) == rows.rows(),
          ErrorCode::LengthMismatch, "appended labels do not match rows");
  Matrix f(n_samples() + rows.rows(), n_features());
  f.topRows(n_samples()) = features;
  f.bottomRows(rows.rows()) = rows;
  std::vector<int> l = labels;
  l.insert(l.end(), row_labels.begin(), row_labels.end());
  return Dataset::create(std::move(f), std::move(l), n_classes);
}

Dataset Dataset::with_labels(std::vector<int> new_labels) const {
  return Dataset::create(features, std::move(new_labels), n_classes);
}

Standardizer Standardizer::fit(const Matrix& features) {
  Standardizer s;
  const auto n = static_cast<double>(features.rows());
  s.mean = features.colwise().mean();
  s.scale = Vector::Ones(features.cols());
  for (std::int64_t j = 0; j < features.cols(); ++j) {
    double var = (features.col(j).array() - s.mean(j)).square().sum() / n;
    double sd = std::sqrt(var);
    if (sd > 0.0) s.scale(j) = sd;
  }
  return s;
}

Matrix Standardizer::transform(const Matrix& features) const {
  return (features.rowwise() - mean.transpose()).array().rowwise() /
         scale.transpose().array();
}

Matrix Standardizer::inverse(const Matrix& standardized) const {
  return (standardized.array().rowwise() * scale.transpose().array()).rowwise() +
         mean.transpose().array();
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double test_fraction,
                                             Seed seed) {
  require(test_fraction > 0.0 && test_fraction < 1.0, ErrorCode::FractionOutOfRange,
          "test_fraction must lie in (0, 1)");
  for (std::size_t c = 0; c < ds.class_counts.size(); ++c) {
    require(ds.class_counts[c] == 0 || ds.class_counts[c] >= 2, ErrorCode::TooFewSamples,
            "stratified_split needs >= 2 samples per present class");
  }

  Rng rng(seed);
  std::vector<std::int64_t> train_rows, test_rows;
  for (int c = 0; c < ds.n_classes; ++c) {
    auto rows = ds.indices_of(c);
    if (rows.empty()) continue;
    auto count = static_cast<std::int64_t>(rows.size());
    auto want = static_cast<std::int64_t>(
        std::llround(static_cast<double>(count) * test_fraction));
    want = std::clamp<std::int64_t>(want, 1, count - 1);
    std::vector<std::int64_t> shuffled = rows;
    rng.shuffle(shuffled);
    // Keep dataset order within each side so the partition is stable.
    std::vector<std::int64_t> test_part(shuffled.begin(), shuffled.begin() + want);
    std::vector<std::int64_t> train_part(shuffled.begin() + want, shuffled.end());
    std::sort(test_part.begin(), test_part.end());
    std::sort(train_part.begin(), train_part.end());
    test_rows.insert(test_rows.end(), test_part.begin(), test_part.end());
    train_rows.insert(train_rows.end(), train_part.begin(), train_part.end());
  }
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  return {ds.select(train_rows), ds.select(test_rows)};
}

}  // namespace imbal
