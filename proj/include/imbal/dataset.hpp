#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "imbal/error.hpp"
#include "imbal/rng.hpp"

namespace imbal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Immutable labelled sample table. Rows are samples, columns are real-valued
// features; labels are dense class ids in [0, n_classes).
struct Dataset {
  Matrix features;                        // n_samples x n_features
  std::vector<int> labels;                // n_samples
  int n_classes = 0;
  std::vector<std::int64_t> class_counts; // indexed by class id, sums to n_samples

  std::int64_t n_samples() const { return features.rows(); }
  std::int64_t n_features() const { return features.cols(); }

  // Validates invariants (labels in range, finite features, counts match)
  // and computes class_counts. n_classes < 0 infers max(label) + 1; passing
  // it explicitly allows classes with zero samples.
  static Dataset create(Matrix features, std::vector<int> labels, int n_classes = -1);

  // Number of classes with at least one sample.
  int present_classes() const;

  // Class id with the largest count (lowest id wins ties) and its opposite.
  int majority_class() const;
  int minority_class() const;

  // Row indices belonging to one class, in dataset order.
  std::vector<std::int64_t> indices_of(int class_id) const;

  // New dataset holding the given rows (in the given order).
  Dataset select(const std::vector<std::int64_t>& rows) const;

  // Appends rows with labels; class ids must stay within n_classes.
  Dataset append(const Matrix& rows, const std::vector<int>& row_labels) const;

  // Same features, new labels.
  Dataset with_labels(std::vector<int> new_labels) const;
};

// Per-feature affine standardization (zero mean, unit variance). Features
// with zero variance keep scale 1 so the transform stays invertible.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Matrix& features);
  Matrix transform(const Matrix& features) const;
  Matrix inverse(const Matrix& standardized) const;
};

// Deterministic stratified split: per-class test counts are
// round(count * test_fraction) clamped to [1, count - 1].
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double test_fraction,
                                             Seed seed);

}  // namespace imbal
