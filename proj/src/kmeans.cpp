#include "imbal/kmeans.hpp"

#include <limits>

#include "imbal/error.hpp"

namespace imbal {
namespace {

// Nearest centroid per point (ties toward the lower centroid index) plus the
// squared distance to it.
void assign_points(const Matrix& points, const Matrix& centroids, std::vector<int>& assignments,
                   Vector& dist2) {
  for (std::int64_t i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
    for (std::int64_t c = 1; c < centroids.rows(); ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = int(c);
      }
    }
    assignments[std::size_t(i)] = best;
    dist2[i] = best_d;
  }
}

}  // namespace

KMeansModel kmeans_fit(const Matrix& points, int k, Seed seed, int max_iter, double tol) {
  const std::int64_t n = points.rows();
  require(n >= 1, ErrorCode::EmptyDataset, "kmeans: no points");
  require(k >= 1, ErrorCode::InvalidArgument, "kmeans: k must be >= 1");
  require(std::int64_t(k) <= n, ErrorCode::KTooLarge, "kmeans: k exceeds the number of points");
  require(points.allFinite(), ErrorCode::InvalidArgument, "kmeans: non-finite point values");

  Rng rng(seed);
  KMeansModel model;
  model.k = k;
  model.centroids.resize(k, points.cols());

  // k-means++ seeding: next centroid drawn proportionally to the squared
  // distance from the nearest already-chosen one.
  model.centroids.row(0) = points.row(std::int64_t(rng.uniform_index(std::size_t(n))));
  Vector d2 = Vector::Constant(n, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    for (std::int64_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (points.row(i) - model.centroids.row(c - 1)).squaredNorm());
    }
    std::int64_t pick;
    if (d2.sum() > 0.0) {
      std::vector<double> w(d2.data(), d2.data() + n);
      pick = std::int64_t(rng.weighted_index(w));
    } else {
      pick = std::int64_t(rng.uniform_index(std::size_t(n)));  // all points coincide
    }
    model.centroids.row(c) = points.row(pick);
  }

  model.assignments.assign(std::size_t(n), 0);
  Vector dist2(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    assign_points(points, model.centroids, model.assignments, dist2);
    model.inertia_history.push_back(dist2.sum());
    model.iterations = iter + 1;

    Matrix next = Matrix::Zero(k, points.cols());
    std::vector<std::int64_t> counts(std::size_t(k), 0);
    for (std::int64_t i = 0; i < n; ++i) {
      next.row(model.assignments[std::size_t(i)]) += points.row(i);
      counts[std::size_t(model.assignments[std::size_t(i)])]++;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[std::size_t(c)] > 0) {
        next.row(c) /= double(counts[std::size_t(c)]);
      } else {
        // Reseed an empty cluster to the farthest point, then retire that
        // point's distance so a second empty cluster picks a different one.
        std::int64_t far_idx = 0;
        dist2.maxCoeff(&far_idx);
        next.row(c) = points.row(far_idx);
        dist2[far_idx] = -1.0;
      }
    }

    const double shift = (next - model.centroids).rowwise().norm().maxCoeff();
    model.centroids = next;
    if (shift < tol) break;
  }

  assign_points(points, model.centroids, model.assignments, dist2);
  model.inertia = dist2.sum();
  model.inertia_history.push_back(model.inertia);
  return model;
}

}  // namespace imbal
