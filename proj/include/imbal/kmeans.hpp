#pragma once

#include <vector>

#include "imbal/dataset.hpp"
#include "imbal/rng.hpp"

namespace imbal {

struct KMeansModel {
  int k = 0;
  Matrix centroids;  // k x n_features
  std::vector<int> assignments;
  double inertia = 0.0;
  int iterations = 0;
  std::vector<double> inertia_history;  // one entry per assignment pass
};

// k-means++ initialization followed by Lloyd iterations. Converges when the
// largest centroid shift drops below tol; empty clusters are reseeded to the
// point farthest from its assigned centroid.
KMeansModel kmeans_fit(const Matrix& points, int k, Seed seed, int max_iter = 300,
                       double tol = 1e-6);

}  // namespace imbal
