#pragma once

#include <map>
#include <optional>
#include <vector>

#include "imbal/cvae.hpp"
#include "imbal/dataset.hpp"
#include "imbal/rng.hpp"

namespace imbal {

enum class ResampleMethod {
  ros,
  smote,
  adasyn,
  rus,
  cluster_centroids,
  smote_tomek,
  massaging,
  perturbation,
  cluster_massaging,
  cvae,
};

struct ResampleSpec {
  ResampleMethod method = ResampleMethod::ros;

  // Per-class target counts. balance_auto means "to majority" for
  // oversamplers and "to minority" for RUS.
  enum class Target { balance_auto, to_majority, to_minority, counts };
  Target target = Target::balance_auto;
  std::map<int, std::int64_t> target_counts;

  int k_neighbors = 5;
  int n_clusters = 0;  // 0 = per-method default
  double flip_fraction = 0.20;
  double p_majority_flip = 0.0;
  double p_minority_flip = 0.0;
  // Label-flip pair for massaging/perturbation; -1 = majority/minority.
  int from_class = -1;
  int to_class = -1;
  CvaeConfig cvae;

  // Test hook: pins the SMOTE/ADASYN interpolation coefficient.
  std::optional<double> lambda_override;
};

struct TomekPair {
  std::int64_t index_a = 0;  // always < index_b; classes differ
  std::int64_t index_b = 0;
};

// Per-class row targets under the spec's balancing mode.
std::vector<std::int64_t> resolve_targets(const Dataset& ds, const ResampleSpec& spec,
                                          bool oversample);

Dataset ros(const Dataset& ds, const ResampleSpec& spec, Seed seed);
Dataset smote(const Dataset& ds, const ResampleSpec& spec, Seed seed);
Dataset adasyn(const Dataset& ds, const ResampleSpec& spec, Seed seed);
Dataset rus(const Dataset& ds, const ResampleSpec& spec, Seed seed);
Dataset cluster_centroids(const Dataset& ds, const ResampleSpec& spec, Seed seed);

// Mutual global 1-NN pairs with differing classes (standardized distances).
std::vector<TomekPair> find_tomek_links(const Dataset& ds);
// SMOTE, then from each Tomek link of the result drop the member whose
// original class was the better represented one (ties drop neither).
Dataset smote_tomek(const Dataset& ds, const ResampleSpec& spec, Seed seed);

// Flip the probe-scored top fraction of from_class labels to to_class.
Dataset massaging(const Dataset& ds, double flip_fraction, Seed seed, int from_class = -1,
                  int to_class = -1);
// Random per-sample label flips between the named pair.
Dataset perturbation(const Dataset& ds, double p_majority_flip, double p_minority_flip, Seed seed,
                     int from_class = -1, int to_class = -1);
// Flip a fraction of the majority cluster nearest the minority centroid.
Dataset cluster_massaging(const Dataset& ds, int n_clusters, double flip_fraction, Seed seed);

// CVAE-backed oversampling toward the spec targets.
Dataset cvae_oversample(const Dataset& ds, const ResampleSpec& spec, Seed seed);

// Dispatch on spec.method.
Dataset resample(const Dataset& ds, const ResampleSpec& spec, Seed seed);

}  // namespace imbal
