#include "imbal/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "imbal/error.hpp"
#include "imbal/forest.hpp"
#include "imbal/kmeans.hpp"
#include "imbal/neighbors.hpp"

namespace imbal {
namespace {

// Default flip pair: majority -> minority.
void resolve_flip_pair(const Dataset& ds, int& from_class, int& to_class) {
  require(ds.present_classes() >= 2, ErrorCode::SingleClass,
          "label flipping needs at least two classes");
  if (from_class < 0) from_class = ds.majority_class();
  if (to_class < 0) to_class = ds.minority_class();
  require(from_class >= 0 && from_class < ds.n_classes && to_class >= 0 &&
              to_class < ds.n_classes && from_class != to_class,
          ErrorCode::InvalidArgument, "label flipping needs two distinct valid classes");
}

// SMOTE-style interpolation: count synthetics per class-c anchor chosen
// uniformly; each synthetic sits on the segment to one of the anchor's k
// nearest same-class neighbors (distances in standardized space).
Matrix interpolate_synthetics(const Dataset& ds, const Matrix& z,
                              const std::vector<std::int64_t>& class_rows,
                              const std::vector<std::int64_t>& per_anchor, int k_neighbors,
                              const std::optional<double>& lambda_override, Rng& rng) {
  std::int64_t total = 0;
  for (auto n : per_anchor) total += n;
  Matrix synth(total, ds.n_features());
  std::vector<std::vector<int>> neighbor_cache(class_rows.size());

  std::int64_t row = 0;
  for (std::size_t a = 0; a < class_rows.size(); ++a) {
    if (per_anchor[a] == 0) continue;
    const std::int64_t anchor = class_rows[a];
    auto& nns = neighbor_cache[a];
    if (nns.empty()) {
      nns = knn_neighbors(z, ds.labels, z.row(anchor), k_neighbors,
                          ds.labels[std::size_t(anchor)], int(anchor));
    }
    for (std::int64_t j = 0; j < per_anchor[a]; ++j) {
      const int nn = nns[rng.uniform_index(nns.size())];
      const double lambda = lambda_override ? *lambda_override : rng.uniform();
      synth.row(row++) =
          ds.features.row(anchor) + lambda * (ds.features.row(nn) - ds.features.row(anchor));
    }
  }
  return synth;
}

Dataset append_synthetics(const Dataset& ds, const Matrix& rows, int class_id) {
  if (rows.rows() == 0) return ds;
  return ds.append(rows, std::vector<int>(std::size_t(rows.rows()), class_id));
}

}  // namespace

std::vector<std::int64_t> resolve_targets(const Dataset& ds, const ResampleSpec& spec,
                                          bool oversample) {
  std::vector<std::int64_t> targets(ds.class_counts.begin(), ds.class_counts.end());
  switch (spec.target) {
    case ResampleSpec::Target::counts:
      for (const auto& [c, n] : spec.target_counts) {
        require(c >= 0 && c < ds.n_classes, ErrorCode::UnknownClass,
                "resample: target count for unknown class");
        require(n >= 0, ErrorCode::InvalidArgument, "resample: negative target count");
        targets[std::size_t(c)] = n;
      }
      break;
    case ResampleSpec::Target::to_majority:
      std::fill(targets.begin(), targets.end(), *std::max_element(ds.class_counts.begin(),
                                                                  ds.class_counts.end()));
      break;
    case ResampleSpec::Target::to_minority: {
      std::int64_t lo = std::numeric_limits<std::int64_t>::max();
      for (auto c : ds.class_counts) {
        if (c > 0) lo = std::min(lo, c);
      }
      std::fill(targets.begin(), targets.end(), lo);
      break;
    }
    case ResampleSpec::Target::balance_auto: {
      ResampleSpec alt = spec;
      alt.target =
          oversample ? ResampleSpec::Target::to_majority : ResampleSpec::Target::to_minority;
      return resolve_targets(ds, alt, oversample);
    }
  }
  // Absent classes are never conjured up.
  for (int c = 0; c < ds.n_classes; ++c) {
    if (ds.class_counts[std::size_t(c)] == 0) targets[std::size_t(c)] = 0;
  }
  return targets;
}

Dataset ros(const Dataset& ds, const ResampleSpec& spec, Seed seed) {
  const auto targets = resolve_targets(ds, spec, true);
  Rng rng(seed);
  Dataset out = ds;
  for (int c = 0; c < ds.n_classes; ++c) {
    const std::int64_t deficit = targets[std::size_t(c)] - ds.class_counts[std::size_t(c)];
    if (deficit <= 0) continue;
    require(ds.class_counts[std::size_t(c)] > 0, ErrorCode::EmptyClass,
            "ros: cannot oversample an absent class");
    const auto rows = ds.indices_of(c);
    Matrix synth(deficit, ds.n_features());
    for (std::int64_t j = 0; j < deficit; ++j) {
      synth.row(j) = ds.features.row(rows[rng.uniform_index(rows.size())]);
    }
    out = append_synthetics(out, synth, c);
  }
  return out;
}

Dataset smote(const Dataset& ds, const ResampleSpec& spec, Seed seed) {
  require(spec.k_neighbors >= 1, ErrorCode::InvalidArgument, "smote: k_neighbors must be >= 1");
  const auto targets = resolve_targets(ds, spec, true);
  const Matrix z = Standardizer::fit(ds.features).transform(ds.features);
  Rng rng(seed);
  Dataset out = ds;
  for (int c = 0; c < ds.n_classes; ++c) {
    const std::int64_t deficit = targets[std::size_t(c)] - ds.class_counts[std::size_t(c)];
    if (deficit <= 0) continue;
    require(ds.class_counts[std::size_t(c)] > spec.k_neighbors, ErrorCode::TooFewMinority,
            "smote: class needs more than k_neighbors samples");
    const auto rows = ds.indices_of(c);
    // Uniform anchors: count how many synthetics each anchor owes.
    std::vector<std::int64_t> per_anchor(rows.size(), 0);
    for (std::int64_t j = 0; j < deficit; ++j) per_anchor[rng.uniform_index(rows.size())]++;
    out = append_synthetics(
        out, interpolate_synthetics(ds, z, rows, per_anchor, spec.k_neighbors,
                                    spec.lambda_override, rng),
        c);
  }
  return out;
}

Dataset adasyn(const Dataset& ds, const ResampleSpec& spec, Seed seed) {
  require(spec.k_neighbors >= 1, ErrorCode::InvalidArgument, "adasyn: k_neighbors must be >= 1");
  const auto targets = resolve_targets(ds, spec, true);
  const Matrix z = Standardizer::fit(ds.features).transform(ds.features);
  Rng rng(seed);
  Dataset out = ds;
  bool any_boundary = false, any_deficit = false;
  for (int c = 0; c < ds.n_classes; ++c) {
    const std::int64_t deficit = targets[std::size_t(c)] - ds.class_counts[std::size_t(c)];
    if (deficit <= 0) continue;
    any_deficit = true;
    require(ds.class_counts[std::size_t(c)] > spec.k_neighbors, ErrorCode::TooFewMinority,
            "adasyn: class needs more than k_neighbors samples");
    require(ds.n_samples() > spec.k_neighbors, ErrorCode::KTooLarge,
            "adasyn: k_neighbors exceeds dataset size");
    const auto rows = ds.indices_of(c);

    // Hardness r_i: fraction of other-class points among the k global NNs.
    std::vector<double> hardness(rows.size(), 0.0);
    double hardness_sum = 0.0;
    for (std::size_t a = 0; a < rows.size(); ++a) {
      const auto nns =
          knn_neighbors(z, ds.labels, z.row(rows[a]), spec.k_neighbors, -1, int(rows[a]));
      int other = 0;
      for (int nn : nns) other += ds.labels[std::size_t(nn)] != c ? 1 : 0;
      hardness[a] = double(other) / double(spec.k_neighbors);
      hardness_sum += hardness[a];
    }
    if (hardness_sum == 0.0) continue;  // fully separated class: nothing to anchor on
    any_boundary = true;

    // Largest-remainder allocation of the deficit proportional to hardness.
    std::vector<std::int64_t> per_anchor(rows.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::int64_t assigned = 0;
    for (std::size_t a = 0; a < rows.size(); ++a) {
      const double quota = double(deficit) * hardness[a] / hardness_sum;
      per_anchor[a] = std::int64_t(std::floor(quota));
      assigned += per_anchor[a];
      remainders.emplace_back(-(quota - std::floor(quota)), a);  // negate: sort ascending
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::int64_t r = 0; r < deficit - assigned; ++r) {
      per_anchor[remainders[std::size_t(r)].second]++;
    }

    out = append_synthetics(
        out, interpolate_synthetics(ds, z, rows, per_anchor, spec.k_neighbors,
                                    spec.lambda_override, rng),
        c);
  }
  require(!any_deficit || any_boundary, ErrorCode::NoBoundarySamples,
          "adasyn: no minority sample has other-class neighbors");
  return out;
}

Dataset rus(const Dataset& ds, const ResampleSpec& spec, Seed seed) {
  const auto targets = resolve_targets(ds, spec, false);
  Rng rng(seed);
  std::vector<bool> keep(std::size_t(ds.n_samples()), true);
  for (int c = 0; c < ds.n_classes; ++c) {
    const std::int64_t current = ds.class_counts[std::size_t(c)];
    const std::int64_t target = targets[std::size_t(c)];
    require(target <= current, ErrorCode::TargetExceedsCount,
            "rus: target exceeds the current class count");
    if (target == current) continue;
    const auto rows = ds.indices_of(c);
    for (auto r : rows) keep[std::size_t(r)] = false;
    for (auto pick : rng.sample_without_replacement(rows.size(), std::size_t(target))) {
      keep[std::size_t(rows[pick])] = true;
    }
  }
  std::vector<std::int64_t> survivors;
  for (std::int64_t i = 0; i < ds.n_samples(); ++i) {
    if (keep[std::size_t(i)]) survivors.push_back(i);
  }
  return ds.select(survivors);
}

Dataset cluster_centroids(const Dataset& ds, const ResampleSpec& spec, Seed seed) {
  require(ds.present_classes() >= 2, ErrorCode::SingleClass,
          "cluster_centroids: needs a majority and at least one other class");
  const int majority = ds.majority_class();
  const auto rows = ds.indices_of(majority);
  std::int64_t k = spec.n_clusters > 0 ? spec.n_clusters
                                       : ds.class_counts[std::size_t(ds.minority_class())];
  require(k <= std::int64_t(rows.size()), ErrorCode::KTooLarge,
          "cluster_centroids: more clusters than majority samples");

  const Standardizer scaler = Standardizer::fit(ds.features);
  Matrix zmaj(std::int64_t(rows.size()), ds.n_features());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    zmaj.row(std::int64_t(i)) = ds.features.row(rows[i]);
  }
  zmaj = scaler.transform(zmaj);
  const auto model = kmeans_fit(zmaj, int(k), seed);

  std::vector<std::int64_t> others;
  for (std::int64_t i = 0; i < ds.n_samples(); ++i) {
    if (ds.labels[std::size_t(i)] != majority) others.push_back(i);
  }
  Dataset out = ds.select(others);
  return out.append(scaler.inverse(model.centroids),
                    std::vector<int>(std::size_t(k), majority));
}

std::vector<TomekPair> find_tomek_links(const Dataset& ds) {
  require(ds.present_classes() >= 2, ErrorCode::SingleClass,
          "tomek links: need at least two classes");
  const Matrix z = Standardizer::fit(ds.features).transform(ds.features);
  const std::int64_t n = ds.n_samples();

  // Global 1-NN per point, ties toward the lower index.
  std::vector<std::int64_t> nn(std::size_t(n), -1);
  Vector d(n);
  for (std::int64_t i = 0; i < n; ++i) {
    d = (z.rowwise() - z.row(i)).rowwise().squaredNorm();
    std::int64_t best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::int64_t j = 0; j < n; ++j) {
      if (j != i && d[j] < best_d) {
        best_d = d[j];
        best = j;
      }
    }
    nn[std::size_t(i)] = best;
  }

  std::vector<TomekPair> links;
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t j = nn[std::size_t(i)];
    if (j > i && nn[std::size_t(j)] == i &&
        ds.labels[std::size_t(i)] != ds.labels[std::size_t(j)]) {
      links.push_back({i, j});
    }
  }
  return links;
}

Dataset smote_tomek(const Dataset& ds, const ResampleSpec& spec, Seed seed) {
  // Class standing is judged on the pre-SMOTE counts: after balancing, the
  // links still prune the originally well-represented side.
  const std::vector<std::int64_t> original_counts = ds.class_counts;
  Dataset mixed = smote(ds, spec, seed);
  const auto links = find_tomek_links(mixed);

  std::vector<bool> keep(std::size_t(mixed.n_samples()), true);
  for (const TomekPair& link : links) {
    const std::int64_t na = original_counts[std::size_t(mixed.labels[std::size_t(link.index_a)])];
    const std::int64_t nb = original_counts[std::size_t(mixed.labels[std::size_t(link.index_b)])];
    if (na > nb) keep[std::size_t(link.index_a)] = false;
    if (nb > na) keep[std::size_t(link.index_b)] = false;
  }
  std::vector<std::int64_t> survivors;
  for (std::int64_t i = 0; i < mixed.n_samples(); ++i) {
    if (keep[std::size_t(i)]) survivors.push_back(i);
  }
  return mixed.select(survivors);
}

Dataset massaging(const Dataset& ds, double flip_fraction, Seed seed, int from_class,
                  int to_class) {
  require(flip_fraction >= 0.0 && flip_fraction <= 1.0, ErrorCode::FractionOutOfRange,
          "massaging: flip_fraction must be in [0,1]");
  resolve_flip_pair(ds, from_class, to_class);

  const auto rows = ds.indices_of(from_class);
  const std::int64_t m = std::int64_t(std::floor(flip_fraction * double(rows.size())));
  if (m == 0) return ds;

  // Probe model scoring P(to_class) for every from_class row.
  ForestConfig probe_cfg;
  probe_cfg.n_estimators = 25;
  const ForestModel probe = train_forest(ds, probe_cfg, derive_seed(seed, "massaging-probe"));
  Matrix from_rows(std::int64_t(rows.size()), ds.n_features());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    from_rows.row(std::int64_t(i)) = ds.features.row(rows[i]);
  }
  const Matrix proba = probe.predict_proba(from_rows);

  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = proba(std::int64_t(a), to_class), sb = proba(std::int64_t(b), to_class);
    return sa != sb ? sa > sb : rows[a] < rows[b];
  });

  std::vector<int> labels = ds.labels;
  for (std::int64_t i = 0; i < m; ++i) {
    labels[std::size_t(rows[order[std::size_t(i)]])] = to_class;
  }
  return ds.with_labels(std::move(labels));
}

Dataset perturbation(const Dataset& ds, double p_majority_flip, double p_minority_flip, Seed seed,
                     int from_class, int to_class) {
  require(p_majority_flip >= 0.0 && p_majority_flip <= 1.0 && p_minority_flip >= 0.0 &&
              p_minority_flip <= 1.0,
          ErrorCode::FractionOutOfRange, "perturbation: probabilities must be in [0,1]");
  resolve_flip_pair(ds, from_class, to_class);

  Rng rng(seed);
  std::vector<int> labels = ds.labels;
  // One draw per sample in row order, flipped or not.
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double u = rng.uniform();
    if (labels[i] == from_class && u < p_majority_flip) {
      labels[i] = to_class;
    } else if (labels[i] == to_class && u < p_minority_flip) {
      labels[i] = from_class;
    }
  }
  return ds.with_labels(std::move(labels));
}

Dataset cluster_massaging(const Dataset& ds, int n_clusters, double flip_fraction, Seed seed) {
  require(flip_fraction >= 0.0 && flip_fraction <= 1.0, ErrorCode::FractionOutOfRange,
          "cluster_massaging: flip_fraction must be in [0,1]");
  int from_class = -1, to_class = -1;
  resolve_flip_pair(ds, from_class, to_class);
  const auto rows = ds.indices_of(from_class);
  if (n_clusters <= 0) n_clusters = int(std::min<std::int64_t>(5, std::int64_t(rows.size())));
  require(std::int64_t(n_clusters) <= std::int64_t(rows.size()), ErrorCode::KTooLarge,
          "cluster_massaging: more clusters than majority samples");

  const Standardizer scaler = Standardizer::fit(ds.features);
  const Matrix z = scaler.transform(ds.features);
  Matrix zmaj(std::int64_t(rows.size()), ds.n_features());
  for (std::size_t i = 0; i < rows.size(); ++i) zmaj.row(std::int64_t(i)) = z.row(rows[i]);
  const auto model = kmeans_fit(zmaj, n_clusters, derive_seed(seed, "clusters"));

  Eigen::RowVectorXd minority_centroid = Eigen::RowVectorXd::Zero(ds.n_features());
  const auto minority_rows = ds.indices_of(to_class);
  for (auto r : minority_rows) minority_centroid += z.row(r);
  minority_centroid /= double(minority_rows.size());

  int nearest = 0;
  double nearest_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < n_clusters; ++c) {
    const double d = (model.centroids.row(c) - minority_centroid).squaredNorm();
    if (d < nearest_d) {
      nearest_d = d;
      nearest = c;
    }
  }

  std::vector<std::int64_t> members;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (model.assignments[i] == nearest) members.push_back(rows[i]);
  }
  const std::int64_t m = std::int64_t(std::floor(flip_fraction * double(members.size())));
  Rng rng(derive_seed(seed, "flips"));
  std::vector<int> labels = ds.labels;
  for (auto pick : rng.sample_without_replacement(members.size(), std::size_t(m))) {
    labels[std::size_t(members[pick])] = to_class;
  }
  return ds.with_labels(std::move(labels));
}

Dataset cvae_oversample(const Dataset& ds, const ResampleSpec& spec, Seed seed) {
  const auto targets = resolve_targets(ds, spec, true);
  bool needs_model = false;
  for (int c = 0; c < ds.n_classes; ++c) {
    needs_model |= targets[std::size_t(c)] > ds.class_counts[std::size_t(c)];
  }
  if (!needs_model) return ds;

  const CvaeModel model = cvae_fit(ds, spec.cvae, derive_seed(seed, "cvae-fit"));
  Dataset out = ds;
  for (int c = 0; c < ds.n_classes; ++c) {
    const std::int64_t deficit = targets[std::size_t(c)] - ds.class_counts[std::size_t(c)];
    if (deficit <= 0) continue;
    const Dataset synth = cvae_sample(model, c, deficit, derive_seed(seed, "cvae-sample", c));
    out = out.append(synth.features, synth.labels);
  }
  return out;
}

Dataset resample(const Dataset& ds, const ResampleSpec& spec, Seed seed) {
  switch (spec.method) {
    case ResampleMethod::ros:
      return ros(ds, spec, seed);
    case ResampleMethod::smote:
      return smote(ds, spec, seed);
    case ResampleMethod::adasyn:
      return adasyn(ds, spec, seed);
    case ResampleMethod::rus:
      return rus(ds, spec, seed);
    case ResampleMethod::cluster_centroids:
      return cluster_centroids(ds, spec, seed);
    case ResampleMethod::smote_tomek:
      return smote_tomek(ds, spec, seed);
    case ResampleMethod::massaging:
      return massaging(ds, spec.flip_fraction, seed, spec.from_class, spec.to_class);
    case ResampleMethod::perturbation:
      return perturbation(ds, spec.p_majority_flip, spec.p_minority_flip, seed, spec.from_class,
                          spec.to_class);
    case ResampleMethod::cluster_massaging:
      return cluster_massaging(ds, spec.n_clusters, spec.flip_fraction, seed);
    case ResampleMethod::cvae:
      return cvae_oversample(ds, spec, seed);
  }
  fail(ErrorCode::InvalidArgument, "resample: unknown method");
}

}  // namespace imbal
