#pragma once

#include <initializer_list>
#include <vector>

#include "imbal/dataset.hpp"
#include "imbal/rng.hpp"

namespace imbal::testing {

inline Dataset make_dataset(std::initializer_list<std::initializer_list<double>> rows,
                            std::initializer_list<int> labels, int n_classes = -1) {
  const auto n = static_cast<std::int64_t>(rows.size());
  const auto d = static_cast<std::int64_t>(rows.begin()->size());
  Matrix f(n, d);
  std::int64_t i = 0;
  for (const auto& row : rows) {
    std::int64_t j = 0;
    for (double v : row) f(i, j++) = v;
    ++i;
  }
  return Dataset::create(std::move(f), std::vector<int>(labels), n_classes);
}

// Isotropic Gaussian blobs, one per class center, counts[i] samples each.
inline Dataset make_blobs(const std::vector<std::vector<double>>& centers,
                          const std::vector<int>& counts, double sigma, std::uint64_t seed) {
  const auto d = static_cast<std::int64_t>(centers.front().size());
  std::int64_t total = 0;
  for (int c : counts) total += c;
  Matrix f(total, d);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(total));
  Rng rng(seed);
  std::int64_t row = 0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (int i = 0; i < counts[c]; ++i) {
      for (std::int64_t j = 0; j < d; ++j) {
        f(row, j) = rng.normal(centers[c][static_cast<std::size_t>(j)], sigma);
      }
      labels.push_back(static_cast<int>(c));
      ++row;
    }
  }
  return Dataset::create(std::move(f), std::move(labels));
}

}  // namespace imbal::testing
