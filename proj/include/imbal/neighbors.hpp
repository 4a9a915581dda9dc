#pragma once

#include <vector>

#include "imbal/dataset.hpp"

namespace imbal {

// Exact k-nearest-neighbors by Euclidean distance over the rows of `points`.
// Ties are broken toward the lower point index. `labels` may be empty unless
// restrict_to_class is used; exclude_index removes a stored query point from
// its own neighborhood.
std::vector<int> knn_neighbors(const Matrix& points, const std::vector<int>& labels,
                               const Eigen::Ref<const Eigen::RowVectorXd>& query, int k,
                               int restrict_to_class = -1, int exclude_index = -1);

}  // namespace imbal
