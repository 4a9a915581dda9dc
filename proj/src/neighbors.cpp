#include "imbal/neighbors.hpp"

#include <algorithm>

#include "imbal/error.hpp"

namespace imbal {

std::vector<int> knn_neighbors(const Matrix& points, const std::vector<int>& labels,
                               const Eigen::Ref<const Eigen::RowVectorXd>& query, int k,
                               int restrict_to_class, int exclude_index) {
  require(k >= 1, ErrorCode::InvalidArgument, "knn: k must be >= 1");
  require(points.cols() == query.cols(), ErrorCode::ShapeMismatch,
          "knn: query width does not match index");
  if (restrict_to_class >= 0) {
    require(std::int64_t(labels.size()) == points.rows(), ErrorCode::LengthMismatch,
            "knn: class restriction requires one label per point");
  }

  std::vector<std::pair<double, int>> eligible;
  eligible.reserve(std::size_t(points.rows()));
  for (std::int64_t i = 0; i < points.rows(); ++i) {
    if (i == exclude_index) continue;
    if (restrict_to_class >= 0 && labels[std::size_t(i)] != restrict_to_class) continue;
    eligible.emplace_back((points.row(i) - query).squaredNorm(), int(i));
  }
  require(std::size_t(k) <= eligible.size(), ErrorCode::KTooLarge,
          "knn: k exceeds the number of eligible points");

  std::partial_sort(eligible.begin(), eligible.begin() + k, eligible.end());
  std::vector<int> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out[std::size_t(i)] = eligible[std::size_t(i)].second;
  return out;
}

}  // namespace imbal
