#include "imbal/model.hpp"

namespace imbal {

int argmax_class(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  int best = 0;
  for (int j = 1; j < int(row.size()); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

std::vector<int> Model::predict(const Matrix& features) const {
  const Matrix proba = predict_proba(features);
  std::vector<int> out(std::size_t(proba.rows()));
  // Indexes coefficients directly: binding a (strided) matrix row to an
  // Eigen::Ref copies it into a temporary, which dominates this hot loop.
  for (std::int64_t i = 0; i < proba.rows(); ++i) {
    int best = 0;
    for (std::int64_t c = 1; c < proba.cols(); ++c) {
      if (proba(i, c) > proba(i, best)) best = int(c);
    }
    out[std::size_t(i)] = best;
  }
  return out;
}

}  // namespace imbal
