#include "imbal/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "imbal/error.hpp"
#include "imbal/loss.hpp"

namespace imbal {

LogisticModel train_logistic(const Matrix& features, const std::vector<int>& labels,
                             const LogisticConfig& cfg) {
  const std::int64_t n = features.rows();
  require(n >= 1, ErrorCode::EmptyDataset, "logistic: no samples");
  require(std::int64_t(labels.size()) == n, ErrorCode::LengthMismatch,
          "logistic: labels length mismatch");
  require(cfg.lr > 0.0 && cfg.iterations >= 1 && cfg.l2 >= 0.0, ErrorCode::InvalidArgument,
          "logistic: bad configuration");

  int n_classes = 0;
  for (int y : labels) {
    require(y >= 0, ErrorCode::InvalidArgument, "logistic: negative label");
    n_classes = std::max(n_classes, y + 1);
  }
  int distinct = 0;
  std::vector<std::int64_t> counts(std::size_t(n_classes), 0);
  for (int y : labels) counts[std::size_t(y)]++;
  for (auto c : counts) distinct += c > 0 ? 1 : 0;
  require(distinct >= 2, ErrorCode::SingleClass, "logistic: need at least two classes");

  LogisticModel model;
  model.weights = Matrix::Zero(features.cols(), n_classes);
  model.bias = Vector::Zero(n_classes);

  LossSpec ce;  // plain cross-entropy
  model.loss_history.reserve(std::size_t(cfg.iterations));
  for (int it = 0; it < cfg.iterations; ++it) {
    const Matrix logits = (features * model.weights).rowwise() + model.bias.transpose();
    Matrix grad_logits;
    const double data_loss = loss_and_grad(ce, logits, labels, grad_logits);
    const double loss = data_loss + 0.5 * cfg.l2 * model.weights.squaredNorm();
    require(std::isfinite(loss), ErrorCode::DivergedLoss, "logistic: loss diverged");
    model.loss_history.push_back(loss);

    const Matrix grad_w = features.transpose() * grad_logits + cfg.l2 * model.weights;
    const Vector grad_b = grad_logits.colwise().sum().transpose();
    model.weights -= cfg.lr * grad_w;
    model.bias -= cfg.lr * grad_b;
  }
  return model;
}

Matrix LogisticModel::predict_proba(const Matrix& features) const {
  require(features.cols() == weights.rows(), ErrorCode::ShapeMismatch,
          "logistic: feature width does not match the model");
  return softmax((features * weights).rowwise() + bias.transpose());
}

}  // namespace imbal
