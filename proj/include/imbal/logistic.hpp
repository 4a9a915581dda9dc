#pragma once

#include <vector>

#include "imbal/model.hpp"

namespace imbal {

struct LogisticConfig {
  double lr = 0.1;
  int iterations = 500;
  double l2 = 1e-4;
};

class LogisticModel final : public Model {
 public:
  Matrix weights;  // n_features x n_classes
  Vector bias;     // n_classes
  std::vector<double> loss_history;  // regularized loss per iteration

  Matrix predict_proba(const Matrix& features) const override;
  int n_classes() const override { return int(bias.size()); }
};

// Multinomial logistic regression by full-batch gradient descent on
// cross-entropy with L2 penalty l2/2 * ||W||^2. Deterministic (zero init).
LogisticModel train_logistic(const Matrix& features, const std::vector<int>& labels,
                             const LogisticConfig& cfg = {});

}  // namespace imbal
