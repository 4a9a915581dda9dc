#pragma once

#include <vector>

#include "imbal/dataset.hpp"

namespace imbal {

enum class LossKind { cross_entropy, weighted_ce, focal, weighted_focal };

struct LossSpec {
  LossKind kind = LossKind::cross_entropy;
  double gamma = 2.0;  // modulating exponent; honored by the focal kinds
  Vector alpha;        // per-class factors; empty = all ones; honored by weighted kinds

  // gamma/alpha actually applied once the kind is taken into account.
  double effective_gamma() const;
  Vector effective_alpha(int n_classes) const;
};

// Mean over samples of -alpha_c * (1 - p_c)^gamma * ln(p_c) with c the true
// class. Probabilities are clamped to [1e-12, 1 - 1e-12] before the log.
double focal_loss(const Matrix& y_true_onehot, const Matrix& probs, double gamma,
                  const Vector& alpha);

// Row-stable softmax.
Matrix softmax(const Matrix& logits);

// Loss value and gradient with respect to the logits (mean reduction).
double loss_and_grad(const LossSpec& spec, const Matrix& logits, const std::vector<int>& labels,
                     Matrix& grad_logits);

}  // namespace imbal
