#include "imbal/loss.hpp"

#include <cmath>

#include "imbal/error.hpp"

namespace imbal {
namespace {

constexpr double kProbFloor = 1e-12;

double clamp_prob(double p) { return std::min(std::max(p, kProbFloor), 1.0 - kProbFloor); }

// -alpha * (1-p)^gamma * ln(p) for one sample.
double focal_term(double p, double gamma, double alpha) {
  p = clamp_prob(p);
  const double mod = gamma == 0.0 ? 1.0 : std::pow(1.0 - p, gamma);
  return -alpha * mod * std::log(p);
}

}  // namespace

double LossSpec::effective_gamma() const {
  return kind == LossKind::focal || kind == LossKind::weighted_focal ? gamma : 0.0;
}

Vector LossSpec::effective_alpha(int n_classes) const {
  if (kind == LossKind::cross_entropy || kind == LossKind::focal || alpha.size() == 0) {
    return Vector::Ones(n_classes);
  }
  require(int(alpha.size()) == n_classes, ErrorCode::ShapeMismatch,
          "loss: alpha length does not match the class count");
  require((alpha.array() > 0.0).all(), ErrorCode::InvalidArgument,
          "loss: alpha factors must be positive");
  return alpha;
}

double focal_loss(const Matrix& y_true_onehot, const Matrix& probs, double gamma,
                  const Vector& alpha) {
  require(y_true_onehot.rows() == probs.rows() && y_true_onehot.cols() == probs.cols(),
          ErrorCode::ShapeMismatch, "focal_loss: one-hot and probability shapes differ");
  require(probs.rows() >= 1, ErrorCode::EmptyDataset, "focal_loss: no samples");
  require(probs.allFinite(), ErrorCode::NonFiniteProb, "focal_loss: non-finite probabilities");
  require(gamma >= 0.0, ErrorCode::InvalidArgument, "focal_loss: gamma must be non-negative");
  require(alpha.size() == 0 || alpha.size() == probs.cols(), ErrorCode::ShapeMismatch,
          "focal_loss: alpha length does not match the class count");

  double total = 0.0;
  for (std::int64_t i = 0; i < probs.rows(); ++i) {
    std::int64_t c = 0;
    y_true_onehot.row(i).maxCoeff(&c);
    const double a = alpha.size() == 0 ? 1.0 : alpha[c];
    total += focal_term(probs(i, c), gamma, a);
  }
  return total / double(probs.rows());
}

Matrix softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::int64_t i = 0; i < logits.rows(); ++i) {
    const Eigen::RowVectorXd shifted =
        logits.row(i).array() - logits.row(i).maxCoeff();
    const Eigen::RowVectorXd e = shifted.array().exp();
    out.row(i) = e / e.sum();
  }
  return out;
}

double loss_and_grad(const LossSpec& spec, const Matrix& logits, const std::vector<int>& labels,
                     Matrix& grad_logits) {
  const std::int64_t n = logits.rows();
  const int n_classes = int(logits.cols());
  require(n >= 1, ErrorCode::EmptyDataset, "loss: empty batch");
  require(std::int64_t(labels.size()) == n, ErrorCode::LengthMismatch,
          "loss: labels length does not match batch");
  require(logits.allFinite(), ErrorCode::NonFiniteProb, "loss: non-finite logits");

  const double gamma = spec.effective_gamma();
  const Vector alpha = spec.effective_alpha(n_classes);
  const Matrix probs = softmax(logits);

  grad_logits.resize(n, n_classes);
  double total = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const int c = labels[std::size_t(i)];
    require(c >= 0 && c < n_classes, ErrorCode::InvalidArgument, "loss: label out of range");
    const double p = clamp_prob(probs(i, c));
    const double a = alpha[c];
    total += focal_term(p, gamma, a);

    // dL/dp_c; for gamma = 0 this is the plain -alpha/p of cross-entropy.
    double dl_dp;
    if (gamma == 0.0) {
      dl_dp = -a / p;
    } else {
      const double one_m = 1.0 - p;
      dl_dp = a * (gamma * std::pow(one_m, gamma - 1.0) * std::log(p) -
                   std::pow(one_m, gamma) / p);
    }
    // Chain through softmax: dp_c/dz_j = p_c (delta_cj - p_j).
    const double pc = probs(i, c);
    for (int j = 0; j < n_classes; ++j) {
      const double dpc_dz = pc * ((j == c ? 1.0 : 0.0) - probs(i, j));
      grad_logits(i, j) = dl_dp * dpc_dz;
    }
  }
  grad_logits /= double(n);
  return total / double(n);
}

}  // namespace imbal
