#pragma once

#include <functional>
#include <vector>

#include "imbal/loss.hpp"
#include "imbal/model.hpp"
#include "imbal/rng.hpp"

namespace imbal {

struct MlpConfig {
  std::vector<int> layers;  // empty = {n_features, 20, 10, n_classes}
  double lr = 1e-4;
  int batch_size = 8;
  int epochs = 200;
  int patience = 20;  // early stop after this many epochs without train-loss improvement; 0 = off
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
};

// Lets in-processing strategies substitute each epoch's training subset
// (row indices into the training set). The trainer shuffles whatever the
// sampler returns before batching.
using EpochSampler = std::function<std::vector<int>(int epoch, Rng& rng)>;

class MlpModel final : public Model {
 public:
  std::vector<int> layers;
  std::vector<Matrix> weights;  // weights[l]: layers[l] x layers[l+1]
  std::vector<Vector> biases;   // biases[l]: layers[l+1]
  Standardizer scaler;          // fitted on the training features
  int epochs_run = 0;

  Matrix predict_proba(const Matrix& features) const override;
  int n_classes() const override { return layers.back(); }

  // Logits for already-standardized inputs.
  Matrix forward_logits(const Matrix& x) const;
  // Loss on raw features; used by training and by gradient checks.
  double compute_loss(const Matrix& features, const std::vector<int>& labels,
                      const LossSpec& loss) const;
  double compute_gradients(const Matrix& features, const std::vector<int>& labels,
                           const LossSpec& loss, std::vector<Matrix>& grad_w,
                           std::vector<Vector>& grad_b) const;
};

// Mini-batch Adam on the configured loss. ReLU hidden layers, softmax output.
MlpModel train_mlp(const Dataset& ds, const MlpConfig& cfg, const LossSpec& loss, Seed seed,
                   const EpochSampler& epoch_sampler = nullptr);

}  // namespace imbal
