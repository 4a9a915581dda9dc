#pragma once

#include <vector>

#include "imbal/dataset.hpp"
#include "imbal/rng.hpp"

namespace imbal {

struct CvaeConfig {
  int latent_dim = 4;
  std::vector<int> hidden = {16};
  int epochs = 300;
  double lr = 1e-3;
  int batch_size = 16;
  double beta = 1.0;  // weight of the KL term
};

// Minimal conditional VAE over standardized features: the encoder maps
// (features ⊕ one-hot class) to a diagonal Gaussian over the latent space,
// the decoder maps (latent ⊕ one-hot class) back to feature space.
class CvaeModel {
 public:
  CvaeConfig config;
  Standardizer scaler;
  int n_features = 0;
  int n_classes = 0;
  std::vector<std::int64_t> class_counts;

  // Encoder: hidden ReLU stack, then linear mu / logvar heads.
  std::vector<Matrix> enc_w;
  std::vector<Vector> enc_b;
  Matrix w_mu, w_logvar;
  Vector b_mu, b_logvar;
  // Decoder: hidden ReLU stack, then a linear reconstruction layer.
  std::vector<Matrix> dec_w;
  std::vector<Vector> dec_b;

  double final_loss = 0.0;
  double min_batch_kl = 0.0;  // smallest KL term seen during training

  // Decode standardized-space reconstructions for latent rows z and class c.
  Matrix decode(const Matrix& z, int class_id) const;
};

CvaeModel cvae_fit(const Dataset& ds, const CvaeConfig& cfg, Seed seed);

// n decoded draws (z ~ N(0, I)) for the requested class, de-standardized.
// n = 0 yields an empty dataset.
Dataset cvae_sample(const CvaeModel& model, int class_id, std::int64_t n, Seed seed);

}  // namespace imbal
