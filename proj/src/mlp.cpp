#include "imbal/mlp.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "imbal/error.hpp"

namespace imbal {
namespace {

struct ForwardPass {
  std::vector<Matrix> activations;  // activations[0] = input, last = logits
  std::vector<Matrix> pre_relu;     // pre-activation of each hidden layer
};

ForwardPass forward(const MlpModel& model, const Matrix& x) {
  ForwardPass pass;
  pass.activations.push_back(x);
  const std::size_t n_layers = model.weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    Matrix z = (pass.activations.back() * model.weights[l]).rowwise() +
               model.biases[l].transpose();
    if (l + 1 < n_layers) {
      pass.pre_relu.push_back(z);
      pass.activations.push_back(z.cwiseMax(0.0));
    } else {
      pass.activations.push_back(std::move(z));
    }
  }
  return pass;
}

}  // namespace

Matrix MlpModel::forward_logits(const Matrix& x) const { return forward(*this, x).activations.back(); }

Matrix MlpModel::predict_proba(const Matrix& features) const {
  require(int(features.cols()) == layers.front(), ErrorCode::ShapeMismatch,
          "mlp: feature width does not match the input layer");
  return softmax(forward_logits(scaler.transform(features)));
}

double MlpModel::compute_loss(const Matrix& features, const std::vector<int>& labels,
                              const LossSpec& loss) const {
  Matrix grad;
  return loss_and_grad(loss, forward_logits(scaler.transform(features)), labels, grad);
}

double MlpModel::compute_gradients(const Matrix& features, const std::vector<int>& labels,
                                   const LossSpec& loss, std::vector<Matrix>& grad_w,
                                   std::vector<Vector>& grad_b) const {
  const ForwardPass pass = forward(*this, scaler.transform(features));
  Matrix delta;  // dL/dz of the current layer, walking backwards
  const double value = loss_and_grad(loss, pass.activations.back(), labels, delta);

  const std::size_t n_layers = weights.size();
  grad_w.resize(n_layers);
  grad_b.resize(n_layers);
  for (std::size_t l = n_layers; l-- > 0;) {
    grad_w[l] = pass.activations[l].transpose() * delta;
    grad_b[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      delta = (delta * weights[l].transpose()).cwiseProduct(
          (pass.pre_relu[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return value;
}

MlpModel train_mlp(const Dataset& ds, const MlpConfig& cfg, const LossSpec& loss, Seed seed,
                   const EpochSampler& epoch_sampler) {
  std::vector<int> layers = cfg.layers;
  if (layers.empty()) layers = {int(ds.n_features()), 20, 10, ds.n_classes};
  require(layers.size() >= 2, ErrorCode::InvalidArgument, "mlp: need at least input and output");
  require(layers.front() == int(ds.n_features()), ErrorCode::ShapeMismatch,
          "mlp: input layer width does not match the feature count");
  require(layers.back() == ds.n_classes, ErrorCode::ShapeMismatch,
          "mlp: output layer width does not match the class count");
  require(cfg.lr > 0.0 && cfg.batch_size >= 1 && cfg.epochs >= 1, ErrorCode::InvalidArgument,
          "mlp: bad optimizer configuration");

  MlpModel model;
  model.layers = layers;
  model.scaler = Standardizer::fit(ds.features);
  const Matrix x = model.scaler.transform(ds.features);

  Rng rng(seed);
  // He-style init for the ReLU stack; output layer gets the same treatment.
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    const int fan_in = layers[l], fan_out = layers[l + 1];
    const double sd = std::sqrt(2.0 / double(fan_in));
    Matrix w(fan_in, fan_out);
    for (std::int64_t i = 0; i < w.size(); ++i) w.data()[i] = sd * rng.normal();
    model.weights.push_back(std::move(w));
    model.biases.push_back(Vector::Zero(fan_out));
  }

  // Adam state.
  std::vector<Matrix> mw, vw;
  std::vector<Vector> mb, vb;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    mw.push_back(Matrix::Zero(model.weights[l].rows(), model.weights[l].cols()));
    vw.push_back(Matrix::Zero(model.weights[l].rows(), model.weights[l].cols()));
    mb.push_back(Vector::Zero(model.biases[l].size()));
    vb.push_back(Vector::Zero(model.biases[l].size()));
  }
  long step = 0;

  std::vector<int> all_rows(std::size_t(ds.n_samples()));
  std::iota(all_rows.begin(), all_rows.end(), 0);

  double best_loss = std::numeric_limits<double>::infinity();
  int stale_epochs = 0;
  std::vector<Matrix> gw;
  std::vector<Vector> gb;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<int> rows = epoch_sampler ? epoch_sampler(epoch, rng) : all_rows;
    require(!rows.empty(), ErrorCode::EmptyDataset, "mlp: epoch sampler returned no rows");
    for (int r : rows) {
      require(r >= 0 && std::int64_t(r) < ds.n_samples(), ErrorCode::InvalidArgument,
              "mlp: epoch sampler index out of range");
    }
    rng.shuffle(rows);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < rows.size(); start += std::size_t(cfg.batch_size)) {
      const std::size_t b = std::min(rows.size() - start, std::size_t(cfg.batch_size));
      Matrix bx(std::int64_t(b), x.cols());
      std::vector<int> by(b);
      for (std::size_t i = 0; i < b; ++i) {
        bx.row(std::int64_t(i)) = x.row(rows[start + i]);
        by[i] = ds.labels[std::size_t(rows[start + i])];
      }

      const ForwardPass pass = forward(model, bx);
      Matrix delta;
      const double batch_loss = loss_and_grad(loss, pass.activations.back(), by, delta);
      require(std::isfinite(batch_loss), ErrorCode::DivergedLoss, "mlp: training loss diverged");
      epoch_loss += batch_loss * double(b);

      const std::size_t n_layers = model.weights.size();
      gw.resize(n_layers);
      gb.resize(n_layers);
      for (std::size_t l = n_layers; l-- > 0;) {
        gw[l] = pass.activations[l].transpose() * delta;
        gb[l] = delta.colwise().sum().transpose();
        if (l > 0) {
          delta = (delta * model.weights[l].transpose())
                      .cwiseProduct((pass.pre_relu[l - 1].array() > 0.0).cast<double>().matrix());
        }
      }

      ++step;
      const double corr1 = 1.0 - std::pow(cfg.beta1, double(step));
      const double corr2 = 1.0 - std::pow(cfg.beta2, double(step));
      for (std::size_t l = 0; l < n_layers; ++l) {
        mw[l] = cfg.beta1 * mw[l] + (1.0 - cfg.beta1) * gw[l];
        vw[l] = cfg.beta2 * vw[l] + (1.0 - cfg.beta2) * gw[l].cwiseProduct(gw[l]);
        mb[l] = cfg.beta1 * mb[l] + (1.0 - cfg.beta1) * gb[l];
        vb[l] = cfg.beta2 * vb[l] + (1.0 - cfg.beta2) * gb[l].cwiseProduct(gb[l]);
        model.weights[l] -=
            cfg.lr * (mw[l] / corr1)
                         .cwiseQuotient(((vw[l] / corr2).cwiseSqrt().array() + cfg.adam_eps)
                                            .matrix());
        model.biases[l] -=
            cfg.lr * (mb[l] / corr1)
                         .cwiseQuotient(((vb[l] / corr2).cwiseSqrt().array() + cfg.adam_eps)
                                            .matrix());
      }
    }

    model.epochs_run = epoch + 1;
    epoch_loss /= double(rows.size());
    if (cfg.patience > 0) {
      if (epoch_loss < best_loss - 1e-12) {
        best_loss = epoch_loss;
        stale_epochs = 0;
      } else if (++stale_epochs >= cfg.patience) {
        break;
      }
    }
  }

  for (const Matrix& w : model.weights) {
    require(w.allFinite(), ErrorCode::DivergedLoss, "mlp: non-finite parameters after training");
  }
  return model;
}

}  // namespace imbal
