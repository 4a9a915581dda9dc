#include "imbal/cvae.hpp"

#include <cmath>
#include <numeric>

#include "imbal/error.hpp"

namespace imbal {
namespace {

constexpr double kLogvarClamp = 15.0;

// Adam over a flat list of parameter blocks.
struct Adam {
  std::vector<Matrix*> params;
  std::vector<Matrix> m, v;
  long t = 0;

  void attach(Matrix& p) {
    params.push_back(&p);
    m.push_back(Matrix::Zero(p.rows(), p.cols()));
    v.push_back(Matrix::Zero(p.rows(), p.cols()));
  }

  void step(const std::vector<Matrix>& grads, double lr) {
    ++t;
    const double c1 = 1.0 - std::pow(0.9, double(t));
    const double c2 = 1.0 - std::pow(0.999, double(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = 0.9 * m[i] + 0.1 * grads[i];
      v[i] = 0.999 * v[i] + 0.001 * grads[i].cwiseProduct(grads[i]);
      *params[i] -= lr * (m[i] / c1).cwiseQuotient(
                             ((v[i] / c2).cwiseSqrt().array() + 1e-8).matrix());
    }
  }
};

Matrix he_init(std::int64_t rows, std::int64_t cols, Rng& rng) {
  Matrix w(rows, cols);
  const double sd = std::sqrt(2.0 / double(rows));
  for (std::int64_t i = 0; i < w.size(); ++i) w.data()[i] = sd * rng.normal();
  return w;
}

// ReLU stack forward, keeping pre-activations for backprop.
Matrix stack_forward(const std::vector<Matrix>& ws, const std::vector<Vector>& bs,
                     const Matrix& input, std::vector<Matrix>& pre) {
  Matrix a = input;
  for (std::size_t l = 0; l < ws.size(); ++l) {
    Matrix z = (a * ws[l]).rowwise() + bs[l].transpose();
    pre.push_back(z);
    a = z.cwiseMax(0.0);
  }
  return a;
}

}  // namespace

Matrix CvaeModel::decode(const Matrix& z, int class_id) const {
  Matrix input(z.rows(), z.cols() + n_classes);
  input.leftCols(z.cols()) = z;
  input.rightCols(n_classes).setZero();
  input.col(z.cols() + class_id).setOnes();

  Matrix a = input;
  for (std::size_t l = 0; l + 1 < dec_w.size(); ++l) {
    a = ((a * dec_w[l]).rowwise() + dec_b[l].transpose()).cwiseMax(0.0);
  }
  return (a * dec_w.back()).rowwise() + dec_b.back().transpose();
}

CvaeModel cvae_fit(const Dataset& ds, const CvaeConfig& cfg, Seed seed) {
  require(cfg.latent_dim >= 1 && cfg.epochs >= 1 && cfg.batch_size >= 1 && cfg.lr > 0.0,
          ErrorCode::InvalidArgument, "cvae: bad configuration");
  require(!cfg.hidden.empty(), ErrorCode::InvalidArgument, "cvae: need at least one hidden layer");

  const int d = int(ds.n_features());
  const int C = ds.n_classes;
  const int L = cfg.latent_dim;

  CvaeModel model;
  model.config = cfg;
  model.scaler = Standardizer::fit(ds.features);
  model.n_features = d;
  model.n_classes = C;
  model.class_counts = ds.class_counts;
  model.min_batch_kl = std::numeric_limits<double>::infinity();

  Rng rng(seed);
  // Encoder stack: (d + C) -> hidden... -> {mu, logvar}.
  int width = d + C;
  for (int h : cfg.hidden) {
    model.enc_w.push_back(he_init(width, h, rng));
    model.enc_b.push_back(Vector::Zero(h));
    width = h;
  }
  model.w_mu = he_init(width, L, rng);
  model.b_mu = Vector::Zero(L);
  model.w_logvar = he_init(width, L, rng);
  model.b_logvar = Vector::Zero(L);
  // Decoder stack: (L + C) -> hidden (reversed)... -> d.
  width = L + C;
  for (auto it = cfg.hidden.rbegin(); it != cfg.hidden.rend(); ++it) {
    model.dec_w.push_back(he_init(width, *it, rng));
    model.dec_b.push_back(Vector::Zero(*it));
    width = *it;
  }
  model.dec_w.push_back(he_init(width, d, rng));
  model.dec_b.push_back(Vector::Zero(d));

  Adam opt;
  for (auto& w : model.enc_w) opt.attach(w);
  opt.attach(model.w_mu);
  opt.attach(model.w_logvar);
  for (auto& w : model.dec_w) opt.attach(w);
  // Biases ride along as 1-column matrices through a second optimizer.
  // Biases carry their own Adam state.
  long bias_t = 0;
  std::vector<Vector*> bias_params;
  for (auto& b : model.enc_b) bias_params.push_back(&b);
  bias_params.push_back(&model.b_mu);
  bias_params.push_back(&model.b_logvar);
  for (auto& b : model.dec_b) bias_params.push_back(&b);
  std::vector<Vector> bm(bias_params.size()), bv(bias_params.size());
  for (std::size_t i = 0; i < bias_params.size(); ++i) {
    bm[i] = Vector::Zero(bias_params[i]->size());
    bv[i] = Vector::Zero(bias_params[i]->size());
  }

  const Matrix x = model.scaler.transform(ds.features);
  Matrix onehot = Matrix::Zero(ds.n_samples(), C);
  for (std::int64_t i = 0; i < ds.n_samples(); ++i) onehot(i, ds.labels[std::size_t(i)]) = 1.0;

  std::vector<int> rows(std::size_t(ds.n_samples()));
  std::iota(rows.begin(), rows.end(), 0);

  const std::size_t n_enc = model.enc_w.size();
  const std::size_t n_dec = model.dec_w.size();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(rows);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < rows.size(); start += std::size_t(cfg.batch_size)) {
      const std::int64_t b =
          std::int64_t(std::min(rows.size() - start, std::size_t(cfg.batch_size)));
      Matrix xb(b, d), yb(b, C);
      for (std::int64_t i = 0; i < b; ++i) {
        xb.row(i) = x.row(rows[start + std::size_t(i)]);
        yb.row(i) = onehot.row(rows[start + std::size_t(i)]);
      }

      // Encoder forward.
      Matrix enc_in(b, d + C);
      enc_in.leftCols(d) = xb;
      enc_in.rightCols(C) = yb;
      std::vector<Matrix> enc_pre;
      const Matrix h_enc = stack_forward(model.enc_w, model.enc_b, enc_in, enc_pre);
      const Matrix mu = (h_enc * model.w_mu).rowwise() + model.b_mu.transpose();
      Matrix logvar = (h_enc * model.w_logvar).rowwise() + model.b_logvar.transpose();
      const Matrix lv_mask = ((logvar.array().abs() < kLogvarClamp).cast<double>()).matrix();
      logvar = logvar.cwiseMax(-kLogvarClamp).cwiseMin(kLogvarClamp);

      // Reparameterization.
      Matrix eps(b, L);
      for (std::int64_t i = 0; i < eps.size(); ++i) eps.data()[i] = rng.normal();
      const Matrix sigma = (0.5 * logvar).array().exp().matrix();
      const Matrix z = mu + sigma.cwiseProduct(eps);

      // Decoder forward.
      Matrix dec_in(b, L + C);
      dec_in.leftCols(L) = z;
      dec_in.rightCols(C) = yb;
      std::vector<Matrix> dec_pre;
      Matrix a = dec_in;
      std::vector<Matrix> dec_act = {a};
      for (std::size_t l = 0; l + 1 < n_dec; ++l) {
        Matrix pz = (a * model.dec_w[l]).rowwise() + model.dec_b[l].transpose();
        dec_pre.push_back(pz);
        a = pz.cwiseMax(0.0);
        dec_act.push_back(a);
      }
      const Matrix xhat = (a * model.dec_w.back()).rowwise() + model.dec_b.back().transpose();

      const double recon = (xhat - xb).squaredNorm() / double(b);
      const double kl =
          0.5 *
          (mu.array().square() + logvar.array().exp() - logvar.array() - 1.0).sum() / double(b);
      const double loss = recon + cfg.beta * kl;
      require(std::isfinite(loss), ErrorCode::DivergedLoss, "cvae: training loss diverged");
      model.min_batch_kl = std::min(model.min_batch_kl, kl);
      epoch_loss += loss * double(b);

      // Backprop: reconstruction into the decoder stack.
      std::vector<Matrix> g_dec_w(n_dec);
      std::vector<Vector> g_dec_b(n_dec);
      Matrix delta = 2.0 * (xhat - xb) / double(b);
      g_dec_w[n_dec - 1] = dec_act.back().transpose() * delta;
      g_dec_b[n_dec - 1] = delta.colwise().sum().transpose();
      for (std::size_t l = n_dec - 1; l-- > 0;) {
        delta = (delta * model.dec_w[l + 1].transpose())
                    .cwiseProduct((dec_pre[l].array() > 0.0).cast<double>().matrix());
        g_dec_w[l] = dec_act[l].transpose() * delta;
        g_dec_b[l] = delta.colwise().sum().transpose();
      }
      const Matrix d_dec_in = delta * model.dec_w[0].transpose();
      const Matrix dz = d_dec_in.leftCols(L);

      // Latent heads: reparameterization plus the KL term.
      const Matrix dmu = dz + cfg.beta * mu / double(b);
      const Matrix dlv_raw =
          (dz.cwiseProduct(sigma.cwiseProduct(eps)) * 0.5 +
           cfg.beta * 0.5 * (logvar.array().exp() - 1.0).matrix() / double(b))
              .cwiseProduct(lv_mask);

      Matrix g_w_mu = h_enc.transpose() * dmu;
      Vector g_b_mu = dmu.colwise().sum().transpose();
      Matrix g_w_lv = h_enc.transpose() * dlv_raw;
      Vector g_b_lv = dlv_raw.colwise().sum().transpose();

      // Into the encoder stack.
      std::vector<Matrix> g_enc_w(n_enc);
      std::vector<Vector> g_enc_b(n_enc);
      Matrix d_h = dmu * model.w_mu.transpose() + dlv_raw * model.w_logvar.transpose();
      for (std::size_t l = n_enc; l-- > 0;) {
        d_h = d_h.cwiseProduct((enc_pre[l].array() > 0.0).cast<double>().matrix());
        const Matrix input = l == 0 ? enc_in : enc_pre[l - 1].cwiseMax(0.0);
        g_enc_w[l] = input.transpose() * d_h;
        g_enc_b[l] = d_h.colwise().sum().transpose();
        if (l > 0) d_h = d_h * model.enc_w[l].transpose();
      }

      // Apply Adam: matrices in attach order, then biases.
      std::vector<Matrix> grads;
      for (auto& g : g_enc_w) grads.push_back(std::move(g));
      grads.push_back(std::move(g_w_mu));
      grads.push_back(std::move(g_w_lv));
      for (auto& g : g_dec_w) grads.push_back(std::move(g));
      opt.step(grads, cfg.lr);

      std::vector<Vector> bias_grads;
      for (auto& g : g_enc_b) bias_grads.push_back(std::move(g));
      bias_grads.push_back(std::move(g_b_mu));
      bias_grads.push_back(std::move(g_b_lv));
      for (auto& g : g_dec_b) bias_grads.push_back(std::move(g));
      ++bias_t;
      const double c1 = 1.0 - std::pow(0.9, double(bias_t));
      const double c2 = 1.0 - std::pow(0.999, double(bias_t));
      for (std::size_t i = 0; i < bias_params.size(); ++i) {
        bm[i] = 0.9 * bm[i] + 0.1 * bias_grads[i];
        bv[i] = 0.999 * bv[i] + 0.001 * bias_grads[i].cwiseProduct(bias_grads[i]);
        *bias_params[i] -= cfg.lr * (bm[i] / c1).cwiseQuotient(
                                        ((bv[i] / c2).cwiseSqrt().array() + 1e-8).matrix());
      }
    }
    model.final_loss = epoch_loss / double(rows.size());
  }

  for (const Matrix& w : model.dec_w) {
    require(w.allFinite(), ErrorCode::DivergedLoss, "cvae: non-finite parameters after training");
  }
  return model;
}

Dataset cvae_sample(const CvaeModel& model, int class_id, std::int64_t n, Seed seed) {
  require(class_id >= 0 && class_id < model.n_classes, ErrorCode::UnknownClass,
          "cvae_sample: class id out of range");
  require(model.class_counts[std::size_t(class_id)] > 0, ErrorCode::UnknownClass,
          "cvae_sample: class absent from training data");
  require(n >= 0, ErrorCode::InvalidArgument, "cvae_sample: negative sample count");

  Dataset out;
  out.n_classes = model.n_classes;
  out.class_counts.assign(std::size_t(model.n_classes), 0);
  out.features.resize(n, model.n_features);
  if (n == 0) return out;

  Rng rng(seed);
  Matrix z(n, model.config.latent_dim);
  for (std::int64_t i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();
  out.features = model.scaler.inverse(model.decode(z, class_id));
  out.labels.assign(std::size_t(n), class_id);
  out.class_counts[std::size_t(class_id)] = n;
  return out;
}

}  // namespace imbal
