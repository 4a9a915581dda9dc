#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "imbal/forest.hpp"
#include "imbal/kmeans.hpp"
#include "imbal/logistic.hpp"
#include "imbal/metrics.hpp"
#include "imbal/mlp.hpp"
#include "imbal/neighbors.hpp"
#include "imbal/tree.hpp"

using namespace imbal;
using imbal::testing::make_blobs;
using imbal::testing::make_dataset;

namespace {

double accuracy_of(const Model& model, const Dataset& ds) {
  const auto pred = model.predict(ds.features);
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == ds.labels[i];
  return double(hits) / double(ds.n_samples());
}

bool same_structure(const TreeModel& a, const TreeModel& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    if (a.nodes[i].feature != b.nodes[i].feature) return false;
    if (a.nodes[i].threshold != b.nodes[i].threshold) return false;
    if (a.nodes[i].left != b.nodes[i].left || a.nodes[i].right != b.nodes[i].right) return false;
  }
  return true;
}

// Exhaustive weighted-Gini search over every (feature, midpoint) pair.
double brute_force_best_child_gini(const Dataset& ds, const std::vector<double>& w) {
  double best = std::numeric_limits<double>::infinity();
  for (int f = 0; f < int(ds.n_features()); ++f) {
    std::vector<double> values;
    for (std::int64_t i = 0; i < ds.n_samples(); ++i) values.push_back(ds.features(i, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t v = 0; v + 1 < values.size(); ++v) {
      const double thr = (values[v] + values[v + 1]) / 2.0;
      Vector lm = Vector::Zero(ds.n_classes), rm = Vector::Zero(ds.n_classes);
      for (std::int64_t i = 0; i < ds.n_samples(); ++i) {
        (ds.features(i, f) <= thr ? lm : rm)[ds.labels[std::size_t(i)]] += w[std::size_t(i)];
      }
      const double lt = lm.sum(), rt = rm.sum();
      if (lt == 0.0 || rt == 0.0) continue;
      const double gini = (lt * (1.0 - lm.squaredNorm() / (lt * lt)) +
                           rt * (1.0 - rm.squaredNorm() / (rt * rt))) /
                          (lt + rt);
      best = std::min(best, gini);
    }
  }
  return best;
}

double node_child_gini(const Dataset& ds, const std::vector<double>& w, const TreeModel& tree) {
  const TreeNode& root = tree.nodes[0];
  REQUIRE(root.feature >= 0);
  Vector lm = Vector::Zero(ds.n_classes), rm = Vector::Zero(ds.n_classes);
  for (std::int64_t i = 0; i < ds.n_samples(); ++i) {
    (ds.features(i, root.feature) <= root.threshold ? lm : rm)[ds.labels[std::size_t(i)]] +=
        w[std::size_t(i)];
  }
  const double lt = lm.sum(), rt = rm.sum();
  return (lt * (1.0 - lm.squaredNorm() / (lt * lt)) + rt * (1.0 - rm.squaredNorm() / (rt * rt))) /
         (lt + rt);
}

}  // namespace

TEST_CASE("train_tree pure input yields a single certain leaf") {
  auto ds = make_dataset({{0.0, 1.0}, {2.0, 3.0}, {4.0, 5.0}}, {1, 1, 1}, 2);
  auto tree = train_tree(ds, nullptr);
  CHECK(tree.nodes.size() == 1);
  CHECK(tree.nodes[0].feature == -1);
  CHECK(tree.nodes[0].proba[1] == doctest::Approx(1.0));
  CHECK(tree.nodes[0].proba[0] == doctest::Approx(0.0));
}

TEST_CASE("train_tree separates 1-D linearly separable classes perfectly") {
  auto ds = make_dataset({{0.1}, {0.4}, {0.9}, {3.1}, {3.5}, {4.0}}, {0, 0, 0, 1, 1, 1});
  auto tree = train_tree(ds, nullptr);
  CHECK(accuracy_of(tree, ds) == doctest::Approx(1.0));
  CHECK(tree.n_leaves() == 2);
}

TEST_CASE("train_tree root split matches the exhaustive Gini oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 12 + int(rng.uniform_index(20));
    Matrix f(n, 2);
    std::vector<int> labels;
    std::vector<double> w;
    for (int i = 0; i < n; ++i) {
      f(i, 0) = rng.normal();
      f(i, 1) = rng.normal();
      labels.push_back(int(rng.uniform_index(3)));
      w.push_back(rng.uniform(0.1, 2.0));
    }
    // Guarantee at least two classes so a split exists.
    labels[0] = 0;
    labels[1] = 1;
    auto ds = Dataset::create(f, labels, 3);
    TreeConfig cfg;
    cfg.max_depth = 1;
    auto tree = train_tree(ds, &w, cfg);
    if (tree.nodes[0].feature < 0) continue;  // no impurity-reducing split existed
    CHECK(node_child_gini(ds, w, tree) ==
          doctest::Approx(brute_force_best_child_gini(ds, w)).epsilon(1e-9));
  }
}

TEST_CASE("train_tree structure is invariant to uniform weight scaling") {
  auto ds = make_blobs({{0, 0}, {2, 1}, {1, 3}}, {40, 25, 15}, 1.2, 9);
  std::vector<double> w;
  Rng rng(10);
  for (std::int64_t i = 0; i < ds.n_samples(); ++i) w.push_back(rng.uniform(0.25, 4.0));
  std::vector<double> doubled = w;
  for (double& x : doubled) x *= 2.0;

  auto a = train_tree(ds, &w);
  auto b = train_tree(ds, &doubled);
  CHECK(same_structure(a, b));
}

TEST_CASE("train_tree honors depth and leaf-size limits") {
  auto ds = make_blobs({{0, 0}, {1.5, 1.5}}, {60, 60}, 1.0, 4);
  TreeConfig cfg;
  cfg.max_depth = 3;
  cfg.min_samples_leaf = 10;
  auto tree = train_tree(ds, nullptr, cfg);
  CHECK(tree.depth() <= 3);

  // Every training row must land in a leaf that held >= 10 training rows.
  std::vector<int> leaf_counts(tree.nodes.size(), 0);
  for (std::int64_t i = 0; i < ds.n_samples(); ++i) {
    leaf_counts[std::size_t(tree.leaf_for(ds.features.row(i)))]++;
  }
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    if (tree.nodes[id].feature < 0) CHECK(leaf_counts[id] >= 10);
  }

  CHECK_THROWS_AS(train_tree(ds, nullptr, TreeConfig{.max_depth = -1, .min_samples_leaf = 0}),
                  ImbError);
}

TEST_CASE("train_forest single unbootstrapped tree equals train_tree") {
  auto ds = make_blobs({{0, 0}, {3, 3}}, {30, 30}, 1.0, 6);
  ForestConfig cfg;
  cfg.n_estimators = 1;
  cfg.bootstrap = false;
  cfg.max_features = 0;
  auto forest = train_forest(ds, cfg, Seed{5});
  auto tree = train_tree(ds, nullptr);
  CHECK(same_structure(forest.trees[0], tree));
  CHECK(forest.predict_proba(ds.features) == tree.predict_proba(ds.features));
}

TEST_CASE("train_forest nails well-separated blobs across seeds") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto train = make_blobs({{0, 0}, {10, 10}}, {40, 20}, 1.0, seed + 100);
    auto test = make_blobs({{0, 0}, {10, 10}}, {25, 25}, 1.0, seed + 900);
    ForestConfig cfg;
    cfg.n_estimators = 20;
    auto forest = train_forest(train, cfg, Seed{seed});
    CHECK(accuracy_of(forest, test) == doctest::Approx(1.0));
  }
}

TEST_CASE("train_forest is deterministic and averages member trees exactly") {
  auto ds = make_blobs({{0, 0}, {2, 2}}, {35, 18}, 1.3, 12);
  ForestConfig cfg;
  cfg.n_estimators = 7;
  auto a = train_forest(ds, cfg, Seed{42});
  auto b = train_forest(ds, cfg, Seed{42});
  REQUIRE(a.trees.size() == b.trees.size());
  for (std::size_t t = 0; t < a.trees.size(); ++t) CHECK(same_structure(a.trees[t], b.trees[t]));

  Matrix mean = Matrix::Zero(ds.n_samples(), ds.n_classes);
  for (const auto& tree : a.trees) mean += tree.predict_proba(ds.features);
  mean /= double(a.trees.size());
  CHECK(a.predict_proba(ds.features) == mean);
}

TEST_CASE("train_forest balanced mode trains on class-balanced bootstraps") {
  auto ds = make_blobs({{0, 0}, {6, 6}}, {200, 12}, 1.0, 21);
  ForestConfig cfg;
  cfg.n_estimators = 15;
  cfg.balanced = true;
  auto forest = train_forest(ds, cfg, Seed{3});
  // Minority leaf mass: with balanced draws the root prior is ~uniform, so the
  // minority class should receive substantial probability mass on its blob.
  auto minority_test = make_blobs({{6, 6}}, {30}, 1.0, 77);
  Matrix proba = forest.predict_proba(minority_test.features);
  CHECK(proba.col(1).mean() > 0.8);
}

TEST_CASE("knn_neighbors matches inspection on tiny configurations") {
  Matrix pts(3, 2);
  pts << 0, 0, 1, 0, 5, 0;
  Eigen::RowVectorXd q(2);
  q << 0.9, 0.0;
  CHECK(knn_neighbors(pts, {}, q, 1) == std::vector<int>{1});
  CHECK(knn_neighbors(pts, {}, q, 3) == std::vector<int>{1, 0, 2});
  CHECK_THROWS_AS(knn_neighbors(pts, {}, q, 4), ImbError);

  // Restriction and self-exclusion.
  std::vector<int> labels = {0, 1, 1};
  CHECK(knn_neighbors(pts, labels, q, 1, 0) == std::vector<int>{0});
  CHECK(knn_neighbors(pts, labels, pts.row(1), 1, -1, 1) == std::vector<int>{0});

  // Equidistant points: tie resolved toward the lower index.
  Matrix sym(2, 1);
  sym << -1.0, 1.0;
  Eigen::RowVectorXd origin(1);
  origin << 0.0;
  CHECK(knn_neighbors(sym, {}, origin, 1) == std::vector<int>{0});
}

TEST_CASE("knn_neighbors agrees with a brute-force oracle on random clouds") {
  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 50;
    Matrix pts(n, 3);
    for (std::int64_t i = 0; i < pts.size(); ++i) pts.data()[i] = rng.normal();
    Eigen::RowVectorXd q(3);
    for (int j = 0; j < 3; ++j) q[j] = rng.normal();
    const int k = 1 + int(rng.uniform_index(10));

    auto got = knn_neighbors(pts, {}, q, k);
    std::vector<std::pair<double, int>> all;
    for (int i = 0; i < n; ++i) all.emplace_back((pts.row(i) - q).squaredNorm(), i);
    std::sort(all.begin(), all.end());
    for (int i = 0; i < k; ++i) CHECK(got[std::size_t(i)] == all[std::size_t(i)].second);
  }
}

TEST_CASE("kmeans_fit closed forms and blob recovery") {
  auto blob = make_blobs({{1, 2}}, {40}, 1.0, 8);
  auto one = kmeans_fit(blob.features, 1, Seed{2});
  CHECK(one.centroids.row(0)(0) == doctest::Approx(blob.features.col(0).mean()));
  CHECK(one.centroids.row(0)(1) == doctest::Approx(blob.features.col(1).mean()));

  auto two = make_blobs({{0, 0}, {10, 10}}, {50, 50}, 0.8, 8);
  auto model = kmeans_fit(two.features, 2, Seed{3});
  std::vector<double> d0 = {model.centroids.row(0).norm(),
                            (model.centroids.row(0) - Eigen::RowVector2d(10, 10)).norm()};
  std::vector<double> d1 = {model.centroids.row(1).norm(),
                            (model.centroids.row(1) - Eigen::RowVector2d(10, 10)).norm()};
  CHECK(std::min(d0[0], d0[1]) < 0.5);
  CHECK(std::min(d1[0], d1[1]) < 0.5);
  CHECK(std::abs((d0[0] < d0[1]) - (d1[0] < d1[1])) == 1);  // different blobs

  CHECK_THROWS_AS(kmeans_fit(two.features, 101, Seed{1}), ImbError);
}

TEST_CASE("kmeans_fit inertia is non-increasing and the assignment is a fixed point") {
  Rng rng(91);
  Matrix pts(120, 2);
  for (std::int64_t i = 0; i < pts.size(); ++i) pts.data()[i] = rng.uniform(-5.0, 5.0);
  auto model = kmeans_fit(pts, 5, Seed{17});
  for (std::size_t i = 1; i < model.inertia_history.size(); ++i) {
    CHECK(model.inertia_history[i] <= model.inertia_history[i - 1] + 1e-9);
  }
  // Re-running a single assignment over the final centroids changes nothing.
  auto again = kmeans_fit(pts, 5, Seed{17});
  CHECK(again.assignments == model.assignments);
  CHECK(model.inertia == doctest::Approx(model.inertia_history.back()));

  // k = n drives inertia to zero.
  Matrix small = pts.topRows(6);
  CHECK(kmeans_fit(small, 6, Seed{1}).inertia == doctest::Approx(0.0));
}

TEST_CASE("focal_loss hand-evaluated values") {
  Matrix onehot(1, 2), probs(1, 2);
  onehot << 0, 1;
  probs << 0.1, 0.9;
  CHECK(focal_loss(onehot, probs, 2.0, Vector()) == doctest::Approx(0.0010536).epsilon(1e-4));
  CHECK(focal_loss(onehot, probs, 0.0, Vector()) == doctest::Approx(0.10536).epsilon(1e-4));
  Vector alpha(2);
  alpha << 1.0, 0.25;
  CHECK(focal_loss(onehot, probs, 2.0, alpha) == doctest::Approx(0.0002634).epsilon(1e-4));

  Matrix bad = probs;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((void)focal_loss(onehot, bad, 2.0, Vector()), ImbError);
}

TEST_CASE("focal_loss decreases strictly as the true-class probability rises") {
  Matrix onehot(1, 2);
  onehot << 0, 1;
  double prev = std::numeric_limits<double>::infinity();
  for (double p = 0.05; p < 1.0; p += 0.05) {
    Matrix probs(1, 2);
    probs << 1.0 - p, p;
    const double loss = focal_loss(onehot, probs, 2.0, Vector());
    CHECK(loss < prev);
    prev = loss;
  }
}

TEST_CASE("loss_and_grad focal with gamma 0 equals cross-entropy exactly") {
  Rng rng(63);
  Matrix logits(6, 3);
  for (std::int64_t i = 0; i < logits.size(); ++i) logits.data()[i] = rng.normal();
  std::vector<int> labels = {0, 1, 2, 0, 1, 2};

  LossSpec ce;
  LossSpec focal0{LossKind::focal, 0.0, Vector()};
  Matrix g1, g2;
  const double l1 = loss_and_grad(ce, logits, labels, g1);
  const double l2 = loss_and_grad(focal0, logits, labels, g2);
  CHECK(l1 == doctest::Approx(l2).epsilon(1e-12));
  CHECK((g1 - g2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mlp analytic gradients match central finite differences for every loss kind") {
  auto ds = make_blobs({{0, 0}, {2, 1}, {0, 2}}, {2, 2, 1}, 1.0, 361);
  MlpConfig cfg;
  cfg.layers = {2, 6, 4, 3};
  cfg.epochs = 1;
  Vector alpha(3);
  alpha << 0.5, 2.0, 1.0;

  const std::vector<LossSpec> specs = {
      {LossKind::cross_entropy, 0.0, Vector()},
      {LossKind::weighted_ce, 0.0, alpha},
      {LossKind::focal, 2.0, Vector()},
      {LossKind::weighted_focal, 2.0, alpha},
  };

  for (const auto& spec : specs) {
    auto model = train_mlp(ds, cfg, spec, Seed{7});
    std::vector<Matrix> gw;
    std::vector<Vector> gb;
    model.compute_gradients(ds.features, ds.labels, spec, gw, gb);

    const double h = 1e-5;
    double max_rel = 0.0;
    auto check_param = [&](double& p, double analytic) {
      const double saved = p;
      p = saved + h;
      const double up = model.compute_loss(ds.features, ds.labels, spec);
      p = saved - h;
      const double down = model.compute_loss(ds.features, ds.labels, spec);
      p = saved;
      const double fd = (up - down) / (2.0 * h);
      const double rel = std::abs(fd - analytic) /
                         std::max({std::abs(fd), std::abs(analytic), 1e-5});
      max_rel = std::max(max_rel, rel);
    };
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      for (std::int64_t i = 0; i < model.weights[l].size(); ++i) {
        check_param(model.weights[l].data()[i], gw[l].data()[i]);
      }
      for (std::int64_t i = 0; i < model.biases[l].size(); ++i) {
        check_param(model.biases[l].data()[i], gb[l].data()[i]);
      }
    }
    CHECK(max_rel < 1e-4);
  }
}

TEST_CASE("train_mlp learns separable data and is bit-deterministic") {
  auto ds = make_blobs({{-2, -2}, {2, 2}}, {30, 30}, 0.5, 44);
  MlpConfig cfg;
  cfg.layers = {2, 20, 10, 2};
  cfg.lr = 1e-3;  // faster march for the tiny smoke problem
  auto model = train_mlp(ds, cfg, LossSpec{}, Seed{11});
  CHECK(accuracy_of(model, ds) == doctest::Approx(1.0));

  cfg.lr = 1e-4;
  cfg.epochs = 12;
  cfg.patience = 0;
  auto a = train_mlp(ds, cfg, LossSpec{}, Seed{19});
  auto b = train_mlp(ds, cfg, LossSpec{}, Seed{19});
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    CHECK(a.weights[l] == b.weights[l]);
    CHECK(a.biases[l] == b.biases[l]);
  }

  Matrix proba = a.predict_proba(ds.features);
  for (std::int64_t i = 0; i < proba.rows(); ++i) {
    CHECK(proba.row(i).sum() == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("train_mlp epoch sampler replaces each epoch's rows") {
  auto ds = make_blobs({{-2, -2}, {2, 2}}, {20, 20}, 0.5, 45);
  MlpConfig cfg;
  cfg.layers = {2, 6, 4, 2};
  cfg.epochs = 3;
  cfg.patience = 0;
  std::vector<int> epochs_seen;
  auto sampler = [&](int epoch, Rng& rng) {
    epochs_seen.push_back(epoch);
    std::vector<int> rows;
    for (int i = 0; i < 10; ++i) rows.push_back(int(rng.uniform_index(40)));
    return rows;
  };
  auto model = train_mlp(ds, cfg, LossSpec{}, Seed{1}, sampler);
  CHECK(epochs_seen == std::vector<int>{0, 1, 2});
  CHECK(model.epochs_run == 3);

  auto bad = [](int, Rng&) { return std::vector<int>{}; };
  CHECK_THROWS_AS(train_mlp(ds, cfg, LossSpec{}, Seed{1}, bad), ImbError);
}

TEST_CASE("train_mlp rejects shape mismatches") {
  auto ds = make_blobs({{0, 0}, {1, 1}}, {5, 5}, 1.0, 4);
  MlpConfig cfg;
  cfg.layers = {3, 4, 2};
  CHECK_THROWS_AS(train_mlp(ds, cfg, LossSpec{}, Seed{1}), ImbError);
  cfg.layers = {2, 4, 5};
  CHECK_THROWS_AS(train_mlp(ds, cfg, LossSpec{}, Seed{1}), ImbError);
}

TEST_CASE("train_logistic separates 1-D data and regularizes toward uniform") {
  Matrix f(8, 1);
  f << -4, -3, -2.5, -2, 2, 2.5, 3, 4;
  std::vector<int> labels = {0, 0, 0, 0, 1, 1, 1, 1};
  LogisticConfig cfg;
  cfg.lr = 0.5;
  cfg.iterations = 400;
  cfg.l2 = 0.0;
  auto model = train_logistic(f, labels, cfg);
  const auto pred = model.predict(f);
  CHECK(pred == labels);

  LogisticConfig heavy;
  heavy.l2 = 1000.0;
  heavy.lr = 1e-4;
  heavy.iterations = 2000;
  auto flat = train_logistic(f, labels, heavy);
  Matrix proba = flat.predict_proba(f);
  CHECK(proba.cwiseAbs().maxCoeff() < 0.51);
  CHECK(proba.cwiseAbs().minCoeff() > 0.49);

  CHECK_THROWS_AS(train_logistic(f, std::vector<int>(8, 0), cfg), ImbError);
}

TEST_CASE("train_logistic loss is non-increasing under a small step") {
  auto ds = make_blobs({{0, 0}, {1.5, 1}, {3, 0}}, {15, 15, 15}, 1.0, 29);
  LogisticConfig cfg;
  cfg.lr = 0.01;
  cfg.iterations = 300;
  auto model = train_logistic(ds.features, ds.labels, cfg);
  for (std::size_t i = 1; i < model.loss_history.size(); ++i) {
    CHECK(model.loss_history[i] <= model.loss_history[i - 1] + 1e-12);
  }
}

TEST_CASE("predict breaks probability ties toward the lower class id") {
  TreeModel stub;
  stub.n_features_in = 1;
  stub.n_classes_ = 3;
  TreeNode leaf;
  leaf.proba = Vector::Zero(3);
  leaf.proba << 0.4, 0.2, 0.4;
  stub.nodes.push_back(leaf);
  Matrix f(1, 1);
  f << 0.0;
  CHECK(stub.predict(f) == std::vector<int>{0});
}
