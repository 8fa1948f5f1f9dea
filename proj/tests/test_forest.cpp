#include <algorithm>
#include <random>

#include "doctest.h"
#include "motioncred/error.hpp"
#include "motioncred/folds.hpp"
#include "motioncred/forest.hpp"
#include "motioncred/synth.hpp"

using namespace motioncred;

namespace {

struct Toy {
  Eigen::MatrixXd X;
  std::vector<int> y;
};

// Two classes split by the sign of feature 0, |x0| >= 1; other features noise.
Toy separable_toy(int n = 120, int d = 5, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(1.0, 4.0), noise(-3.0, 3.0);
  Toy t;
  t.X.resize(n, d);
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    t.X(i, 0) = label == 0 ? -mag(rng) : mag(rng);
    for (int j = 1; j < d; ++j) t.X(i, j) = noise(rng);
    t.y.push_back(label);
  }
  return t;
}

double accuracy(const DecisionForest& f, const Eigen::MatrixXd& X, const std::vector<int>& y) {
  int ok = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) ok += f.predict(X.row(i).transpose()) == y[static_cast<std::size_t>(i)];
  return static_cast<double>(ok) / static_cast<double>(X.rows());
}

ForestParams small(int trees = 25) {
  ForestParams p;
  p.n_trees = trees;
  return p;
}

}  // namespace

TEST_CASE("separable toy set is learned perfectly") {
  auto t = separable_toy();
  auto f = train_forest(t.X, t.y, small(), 7);
  CHECK(accuracy(f, t.X, t.y) == 1.0);
  CHECK(f.classes() == std::vector<int>{0, 1});

  Eigen::VectorXd deep = Eigen::VectorXd::Zero(5);
  deep[0] = -3.5;
  CHECK(f.predict_proba(deep)[0] > 0.9);
}

TEST_CASE("single leaf Laplace arithmetic") {
  DecisionForest::Tree tree;
  tree.nodes.push_back({-1, 0.0, 0, 0});
  tree.leaf_counts = {3, 1};
  DecisionForest f(ForestParams{}, 0, 2, {10, 20}, {tree});
  auto p = f.predict_proba(Eigen::Vector2d(0.3, 0.1));
  CHECK(p[0] == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
  CHECK(f.predict(Eigen::Vector2d(0, 0)) == 10);
}

TEST_CASE("probabilities are normalized on random inputs") {
  auto data = synth_generate({.n_subjects = 6, .n_windows_per_subject = 15, .feature_dim = 7, .seed = 2});
  Eigen::MatrixXd X(static_cast<Eigen::Index>(data.size()), 7);
  std::vector<int> y;
  for (std::size_t i = 0; i < data.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = data[i].values.transpose();
    y.push_back(data[i].subject);
  }
  auto f = train_forest(X, y, small(30), 3);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-60, 60);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd x(7);
    for (auto& v : x) v = u(rng);
    auto p = f.predict_proba(x);
    CHECK(p.size() == 6);
    CHECK((p.array() >= 0).all());
    CHECK(std::abs(p.sum() - 1.0) <= 1e-9);
  }
}

TEST_CASE("training is deterministic across thread counts") {
  auto t = separable_toy(200, 8, 4);
  auto one = train_forest(t.X, t.y, small(16), 42, 1);
  auto eight = train_forest(t.X, t.y, small(16), 42, 8);
  CHECK(one.to_json() == eight.to_json());
  auto other = train_forest(t.X, t.y, small(16), 43, 1);
  CHECK(one.to_json() != other.to_json());
}

TEST_CASE("separation-8 synthetic data reaches 0.99 held-out accuracy") {
  auto data = synth_generate({.n_subjects = 8, .n_windows_per_subject = 40, .feature_dim = 12,
                              .cluster_separation = 8.0, .seed = 21});
  Eigen::MatrixXd X(static_cast<Eigen::Index>(data.size()), 12);
  std::vector<int> y;
  for (std::size_t i = 0; i < data.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = data[i].values.transpose();
    y.push_back(data[i].subject);
  }
  auto folds = stratified_folds(y, 4, 1);
  auto train = folds.train_indices(0), test = folds.test_indices(0);
  Eigen::MatrixXd Xtr(static_cast<Eigen::Index>(train.size()), 12), Xte(static_cast<Eigen::Index>(test.size()), 12);
  std::vector<int> ytr, yte;
  for (std::size_t i = 0; i < train.size(); ++i) {
    Xtr.row(static_cast<Eigen::Index>(i)) = X.row(train[i]);
    ytr.push_back(y[static_cast<std::size_t>(train[i])]);
  }
  for (std::size_t i = 0; i < test.size(); ++i) {
    Xte.row(static_cast<Eigen::Index>(i)) = X.row(test[i]);
    yte.push_back(y[static_cast<std::size_t>(test[i])]);
  }
  auto f = train_forest(Xtr, ytr, ForestParams{}, 5);
  CHECK(accuracy(f, Xte, yte) >= 0.99);
}

TEST_CASE("unrestricted forest without bootstrap fits its training set") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> lab(0, 4);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd X(150, 6);
    std::vector<int> y;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = g(rng);
      y.push_back(lab(rng));  // labels independent of features
    }
    ForestParams p = small(10);
    p.bootstrap = false;
    auto f = train_forest(X, y, p, static_cast<std::uint64_t>(trial));
    CHECK(accuracy(f, X, y) == 1.0);
  }
}

TEST_CASE("prediction does not depend on tree order") {
  auto t = separable_toy(80, 4, 8);
  auto f = train_forest(t.X, t.y, small(12), 1);
  auto trees = f.trees();
  std::reverse(trees.begin(), trees.end());
  DecisionForest reversed(f.params(), f.master_seed(), f.n_features(), f.classes(), trees);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 3);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd x(4);
    for (auto& v : x) v = g(rng);
    CHECK((f.predict_proba(x) - reversed.predict_proba(x)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("more trees keep dimension and normalization") {
  auto t = separable_toy(60, 3, 2);
  for (int n : {1, 5, 40}) {
    auto f = train_forest(t.X, t.y, small(n), 3);
    auto p = f.predict_proba(t.X.row(0).transpose());
    CHECK(p.size() == 2);
    CHECK(std::abs(p.sum() - 1.0) <= 1e-9);
  }
}

TEST_CASE("training and prediction errors") {
  auto t = separable_toy(20, 3);
  std::vector<int> one_class(20, 4);
  CHECK_THROWS_AS(train_forest(t.X, one_class, small(), 1), TrainingError);
  std::vector<int> short_labels(t.y.begin(), t.y.end() - 1);
  CHECK_THROWS_AS(train_forest(t.X, short_labels, small(), 1), ShapeError);
  auto f = train_forest(t.X, t.y, small(3), 1);
  CHECK_THROWS_AS(f.predict_proba(Eigen::VectorXd::Zero(4)), ShapeError);
  ForestParams bad;
  bad.n_trees = 0;
  CHECK_THROWS_AS(train_forest(t.X, t.y, bad, 1), ConfigurationError);
}

TEST_CASE("trained forests satisfy the structural invariants") {
  auto t = separable_toy(90, 6, 3);
  auto f = train_forest(t.X, t.y, small(10), 9);
  for (const auto& tree : f.trees()) {
    const auto k = f.classes().size();
    for (std::size_t leaf = 0; leaf < tree.leaf_counts.size() / k; ++leaf) {
      std::uint64_t sum = 0;
      for (std::size_t c = 0; c < k; ++c) sum += tree.leaf_counts[leaf * k + c];
      CHECK(sum > 0);
    }
    for (const auto& n : tree.nodes) CHECK(n.feature < f.n_features());
  }
}

TEST_CASE("save/load preserves predictions bit for bit") {
  auto data = synth_generate({.n_subjects = 4, .n_windows_per_subject = 12, .feature_dim = 5, .seed = 8});
  Eigen::MatrixXd X(static_cast<Eigen::Index>(data.size()), 5);
  std::vector<int> y;
  for (std::size_t i = 0; i < data.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = data[i].values.transpose();
    y.push_back(data[i].subject);
  }
  auto f = train_forest(X, y, small(20), 77);
  auto back = DecisionForest::from_json(f.to_json());
  CHECK(back.to_json() == f.to_json());
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0, 20);
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd x(5);
    for (auto& v : x) v = g(rng);
    auto a = f.predict_proba(x), b = back.predict_proba(x);
    for (Eigen::Index c = 0; c < a.size(); ++c) CHECK(a[c] == b[c]);
  }
  CHECK_THROWS_AS(DecisionForest::from_json("{\"kind\":\"motioncred.forest\",\"schema_version\":99}"),
                  PersistenceError);
  CHECK_THROWS_AS(DecisionForest::from_json("not json"), PersistenceError);
}
