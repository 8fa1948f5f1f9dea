#include "motioncred/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "motioncred/error.hpp"
#include "motioncred/parallel.hpp"
#include "motioncred/random.hpp"

namespace motioncred {

void ForestParams::validate() const {
  if (n_trees < 1) throw ConfigurationError("forest needs at least one tree");
  if (max_depth < 0) throw ConfigurationError("max_depth must be >= 0 (0 = unlimited)");
  if (min_leaf < 1) throw ConfigurationError("min_leaf must be >= 1");
  if (features_per_split < 0) throw ConfigurationError("features_per_split must be >= 0");
  if (!(laplace_alpha > 0)) throw ConfigurationError("laplace_alpha must be positive");
}

namespace {

class TreeBuilder {
public:
  TreeBuilder(const Eigen::MatrixXd& X, const std::vector<int>& y, int n_classes,
              const ForestParams& params, int mtry, Rng rng)
      : X_(X), y_(y), k_(n_classes), params_(params), mtry_(mtry), rng_(std::move(rng)) {}

  DecisionForest::Tree build() {
    const auto n = static_cast<std::size_t>(X_.rows());
    std::vector<Eigen::Index> sample(n);
    if (params_.bootstrap) {
      for (auto& s : sample) s = static_cast<Eigen::Index>(uniform_index(rng_, n));
    } else {
      std::iota(sample.begin(), sample.end(), Eigen::Index{0});
    }
    tree_.nodes.emplace_back();
    grow(0, std::move(sample), 1);
    return std::move(tree_);
  }

private:
  struct Split {
    int feature = -1;
    double threshold = 0;
    double impurity = 0;
  };

  void make_leaf(std::size_t node, const std::vector<Eigen::Index>& sample) {
    const auto leaf = tree_.leaf_counts.size() / static_cast<std::size_t>(k_);
    tree_.leaf_counts.resize(tree_.leaf_counts.size() + static_cast<std::size_t>(k_), 0);
    for (auto i : sample) ++tree_.leaf_counts[leaf * static_cast<std::size_t>(k_) + static_cast<std::size_t>(y_[static_cast<std::size_t>(i)])];
    tree_.nodes[node] = {-1, 0.0, static_cast<int>(leaf), 0};
  }

  static double weighted_gini(const std::vector<double>& counts, double n) {
    if (n <= 0) return 0.0;
    double sq = 0;
    for (double c : counts) sq += c * c;
    return n - sq / n;
  }

  Split best_split(const std::vector<Eigen::Index>& sample) {
    const auto d = static_cast<std::size_t>(X_.cols());
    std::vector<int> features(d);
    std::iota(features.begin(), features.end(), 0);
    shuffle(features, rng_);

    Split best;
    best.impurity = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, int>> column(sample.size());
    std::vector<double> left(static_cast<std::size_t>(k_)), right(static_cast<std::size_t>(k_));
    const auto n = sample.size();
    const auto min_leaf = static_cast<std::size_t>(params_.min_leaf);

    int evaluated = 0;
    for (int f : features) {
      if (evaluated >= mtry_) break;
      for (std::size_t i = 0; i < n; ++i)
        column[i] = {X_(sample[i], f), y_[static_cast<std::size_t>(sample[i])]};
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;  // constant here
      ++evaluated;

      std::fill(left.begin(), left.end(), 0.0);
      std::fill(right.begin(), right.end(), 0.0);
      for (const auto& [v, c] : column) right[static_cast<std::size_t>(c)] += 1.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto c = static_cast<std::size_t>(column[i].second);
        left[c] += 1.0;
        right[c] -= 1.0;
        const std::size_t nl = i + 1, nr = n - nl;
        if (column[i].first == column[i + 1].first) continue;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double impurity = weighted_gini(left, static_cast<double>(nl)) +
                                weighted_gini(right, static_cast<double>(nr));
        if (impurity < best.impurity) {
          const double a = column[i].first, b = column[i + 1].first;
          double t = a + (b - a) / 2.0;
          if (!(t < b)) t = a;
          best = {f, t, impurity};
        }
      }
    }
    return best;
  }

  void grow(std::size_t node, std::vector<Eigen::Index> sample, int depth) {
    bool pure = true;
    for (auto i : sample) pure = pure && y_[static_cast<std::size_t>(i)] == y_[static_cast<std::size_t>(sample.front())];
    const bool depth_limited = params_.max_depth > 0 && depth > params_.max_depth;
    if (pure || depth_limited || sample.size() < 2 * static_cast<std::size_t>(params_.min_leaf)) {
      make_leaf(node, sample);
      return;
    }
    const Split split = best_split(sample);
    if (split.feature < 0) {
      make_leaf(node, sample);
      return;
    }
    std::vector<Eigen::Index> lo, hi;
    for (auto i : sample) (X_(i, split.feature) <= split.threshold ? lo : hi).push_back(i);
    sample.clear();
    sample.shrink_to_fit();

    const auto l = tree_.nodes.size();
    tree_.nodes.emplace_back();
    const auto r = tree_.nodes.size();
    tree_.nodes.emplace_back();
    tree_.nodes[node] = {split.feature, split.threshold, static_cast<int>(l), static_cast<int>(r)};
    grow(l, std::move(lo), depth + 1);
    grow(r, std::move(hi), depth + 1);
  }

  const Eigen::MatrixXd& X_;
  const std::vector<int>& y_;
  int k_;
  const ForestParams& params_;
  int mtry_;
  Rng rng_;
  DecisionForest::Tree tree_;
};

}  // namespace

DecisionForest train_forest(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                            const ForestParams& params, std::uint64_t seed, int threads) {
  params.validate();
  if (X.rows() != static_cast<Eigen::Index>(labels.size()))
    throw ShapeError("sample matrix has " + std::to_string(X.rows()) + " rows but " +
                     std::to_string(labels.size()) + " labels");
  if (X.cols() < 1) throw ShapeError("training data has zero features");
  if (!X.allFinite()) throw ShapeError("training data contains non-finite values");

  std::vector<int> classes(labels);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw TrainingError("training data must contain at least two classes");

  std::vector<int> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    y[i] = static_cast<int>(std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin());

  const int d = static_cast<int>(X.cols());
  int mtry = params.features_per_split > 0
                 ? std::min(params.features_per_split, d)
                 : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
  mtry = std::max(mtry, 1);

  std::vector<DecisionForest::Tree> trees(static_cast<std::size_t>(params.n_trees));
  const int k = static_cast<int>(classes.size());
  auto build = [&](std::size_t t) {
    TreeBuilder builder(X, y, k, params, mtry, derive_rng(seed, {t}));
    trees[t] = builder.build();
  };

  parallel_for(trees.size(), threads, build);
  return DecisionForest(params, seed, d, std::move(classes), std::move(trees));
}

DecisionForest::DecisionForest(ForestParams params, std::uint64_t master_seed, int n_features,
                               std::vector<int> classes, std::vector<Tree> trees)
    : params_(params),
      master_seed_(master_seed),
      n_features_(n_features),
      classes_(std::move(classes)),
      trees_(std::move(trees)) {
  validate();
}

void DecisionForest::validate() const {
  if (classes_.size() < 2) throw PersistenceError("forest needs at least two classes");
  if (trees_.empty()) throw PersistenceError("forest has no trees");
  const auto k = classes_.size();
  for (const auto& tree : trees_) {
    if (tree.nodes.empty() || tree.leaf_counts.size() % k != 0)
      throw PersistenceError("malformed tree");
    const auto n_leaves = tree.leaf_counts.size() / k;
    for (std::size_t leaf = 0; leaf < n_leaves; ++leaf) {
      std::uint64_t sum = 0;
      for (std::size_t c = 0; c < k; ++c) sum += tree.leaf_counts[leaf * k + c];
      if (sum == 0) throw PersistenceError("leaf with empty class counts");
    }
    const auto n_nodes = static_cast<int>(tree.nodes.size());
    for (const auto& node : tree.nodes) {
      if (node.feature < 0) {
        if (node.left < 0 || static_cast<std::size_t>(node.left) >= n_leaves)
          throw PersistenceError("leaf index out of range");
      } else if (node.feature >= n_features_ || node.left <= 0 || node.right <= 0 ||
                 node.left >= n_nodes || node.right >= n_nodes) {
        throw PersistenceError("internal node references out of range");
      }
    }
  }
}

Eigen::Index DecisionForest::class_index(int label) const {
  auto it = std::lower_bound(classes_.begin(), classes_.end(), label);
  if (it == classes_.end() || *it != label) return -1;
  return it - classes_.begin();
}

ProbabilityVector DecisionForest::predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != n_features_)
    throw ShapeError("input has " + std::to_string(x.size()) + " features, forest expects " +
                     std::to_string(n_features_));
  const auto k = static_cast<std::size_t>(classes_.size());
  const double alpha = params_.laplace_alpha;
  ProbabilityVector p = ProbabilityVector::Zero(static_cast<Eigen::Index>(k));
  for (const auto& tree : trees_) {
    const Node* node = &tree.nodes[0];
    while (node->feature >= 0)
      node = &tree.nodes[static_cast<std::size_t>(x[node->feature] <= node->threshold ? node->left : node->right)];
    const auto* counts = &tree.leaf_counts[static_cast<std::size_t>(node->left) * k];
    double total = 0;
    for (std::size_t c = 0; c < k; ++c) total += counts[c];
    const double denom = total + alpha * static_cast<double>(k);
    for (std::size_t c = 0; c < k; ++c)
      p[static_cast<Eigen::Index>(c)] += (counts[c] + alpha) / denom;
  }
  return p / static_cast<double>(trees_.size());
}

Eigen::MatrixXd DecisionForest::predict_proba_rows(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd out(X.rows(), n_classes());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out.row(i) = predict_proba(X.row(i).transpose()).transpose();
  return out;
}

int DecisionForest::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return classes_[static_cast<std::size_t>(argmax(predict_proba(x)))];
}

std::string DecisionForest::to_json() const {
  using nlohmann::json;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "motioncred.forest";
  doc["params"] = {{"n_trees", params_.n_trees},
                   {"max_depth", params_.max_depth},
                   {"min_leaf", params_.min_leaf},
                   {"features_per_split", params_.features_per_split},
                   {"bootstrap", params_.bootstrap},
                   {"laplace_alpha", params_.laplace_alpha}};
  doc["master_seed"] = master_seed_;
  doc["n_features"] = n_features_;
  doc["classes"] = classes_;
  json trees = json::array();
  for (const auto& tree : trees_) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
      if (n.feature < 0)
        nodes.push_back(json::array({-1, n.left}));
      else
        nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right}));
    }
    trees.push_back({{"nodes", std::move(nodes)}, {"leaf_counts", tree.leaf_counts}});
  }
  doc["trees"] = std::move(trees);
  return doc.dump();
}

DecisionForest DecisionForest::from_json(const std::string& text) {
  using nlohmann::json;
  try {
    const json doc = json::parse(text);
    if (doc.at("kind").get<std::string>() != "motioncred.forest")
      throw PersistenceError("document is not a forest");
    const int version = doc.at("schema_version").get<int>();
    if (version != kSchemaVersion)
      throw PersistenceError("unsupported forest schema version " + std::to_string(version));
    ForestParams p;
    const auto& jp = doc.at("params");
    p.n_trees = jp.at("n_trees").get<int>();
    p.max_depth = jp.at("max_depth").get<int>();
    p.min_leaf = jp.at("min_leaf").get<int>();
    p.features_per_split = jp.at("features_per_split").get<int>();
    p.bootstrap = jp.at("bootstrap").get<bool>();
    p.laplace_alpha = jp.at("laplace_alpha").get<double>();

    std::vector<Tree> trees;
    for (const auto& jt : doc.at("trees")) {
      Tree t;
      for (const auto& jn : jt.at("nodes")) {
        Node n;
        n.feature = jn.at(0).get<int>();
        if (n.feature < 0) {
          n.left = jn.at(1).get<int>();
        } else {
          n.threshold = jn.at(1).get<double>();
          n.left = jn.at(2).get<int>();
          n.right = jn.at(3).get<int>();
        }
        t.nodes.push_back(n);
      }
      t.leaf_counts = jt.at("leaf_counts").get<std::vector<std::uint32_t>>();
      trees.push_back(std::move(t));
    }
    return DecisionForest(p, doc.at("master_seed").get<std::uint64_t>(),
                          doc.at("n_features").get<int>(),
                          doc.at("classes").get<std::vector<int>>(), std::move(trees));
  } catch (const json::exception& e) {
    throw PersistenceError(std::string("malformed forest document: ") + e.what());
  }
}

void DecisionForest::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw PersistenceError("cannot write model '" + path + "'");
  out << to_json() << '\n';
}

DecisionForest DecisionForest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PersistenceError("cannot open model '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace motioncred
