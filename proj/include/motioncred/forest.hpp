#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "motioncred/probability.hpp"

namespace motioncred {

struct ForestParams {
  int n_trees = 100;
  int max_depth = 0;           // 0 = unlimited
  int min_leaf = 1;
  int features_per_split = 0;  // 0 = ceil(sqrt(d))
  bool bootstrap = true;
  double laplace_alpha = 1.0;

  void validate() const;  // throws ConfigurationError
};

/// Random forest over integer class labels with Laplace-smoothed leaf
/// frequencies. Immutable once trained; prediction is reentrant.
class DecisionForest {
public:
  struct Node {
    int feature = -1;  // < 0 marks a leaf
    double threshold = 0;
    int left = 0;      // child index, or leaf index for leaves
    int right = 0;
  };
  struct Tree {
    std::vector<Node> nodes;                  // nodes[0] is the root
    std::vector<std::uint32_t> leaf_counts;   // n_leaves x n_classes, row-major
  };

  DecisionForest() = default;
  /// Assembles a forest from explicit trees; validates structure.
  DecisionForest(ForestParams params, std::uint64_t master_seed, int n_features,
                 std::vector<int> classes, std::vector<Tree> trees);

  const std::vector<int>& classes() const { return classes_; }
  Eigen::Index n_classes() const { return static_cast<Eigen::Index>(classes_.size()); }
  int n_features() const { return n_features_; }
  const ForestParams& params() const { return params_; }
  std::uint64_t master_seed() const { return master_seed_; }
  const std::vector<Tree>& trees() const { return trees_; }

  /// Index of `label` in classes(), or -1.
  Eigen::Index class_index(int label) const;

  ProbabilityVector predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// One probability row per input row.
  Eigen::MatrixXd predict_proba_rows(const Eigen::MatrixXd& X) const;
  /// Label of the most probable class (lowest index wins ties).
  int predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  std::string to_json() const;
  static DecisionForest from_json(const std::string& text);
  void save(const std::string& path) const;
  static DecisionForest load(const std::string& path);

  static constexpr int kSchemaVersion = 1;

private:
  void validate() const;

  ForestParams params_;
  std::uint64_t master_seed_ = 0;
  int n_features_ = 0;
  std::vector<int> classes_;
  std::vector<Tree> trees_;
};

/// Trains one tree per bootstrap resample with greedy Gini splits. Tree t draws
/// from a generator derived from (seed, t), so the result does not depend on
/// `threads` (0 = hardware concurrency).
DecisionForest train_forest(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                            const ForestParams& params, std::uint64_t seed, int threads = 0);

}  // namespace motioncred
