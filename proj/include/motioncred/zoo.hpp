#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "motioncred/probability.hpp"

// Black-box evasion attack. This module sees the victim only through QueryFn;
// it deliberately does not include any model header.

namespace motioncred {

/// The victim as the attacker sees it: feature values in, class probabilities out.
using QueryFn = std::function<ProbabilityVector(const Eigen::VectorXd&)>;

struct AttackConfig {
  double h = 0.2;            // finite-difference half-step, normalized units
  double step_size = 0.3;    // signed coordinate step, normalized units
  int max_iters = 200;
  double kappa = 0.0;        // confidence margin, >= 0
  int coords_per_iter = 16;
  Eigen::VectorXd clip_min;  // empty = unbounded
  Eigen::VectorXd clip_max;
  Eigen::VectorXd scale;     // per-feature unit (z-score std); empty = 1
  std::uint64_t seed = 0;

  /// Clip bounds = per-feature observed min/max, scale = per-feature std.
  void fit_to_training_data(const Eigen::MatrixXd& X);
  void validate(Eigen::Index dim) const;  // throws ConfigurationError
};

struct AttackResult {
  Eigen::VectorXd original;
  Eigen::VectorXd perturbed;
  bool success = false;  // victim's prediction on `perturbed` differs from the true class
  long queries = 0;
  int iterations_used = 0;
  double final_loss = 0;
  Eigen::Index original_class = -1;     // victim's prediction on `original`
  Eigen::Index adversarial_class = -1;  // victim's prediction on `perturbed`
};

/// Untargeted margin loss max(log p_true - max_{i != true} log p_i, -kappa).
/// Minimizing it drives the prediction away from `true_class`.
template <typename Derived>
double attack_loss(const Eigen::MatrixBase<Derived>& proba, Eigen::Index true_class, double kappa) {
  double other = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < proba.size(); ++i)
    if (i != true_class) other = std::max(other, std::log(static_cast<double>(proba(i))));
  const double margin = std::log(static_cast<double>(proba(true_class))) - other;
  return std::max(margin, -kappa);
}

/// Symmetric difference (f(x + h e_i) - f(x - h e_i)) / (2h), with the probe
/// points clamped to [lo, hi] and the divisor set to the actual probe spacing.
/// Exactly two evaluations of f unless the clamped interval is empty.
template <typename F, typename Derived>
double estimate_gradient(F&& f, const Eigen::MatrixBase<Derived>& x, Eigen::Index i, double h,
                         double lo = -std::numeric_limits<double>::infinity(),
                         double hi = std::numeric_limits<double>::infinity()) {
  using Vector = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
  Vector plus = x, minus = x;
  plus(i) = std::min(static_cast<double>(x(i)) + h, hi);
  minus(i) = std::max(static_cast<double>(x(i)) - h, lo);
  const double spacing = static_cast<double>(plus(i) - minus(i));
  if (!(spacing > 0)) return 0.0;
  return (f(plus) - f(minus)) / spacing;
}

/// Zeroth-order signed-coordinate attack. Each iteration queries the iterate,
/// then estimates the loss gradient on `coords_per_iter` coordinates drawn
/// round-robin from a seeded permutation (reshuffled every epoch) and steps
/// each against the sign of its estimate. Every queried point is a candidate;
/// the lowest-loss one is returned, so the original is kept if nothing beats
/// it. An epoch with no nonzero estimate triggers one random h-sized nudge.
/// Stops once the best point is misclassified with loss <= -kappa.
AttackResult zoo_attack(const QueryFn& query, const Eigen::VectorXd& x, Eigen::Index true_class,
                        const AttackConfig& cfg);

struct AttackDatasetResult {
  Eigen::MatrixXd adversarial;  // one row per input row
  std::vector<AttackResult> results;
  double success_rate = 0;
  double accuracy_before = 0;
  double accuracy_after = 0;
};

/// Attacks every row of X (true class indices in `true_class`). Sample i uses
/// a generator derived from (cfg.seed, i), so results do not depend on `threads`.
AttackDatasetResult attack_dataset(const QueryFn& query, const Eigen::MatrixXd& X,
                                   const std::vector<Eigen::Index>& true_class,
                                   const AttackConfig& cfg, int threads = 0);

}  // namespace motioncred
