#pragma once

#include <Eigen/Core>

namespace motioncred {

/// Class probabilities aligned with a model's class list. Non-negative, sums to 1.
using ProbabilityVector = Eigen::VectorXd;

/// Index of the largest entry; lowest index wins ties.
template <typename Derived>
Eigen::Index argmax(const Eigen::DenseBase<Derived>& p) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < p.size(); ++i)
    if (p(i) > p(best)) best = i;
  return best;
}

}  // namespace motioncred
