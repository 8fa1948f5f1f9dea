#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace motioncred {

struct FoldAssignment {
  int k = 0;
  std::vector<int> fold_of;  // sample index -> fold id in [0, k)

  std::vector<Eigen::Index> test_indices(int fold) const;
  std::vector<Eigen::Index> train_indices(int fold) const;
};

/// Within each class (ascending label order) samples are shuffled by `seed`
/// and dealt round-robin. Each class starts dealing where the previous one
/// stopped, so overall fold sizes also stay within one of each other.
/// Throws StratificationError naming the first class with fewer than k samples.
FoldAssignment stratified_folds(const std::vector<int>& labels, int k, std::uint64_t seed);

}  // namespace motioncred
