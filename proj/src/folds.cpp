#include "motioncred/folds.hpp"

#include <map>
#include <string>

#include "motioncred/error.hpp"
#include "motioncred/random.hpp"

namespace motioncred {

std::vector<Eigen::Index> FoldAssignment::test_indices(int fold) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

std::vector<Eigen::Index> FoldAssignment::train_indices(int fold) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

FoldAssignment stratified_folds(const std::vector<int>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw StratificationError("need at least 2 folds, got " + std::to_string(k));
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [label, members] : by_class)
    if (members.size() < static_cast<std::size_t>(k))
      throw StratificationError("class " + std::to_string(label) + " has " +
                                std::to_string(members.size()) + " samples, fewer than k=" +
                                std::to_string(k));

  FoldAssignment fa;
  fa.k = k;
  fa.fold_of.assign(labels.size(), -1);
  Rng rng = derive_rng(seed, {0x666f6c64});
  std::size_t cursor = 0;
  for (auto& [label, members] : by_class) {
    shuffle(members, rng);
    for (auto i : members) fa.fold_of[i] = static_cast<int>(cursor++ % static_cast<std::size_t>(k));
  }
  return fa;
}

}  // namespace motioncred
