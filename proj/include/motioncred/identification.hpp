#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "motioncred/dataset.hpp"
#include "motioncred/forest.hpp"

namespace motioncred {

/// Forest over the subject roster of one (activity, mask) slice.
/// Throws TrainingError with fewer than two subjects.
DecisionForest train_identification(const FeatureSet& slice, const ForestParams& params,
                                    std::uint64_t seed, int threads = 0);
DecisionForest train_identification(const std::vector<FeatureVector>& table, Activity activity,
                                    SensorMask mask, const ForestParams& params, std::uint64_t seed,
                                    int threads = 0);

/// Top-1 accuracy of predicted labels against truth.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

struct CellResult {
  std::vector<double> fold_accuracy;
  double accuracy = 0;  // mean of fold_accuracy
  int n_subjects = 0;
  int n_samples = 0;
  std::vector<SubjectId> dropped_subjects;  // fewer than k windows
};

class AccuracyTable {
public:
  using Key = std::pair<Activity, SensorMask>;

  void set(Activity a, SensorMask m, CellResult cell);
  const CellResult* find(Activity a, SensorMask m) const;
  const std::map<Key, CellResult>& cells() const { return cells_; }
  std::vector<SensorMask> masks() const;
  /// Arithmetic mean of the mask's activity cells; throws EmptySliceError if none.
  double average(SensorMask m) const;

  /// Rows A..S then Avg, one column per mask, 4 decimals; absent cells are empty.
  void write_csv(std::ostream& out) const;

private:
  std::map<Key, CellResult> cells_;
};

/// Stratified k-fold accuracy of one slice. Subjects with fewer than k windows
/// are dropped (listed in the result); at least two subjects must remain.
CellResult cross_validate(const FeatureSet& slice, const ForestParams& params, int k,
                          std::uint64_t seed, int threads = 0);

AccuracyTable evaluate_identification(const std::vector<FeatureVector>& table,
                                      const std::vector<Activity>& activities,
                                      const std::vector<SensorMask>& masks,
                                      const ForestParams& params, int k, std::uint64_t seed,
                                      int threads = 0);

enum class Condition { Benign, Adversarial };
const char* condition_name(Condition c);

/// Distribution of a model's confidence in its own decision over a sample set.
struct ProbabilityStats {
  static constexpr int kBins = 20;

  std::vector<double> confidence;  // per sample, in [0, 1]
  std::vector<bool> correct;       // decision matched the truth
  double mean = 0;
  double std = 0;                  // population
  std::array<std::size_t, kBins> histogram{};  // bins of width 1/20 on [0, 1]
};

/// Throws EmptySliceError on an empty input. `correct` may be empty.
ProbabilityStats summarize_confidence(std::vector<double> confidence, std::vector<bool> correct = {});

/// Top-1 probability of `model` on every row of X. `truth` holds class labels
/// (may be empty).
ProbabilityStats probability_stats(const DecisionForest& model, const Eigen::MatrixXd& X,
                                   const std::vector<int>& truth = {});

}  // namespace motioncred
