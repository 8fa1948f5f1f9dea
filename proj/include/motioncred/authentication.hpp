#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <tuple>
#include <vector>

#include "motioncred/dataset.hpp"
#include "motioncred/forest.hpp"
#include "motioncred/identification.hpp"

namespace motioncred {

inline constexpr int kImposter = 0;
inline constexpr int kGenuine = 1;

/// Genuine-vs-imposter split for one subject. Imposter windows in train and
/// test come from disjoint subject groups.
struct AuthSplit {
  SubjectId subject = 0;
  Activity activity = Activity::A;
  SensorMask mask;
  FeatureSet train;  // subjects column keeps the original ids
  FeatureSet test;
  std::vector<int> train_label;  // kGenuine / kImposter per row
  std::vector<int> test_label;
  std::vector<SubjectId> train_imposter_ids;  // the id group imposter-train draws from
  std::vector<SubjectId> test_imposter_ids;
};

/// Genuine windows are shuffled and split with round(0.7 n) for training.
/// Other subjects are shuffled by id and halved (first half gets the extra
/// one); each half's pooled windows are shuffled and cut to the matching
/// genuine count. Throws SplitError with fewer than 10 genuine windows, fewer
/// than two other subjects, or an imposter pool too small to balance.
AuthSplit build_auth_split(const FeatureSet& slice, SubjectId subject, std::uint64_t seed);
AuthSplit build_auth_split(const std::vector<FeatureVector>& table, SubjectId subject,
                           Activity activity, SensorMask mask, std::uint64_t seed);

/// Two-class forest (kImposter, kGenuine) on split.train.
DecisionForest train_authentication(const AuthSplit& split, const ForestParams& params,
                                    std::uint64_t seed, int threads = 0);

/// Genuine-class probability for each row of X.
std::vector<double> genuine_scores(const DecisionForest& model, const Eigen::MatrixXd& X);

struct RocPoint {
  double threshold;
  double far;  // accepted imposters / imposters
  double frr;  // rejected genuines / genuines
};

struct RocCurve {
  std::vector<RocPoint> points;  // ascending threshold; 0 and 1 always present
};

/// A score is accepted when score >= threshold. Thresholds are the unique
/// scores plus {0, 1}. The EER is read at the first threshold where
/// FAR - FRR <= 0, interpolating linearly from the previous threshold. If
/// FAR - FRR stays positive through 1, the point (FAR 0, FRR 1) just above 1
/// closes the curve. Throws EmptySliceError unless both labels occur.
std::pair<RocCurve, double> roc_and_eer(const std::vector<double>& scores, const std::vector<int>& labels);

/// Predicted-class confidence max(p, 1 - p) of a binary model.
ProbabilityStats auth_probability_stats(const DecisionForest& model, const Eigen::MatrixXd& X,
                                        const std::vector<int>& labels = {});

class EerReport {
public:
  void add(Activity a, Condition c, SubjectId subject, double eer);

  struct Row {
    Activity activity;
    Condition condition;
    double mean_eer;
    double std_eer;  // population
    int n_subjects;
  };
  std::vector<Row> rows() const;
  /// Mean over subjects; throws EmptySliceError when absent.
  double mean(Activity a, Condition c) const;
  const std::map<std::tuple<Activity, Condition, SubjectId>, double>& values() const { return values_; }

  /// `activity,condition,mean_eer,std_eer,n_subjects`
  void write_csv(std::ostream& out) const;

private:
  std::map<std::tuple<Activity, Condition, SubjectId>, double> values_;
};

}  // namespace motioncred
