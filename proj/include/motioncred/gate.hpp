#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>

#include "motioncred/dataset.hpp"
#include "motioncred/forest.hpp"
#include "motioncred/identification.hpp"

namespace motioncred {

enum class ThresholdPolicy {
  Midpoint,          // (benign mean + adversarial mean) / 2
  BenignPercentile,  // 5th percentile of benign correct-prediction confidence
};
const char* policy_name(ThresholdPolicy p);
ThresholdPolicy parse_policy(std::string_view text);  // throws ConfigurationError

inline constexpr double kThresholdCeiling = 0.95;
inline constexpr double kAuthFloor = 0.5;

/// Threshold for one model, clamped to [floor, 0.95]. Throws CalibrationError
/// unless the benign mean exceeds the adversarial mean.
double calibrate_threshold(const ProbabilityStats& benign, const ProbabilityStats& adversarial,
                           double floor, ThresholdPolicy policy = ThresholdPolicy::Midpoint);

struct ThresholdTable {
  std::map<std::pair<Activity, SensorMask>, double> id;
  std::map<std::tuple<SubjectId, Activity, SensorMask>, double> auth;

  std::optional<double> id_threshold(Activity a, SensorMask m) const;
  std::optional<double> auth_threshold(SubjectId s, Activity a, SensorMask m) const;

  std::string to_json() const;
  static ThresholdTable from_json(const std::string& text);  // throws PersistenceError
  void save(const std::string& path) const;
  static ThresholdTable load(const std::string& path);

  static constexpr int kSchemaVersion = 1;
};

/// Trained forests keyed like the thresholds.
struct ModelSet {
  std::map<std::pair<Activity, SensorMask>, DecisionForest> id;
  std::map<std::tuple<SubjectId, Activity, SensorMask>, DecisionForest> auth;
};

enum class Outcome { Verified, FallbackSecondFactor, Rejected };
const char* outcome_name(Outcome o);
int exit_code(Outcome o);  // 0, 10, 11

struct VerificationTrace {
  SubjectId claimed_subject = 0;
  SubjectId predicted_subject = 0;
  double id_probability = 0;  // top-1
  double id_threshold = 0;
  std::optional<double> auth_probability;  // genuine-class probability
  std::optional<double> auth_threshold;
  int step_reached = 1;
};

struct VerificationDecision {
  Outcome outcome = Outcome::FallbackSecondFactor;
  VerificationTrace trace;
};

/// Two-step check. Step 1 falls back when the identification model's top-1
/// probability is below its threshold or names someone other than the claimed
/// subject. Step 2 falls back when the claimed subject's authentication model
/// is less confident than its threshold either way, rejects a confident
/// imposter call, and otherwise verifies. The authentication model is only
/// queried after step 1 passes. Missing models or thresholds throw
/// ConfigurationError.
VerificationDecision verify(const Eigen::VectorXd& values, Activity activity, SensorMask mask,
                            SubjectId claimed_subject, const ModelSet& models,
                            const ThresholdTable& thresholds);
VerificationDecision verify(const FeatureVector& sample, SubjectId claimed_subject,
                            const ModelSet& models, const ThresholdTable& thresholds);

/// Recomputes the outcome from trace fields alone.
Outcome replay(const VerificationTrace& trace);

/// Stable single-line rendering of a decision.
std::string format_decision(const VerificationDecision& d);

struct GateStats {
  std::size_t total_samples = 0;
  std::size_t misclassified = 0;
  std::size_t misclassified_above_threshold = 0;
  double pass_rate = 0;  // misclassified_above_threshold / misclassified, 0 when none
};

/// Counts rows of X the model gets wrong and, among those, the ones whose
/// top-1 probability reaches tau.
GateStats gate_stats(const DecisionForest& model, const Eigen::MatrixXd& X,
                     const std::vector<int>& truth, double tau);

}  // namespace motioncred
