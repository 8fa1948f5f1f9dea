#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "motioncred/authentication.hpp"
#include "motioncred/gate.hpp"
#include "motioncred/identification.hpp"
#include "motioncred/ingest.hpp"
#include "motioncred/zoo.hpp"

namespace motioncred {

struct IngestSummary {
  std::size_t files = 0;
  std::size_t readings = 0;
  std::size_t malformed = 0;
  std::size_t discarded = 0;  // readings in trailing partial windows
  std::map<WindowCountKey, int> window_counts;
};

/// Raw logs to single-source feature rows. Each path is a file or a directory
/// searched recursively for `.txt` files; the source comes from the path.
std::vector<FeatureVector> ingest_paths(const std::vector<std::string>& paths,
                                        IngestSummary* summary = nullptr);
std::vector<FeatureVector> ingest_readings(const std::map<SensorSource, std::vector<SensorReading>>& readings,
                                           IngestSummary* summary = nullptr);

/// Writes readings as `<dir>/raw/<phone|watch>/<accel|gyro>/data_<subject>_<accel|gyro>_<phone|watch>.txt`.
void write_raw_logs(const std::string& dir, const std::map<SensorSource, std::vector<SensorReading>>& readings);

struct ExperimentConfig {
  std::vector<Activity> activities{kAllActivities.begin(), kAllActivities.end()};  // accuracy table
  std::vector<Activity> detail_activities{kDiscussionActivities.begin(), kDiscussionActivities.end()};
  std::vector<SensorMask> masks{SensorMask::phone_accel(), SensorMask::all()};
  ForestParams forest;
  AttackConfig attack;  // clip and scale are refit per model
  ThresholdPolicy policy = ThresholdPolicy::Midpoint;
  int folds = 10;
  int auth_subjects = 0;  // 0 = every eligible subject
  std::uint64_t seed = 0;
  int threads = 0;
};

using SliceKey = std::pair<Activity, SensorMask>;

struct AttackSummary {
  std::size_t n = 0;
  double accuracy_before = 0;
  double accuracy_after = 0;
  double success_rate = 0;
  double mean_queries = 0;
  double misclassification_error() const { return 1.0 - accuracy_after; }
};

struct ExperimentResult {
  AccuracyTable accuracy;

  // Identification, on the held-out evaluation fold.
  std::map<SliceKey, ProbabilityStats> id_benign, id_adversarial;
  std::map<SliceKey, AttackSummary> attack;
  std::map<SliceKey, GateStats> gate;

  // Authentication, pooled over subjects.
  std::map<SliceKey, ProbabilityStats> auth_benign, auth_adversarial, auth_adversarial_misclassified;
  std::map<SensorMask, EerReport> eer;

  ThresholdTable thresholds;
  std::vector<std::string> calibration_failures;  // models whose threshold fell back to the ceiling

  /// Gate counts summed over the detail activities of one mask.
  GateStats gate_total(SensorMask m) const;
};

/// Full evaluation. Identification: stratified k-fold accuracy for every
/// (activity, mask). For each detail activity and mask, a model is trained on
/// k - 2 folds; fold 1 is attacked to calibrate the threshold and fold 0 is
/// attacked to measure accuracy loss, confidence and gate leakage.
/// Authentication: per eligible subject, benign and attacked test EER and a
/// calibrated threshold.
ExperimentResult run_experiment(const std::vector<FeatureVector>& table, const ExperimentConfig& cfg,
                                const std::function<void(const std::string&)>& log = {});

}  // namespace motioncred
