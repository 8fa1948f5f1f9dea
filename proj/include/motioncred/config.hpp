#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "motioncred/experiment.hpp"

namespace motioncred {

/// One JSON run configuration. Unknown keys and wrong types are errors, so a
/// long run never fails late on a typo. Relative paths resolve against the
/// directory holding the config file.
struct RunConfig {
  std::string data_dir;     // optional; must exist when given
  std::string features;     // canonical feature file; must exist when given
  std::string output_dir = "out";
  std::vector<SensorMask> sensor_masks{SensorMask::phone_accel(), SensorMask::all()};
  std::vector<Activity> activities{kAllActivities.begin(), kAllActivities.end()};
  std::vector<Activity> detail_activities{kDiscussionActivities.begin(), kDiscussionActivities.end()};
  std::optional<std::uint64_t> seed;
  int folds = 10;
  int threads = 0;
  int auth_subjects = 0;
  ForestParams forest;
  AttackConfig attack;
  ThresholdPolicy threshold_policy = ThresholdPolicy::Midpoint;

  /// Throws ConfigurationError on schema violations or missing paths. A seed
  /// override (command line, environment) replaces the file's seed before
  /// validation.
  static RunConfig parse(const std::string& json_text, const std::string& base_dir = ".",
                         std::optional<std::uint64_t> seed_override = std::nullopt);
  static RunConfig load(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

  /// Re-checks the invariants, including the seed, after command-line overrides.
  void validate() const;

  ExperimentConfig experiment() const;
};

}  // namespace motioncred
