#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "motioncred/dataset.hpp"
#include "motioncred/ingest.hpp"

namespace motioncred {

/// Feature-level fixture: isotropic Gaussian clusters, one per subject.
struct SynthConfig {
  int n_subjects = 5;
  int n_windows_per_subject = 20;
  int feature_dim = 8;
  /// Minimum distance between subject means, in within-class standard deviations.
  double cluster_separation = 8.0;
  std::uint64_t seed = 1;
  Activity activity = Activity::A;
  SubjectId first_subject = 1600;
};

/// Within-class standard deviation is 1. Subject means are redrawn until all
/// pairwise distances reach `cluster_separation`. Deterministic under seed.
std::vector<FeatureVector> synth_generate(const SynthConfig& cfg);

/// Raw-log fixture: per (subject, activity, source, axis) a sinusoid with
/// subject-specific offset, amplitude and frequency plus Gaussian noise,
/// sampled at 20 Hz.
struct SynthRawConfig {
  int n_subjects = 10;
  std::vector<Activity> activities{kAllActivities.begin(), kAllActivities.end()};
  SensorMask sources = SensorMask::all();
  double seconds_per_activity = 120.0;
  double noise = 0.3;
  std::uint64_t seed = 1;
  SubjectId first_subject = 1600;
};

/// Readings grouped per source, each list ordered by subject, activity, time.
std::map<SensorSource, std::vector<SensorReading>> synth_raw(const SynthRawConfig& cfg);

}  // namespace motioncred
