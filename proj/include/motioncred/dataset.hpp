#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "motioncred/activity.hpp"

namespace motioncred {

/// One window reduced to a fixed-length real vector.
struct FeatureVector {
  SubjectId subject = 0;
  Activity activity = Activity::A;
  SensorMask mask;
  int window_index = 0;
  Eigen::VectorXd values;
};

/// Concatenates per-source vectors in fixed source order. `mask` selects which
/// sources participate; every selected source must be present and all inputs
/// must agree on subject, activity and window index.
FeatureVector fuse(const std::map<SensorSource, FeatureVector>& vectors, SensorMask mask);

/// Rows of one (activity, mask) slice as a dense sample matrix.
struct FeatureSet {
  Activity activity = Activity::A;
  SensorMask mask;
  Eigen::MatrixXd X;  // rows are samples
  std::vector<SubjectId> subjects;
  std::vector<int> window_index;

  Eigen::Index size() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
  FeatureSet subset(const std::vector<Eigen::Index>& rows) const;
  FeatureVector row(Eigen::Index i) const;
  std::vector<SubjectId> roster() const;  // sorted unique subjects
};

/// Stacks vectors that share activity, mask and dimension.
FeatureSet to_feature_set(const std::vector<FeatureVector>& rows);

/// Selects the (activity, mask) slice of a table. Rows already carrying exactly
/// `mask` are taken as-is; otherwise single-source rows are fused on
/// (subject, activity, window_index), keeping only keys present for every
/// source in the mask. Throws EmptySliceError when nothing matches.
FeatureSet select(const std::vector<FeatureVector>& table, Activity activity, SensorMask mask);

/// Canonical feature file: header `subject,activity,window_index,sensor_mask,f0..fN`
/// then one CSV row per vector. All rows must have the same width. Values are
/// written with round-trip precision.
void write_feature_file(std::ostream& out, const std::vector<FeatureVector>& rows);
void write_feature_file(const std::string& path, const std::vector<FeatureVector>& rows);
std::vector<FeatureVector> read_feature_file(std::istream& in);
std::vector<FeatureVector> read_feature_file(const std::string& path);

}  // namespace motioncred
