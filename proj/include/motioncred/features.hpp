#pragma once

#include <string>
#include <vector>

#include "motioncred/dataset.hpp"
#include "motioncred/ingest.hpp"

namespace motioncred {

inline constexpr int kHistogramBins = 10;

/// Features per sensor source. Per axis (x, y, z): 10 histogram bins, mean,
/// std, variance, mean absolute deviation, mean time between peaks. Then
/// Pearson correlation and cosine similarity for (x,y), (x,z), (y,z), and the
/// mean resultant magnitude.
inline constexpr int kFeaturesPerSource = 3 * (kHistogramBins + 5) + 6 + 1;
static_assert(kFeaturesPerSource == 52);

/// Column names for one source, in extraction order.
std::vector<std::string> feature_names(SensorSource source);

/// Reduces one window to its 52 statistics. Standard deviations are population
/// (divide by n). Histogram bins are equal-width over the window's own min/max
/// for that axis, normalized to sum to 1; a constant axis puts all mass in bin 0
/// and has correlation 0 against everything. Peaks are strict local maxima above
/// mean + std; their mean spacing is reported in seconds using `sample_rate_hz`,
/// or 0 with fewer than two peaks.
FeatureVector extract_features(const RawWindow& window,
                               double sample_rate_hz = kDefaultSampleRateHz);

std::vector<FeatureVector> extract_all(const std::vector<RawWindow>& windows,
                                       double sample_rate_hz = kDefaultSampleRateHz);

}  // namespace motioncred
