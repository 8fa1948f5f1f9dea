#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "motioncred/activity.hpp"

namespace motioncred {

/// One timestamped tri-axial sample (m/s^2 for accelerometers, rad/s for gyroscopes).
struct SensorReading {
  SubjectId subject = 0;
  Activity activity = Activity::A;
  std::int64_t timestamp = 0;  // nanoseconds, strictly positive
  SensorSource source = SensorSource::PhoneAccel;
  double x = 0, y = 0, z = 0;

  friend bool operator==(const SensorReading&, const SensorReading&) = default;
};

struct ParseResult {
  std::vector<SensorReading> readings;
  std::size_t malformed = 0;
};

/// Parses `subject,activity,timestamp,x,y,z;` lines (trailing ';' optional).
/// Malformed lines are skipped and counted. Throws IngestError when the stream
/// cannot be read and FormatError when more than half the non-empty lines are
/// malformed.
ParseResult parse_raw(std::istream& in, SensorSource source);
ParseResult parse_raw_file(const std::string& path, SensorSource source);

/// Inverse of parse_raw for a single reading; round-trips exactly.
std::string serialize(const SensorReading& r);

/// Guesses the sensor source of a raw log from its path (phone/watch + accel/gyro).
std::optional<SensorSource> source_from_path(const std::string& path);

struct RawWindow {
  SubjectId subject = 0;
  Activity activity = Activity::A;
  SensorSource source = SensorSource::PhoneAccel;
  int window_index = 0;  // position within its (subject, activity, source) group
  std::vector<SensorReading> readings;
};

struct WindowingResult {
  std::vector<RawWindow> windows;
  std::size_t discarded = 0;  // readings in trailing partial windows
};

inline constexpr double kDefaultWindowSeconds = 10.0;
inline constexpr double kDefaultSampleRateHz = 20.0;

/// Cuts each (subject, activity, source) group into non-overlapping windows of
/// floor(window_seconds * sample_rate_hz) readings. Groups are emitted in order
/// of first appearance; trailing partial windows are dropped.
WindowingResult window(const std::vector<SensorReading>& readings,
                       double window_seconds = kDefaultWindowSeconds,
                       double sample_rate_hz = kDefaultSampleRateHz);

using WindowCountKey = std::tuple<SubjectId, Activity, SensorSource>;
std::map<WindowCountKey, int> count_windows(const std::vector<RawWindow>& windows);

}  // namespace motioncred
