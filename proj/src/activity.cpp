#include "motioncred/activity.hpp"

#include "motioncred/error.hpp"

namespace motioncred {

std::optional<Activity> activity_from_code(char code) {
  for (auto a : kAllActivities)
    if (activity_code(a) == code) return a;
  return std::nullopt;
}

Activity parse_activity(std::string_view text) {
  if (text.size() == 1)
    if (auto a = activity_from_code(text[0])) return *a;
  throw ConfigurationError("unknown activity code '" + std::string(text) + "'");
}

std::string_view activity_name(Activity a) {
  switch (a) {
    case Activity::A: return "walking";
    case Activity::B: return "jogging";
    case Activity::C: return "stairs";
    case Activity::D: return "sitting";
    case Activity::E: return "standing";
    case Activity::F: return "typing";
    case Activity::G: return "teeth";
    case Activity::H: return "soup";
    case Activity::I: return "chips";
    case Activity::J: return "pasta";
    case Activity::K: return "drinking";
    case Activity::L: return "sandwich";
    case Activity::M: return "kicking";
    case Activity::O: return "catch";
    case Activity::P: return "dribbling";
    case Activity::Q: return "writing";
    case Activity::R: return "clapping";
    case Activity::S: return "folding";
  }
  return "unknown";
}

ActivityCategory activity_category(Activity a) {
  switch (a) {
    case Activity::A: case Activity::B: case Activity::C:
    case Activity::D: case Activity::E: case Activity::M:
      return ActivityCategory::NonHand;
    case Activity::H: case Activity::I: case Activity::J:
    case Activity::K: case Activity::L:
      return ActivityCategory::HandEating;
    default:
      return ActivityCategory::Hand;
  }
}

std::string_view source_name(SensorSource s) {
  switch (s) {
    case SensorSource::PhoneAccel: return "phone-accel";
    case SensorSource::PhoneGyro: return "phone-gyro";
    case SensorSource::WatchAccel: return "watch-accel";
    case SensorSource::WatchGyro: return "watch-gyro";
  }
  return "unknown";
}

std::optional<SensorSource> source_from_name(std::string_view name) {
  for (auto s : kAllSources)
    if (source_name(s) == name) return s;
  return std::nullopt;
}

int SensorMask::size() const {
  int n = 0;
  for (auto s : kAllSources) n += contains(s) ? 1 : 0;
  return n;
}

std::vector<SensorSource> SensorMask::sources() const {
  std::vector<SensorSource> out;
  for (auto s : kAllSources)
    if (contains(s)) out.push_back(s);
  return out;
}

std::string SensorMask::to_string() const {
  std::string out;
  for (auto s : sources()) {
    if (!out.empty()) out += '+';
    out += source_name(s);
  }
  return out;
}

SensorMask SensorMask::parse(std::string_view text) {
  if (text == "all") return all();
  if (text == "all-accel") return all_accel();
  SensorMask mask;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('+', start);
    if (end == std::string_view::npos) end = text.size();
    auto part = text.substr(start, end - start);
    auto src = source_from_name(part);
    if (!src) throw ConfigurationError("unknown sensor source '" + std::string(part) + "'");
    mask = mask | SensorMask{*src};
    start = end + 1;
  }
  if (mask.empty()) throw ConfigurationError("empty sensor mask");
  return mask;
}

std::string mask_label(SensorMask m) {
  if (m == SensorMask::all()) return "all";
  if (m == SensorMask::all_accel()) return "all-accel";
  return m.to_string();
}

}  // namespace motioncred
