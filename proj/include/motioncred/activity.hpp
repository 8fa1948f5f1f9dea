#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace motioncred {

using SubjectId = int;

enum class ActivityCategory { NonHand, Hand, HandEating };

/// One of the 18 WISDM activity codes. There is no N.
enum class Activity : char {
  A = 'A', B = 'B', C = 'C', D = 'D', E = 'E', F = 'F', G = 'G', H = 'H', I = 'I',
  J = 'J', K = 'K', L = 'L', M = 'M', O = 'O', P = 'P', Q = 'Q', R = 'R', S = 'S',
};

inline constexpr std::array<Activity, 18> kAllActivities = {
    Activity::A, Activity::B, Activity::C, Activity::D, Activity::E, Activity::F,
    Activity::G, Activity::H, Activity::I, Activity::J, Activity::K, Activity::L,
    Activity::M, Activity::O, Activity::P, Activity::Q, Activity::R, Activity::S};

/// Walking, jogging, typing, clapping, drinking, sandwich.
inline constexpr std::array<Activity, 6> kDiscussionActivities = {
    Activity::A, Activity::B, Activity::F, Activity::R, Activity::K, Activity::L};

std::optional<Activity> activity_from_code(char code);
Activity parse_activity(std::string_view text);  // throws ConfigurationError
inline char activity_code(Activity a) { return static_cast<char>(a); }
std::string_view activity_name(Activity a);
ActivityCategory activity_category(Activity a);

enum class SensorSource : std::uint8_t { PhoneAccel = 0, PhoneGyro = 1, WatchAccel = 2, WatchGyro = 3 };

inline constexpr std::array<SensorSource, 4> kAllSources = {
    SensorSource::PhoneAccel, SensorSource::PhoneGyro, SensorSource::WatchAccel,
    SensorSource::WatchGyro};

std::string_view source_name(SensorSource s);
std::optional<SensorSource> source_from_name(std::string_view name);

/// Set of sensor sources. Iteration order is the fixed fusion order
/// phone-accel, phone-gyro, watch-accel, watch-gyro.
class SensorMask {
public:
  constexpr SensorMask() = default;
  constexpr SensorMask(std::initializer_list<SensorSource> sources) {
    for (auto s : sources) bits_ |= bit(s);
  }

  static constexpr SensorMask phone_accel() { return {SensorSource::PhoneAccel}; }
  static constexpr SensorMask all_accel() { return {SensorSource::PhoneAccel, SensorSource::WatchAccel}; }
  static constexpr SensorMask all() {
    return {SensorSource::PhoneAccel, SensorSource::PhoneGyro, SensorSource::WatchAccel,
            SensorSource::WatchGyro};
  }

  constexpr bool contains(SensorSource s) const { return (bits_ & bit(s)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  int size() const;
  std::vector<SensorSource> sources() const;

  SensorMask operator|(SensorMask o) const {
    SensorMask m;
    m.bits_ = bits_ | o.bits_;
    return m;
  }
  friend constexpr bool operator==(SensorMask, SensorMask) = default;
  friend constexpr auto operator<=>(SensorMask a, SensorMask b) { return a.bits_ <=> b.bits_; }

  /// Canonical text form, sources joined by '+', e.g. "phone-accel+watch-accel".
  std::string to_string() const;
  /// Accepts the canonical form plus the aliases "all-accel" and "all".
  static SensorMask parse(std::string_view text);  // throws ConfigurationError

private:
  static constexpr std::uint8_t bit(SensorSource s) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s));
  }
  std::uint8_t bits_ = 0;
};

/// Short label for file names and figure titles: "all" or "all-accel" where
/// they apply, otherwise the canonical form.
std::string mask_label(SensorMask m);

}  // namespace motioncred
