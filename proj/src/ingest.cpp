#include "motioncred/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <string_view>

#include "motioncred/error.hpp"

namespace motioncred {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::optional<SensorReading> parse_line(std::string_view line, SensorSource source) {
  if (!line.empty() && line.back() == ';') line.remove_suffix(1);
  std::array<std::string_view, 6> fields;
  std::size_t n = 0, start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (n == fields.size()) return std::nullopt;
    fields[n++] = line.substr(start, comma == std::string_view::npos ? comma : comma - start);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (n != fields.size()) return std::nullopt;

  SensorReading r;
  r.source = source;
  auto code = trim(fields[1]);
  if (code.size() != 1) return std::nullopt;
  auto activity = activity_from_code(code[0]);
  if (!activity) return std::nullopt;
  r.activity = *activity;
  if (!parse_number(fields[0], r.subject) || !parse_number(fields[2], r.timestamp) ||
      !parse_number(fields[3], r.x) || !parse_number(fields[4], r.y) ||
      !parse_number(fields[5], r.z))
    return std::nullopt;
  if (r.timestamp <= 0) return std::nullopt;
  if (!std::isfinite(r.x) || !std::isfinite(r.y) || !std::isfinite(r.z)) return std::nullopt;
  return r;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

ParseResult parse_raw(std::istream& in, SensorSource source) {
  if (!in) throw IngestError("raw sensor stream is not readable");
  ParseResult result;
  std::size_t non_empty = 0;
  std::string line;
  while (std::getline(in, line)) {
    auto view = trim(line);
    if (view.empty()) continue;
    ++non_empty;
    if (auto r = parse_line(view, source))
      result.readings.push_back(*r);
    else
      ++result.malformed;
  }
  if (in.bad()) throw IngestError("read failure on raw sensor stream");
  if (non_empty > 0 && 2 * result.malformed > non_empty)
    throw FormatError("more than half of " + std::to_string(non_empty) +
                      " lines are malformed; not a raw sensor log");
  return result;
}

ParseResult parse_raw_file(const std::string& path, SensorSource source) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open raw sensor log '" + path + "'");
  try {
    return parse_raw(in, source);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string serialize(const SensorReading& r) {
  std::string out = std::to_string(r.subject);
  out += ',';
  out += activity_code(r.activity);
  out += ',';
  out += std::to_string(r.timestamp);
  out += ',' + format_double(r.x) + ',' + format_double(r.y) + ',' + format_double(r.z) + ';';
  return out;
}

std::optional<SensorSource> source_from_path(const std::string& path) {
  std::string lower(path.size(), '\0');
  std::transform(path.begin(), path.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  // Only the last two path components carry the device/sensor naming.
  auto cut = lower.rfind('/');
  if (cut != std::string::npos && cut > 0) {
    auto prev = lower.rfind('/', cut - 1);
    if (prev != std::string::npos) lower = lower.substr(prev + 1);
  }
  const bool phone = lower.find("phone") != std::string::npos;
  const bool watch = lower.find("watch") != std::string::npos;
  const bool accel = lower.find("accel") != std::string::npos;
  const bool gyro = lower.find("gyro") != std::string::npos;
  if (phone == watch || accel == gyro) return std::nullopt;
  if (phone) return accel ? SensorSource::PhoneAccel : SensorSource::PhoneGyro;
  return accel ? SensorSource::WatchAccel : SensorSource::WatchGyro;
}

WindowingResult window(const std::vector<SensorReading>& readings, double window_seconds,
                       double sample_rate_hz) {
  const auto length = static_cast<std::size_t>(std::floor(window_seconds * sample_rate_hz));
  WindowingResult result;
  if (length == 0) {
    result.discarded = readings.size();
    return result;
  }

  // Group indices by key, remembering first-appearance order.
  std::map<WindowCountKey, std::size_t> group_of;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < readings.size(); ++i) {
    const auto& r = readings[i];
    WindowCountKey key{r.subject, r.activity, r.source};
    auto [it, inserted] = group_of.try_emplace(key, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }

  for (const auto& idx : groups) {
    const std::size_t full = idx.size() / length;
    for (std::size_t w = 0; w < full; ++w) {
      RawWindow win;
      const auto& first = readings[idx[w * length]];
      win.subject = first.subject;
      win.activity = first.activity;
      win.source = first.source;
      win.window_index = static_cast<int>(w);
      win.readings.reserve(length);
      for (std::size_t k = 0; k < length; ++k) win.readings.push_back(readings[idx[w * length + k]]);
      result.windows.push_back(std::move(win));
    }
    result.discarded += idx.size() - full * length;
  }
  return result;
}

std::map<WindowCountKey, int> count_windows(const std::vector<RawWindow>& windows) {
  std::map<WindowCountKey, int> counts;
  for (const auto& w : windows) ++counts[{w.subject, w.activity, w.source}];
  return counts;
}

}  // namespace motioncred
