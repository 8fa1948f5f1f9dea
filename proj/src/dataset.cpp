#include "motioncred/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "motioncred/error.hpp"

namespace motioncred {

FeatureVector fuse(const std::map<SensorSource, FeatureVector>& vectors, SensorMask mask) {
  if (mask.empty()) throw FusionError("fusion requested with an empty sensor mask");
  FeatureVector out;
  Eigen::Index total = 0;
  bool first = true;
  for (auto source : mask.sources()) {
    auto it = vectors.find(source);
    if (it == vectors.end())
      throw FusionError("missing " + std::string(source_name(source)) + " vector for mask " +
                        mask.to_string());
    const auto& v = it->second;
    if (first) {
      out.subject = v.subject;
      out.activity = v.activity;
      out.window_index = v.window_index;
      first = false;
    } else if (v.subject != out.subject || v.activity != out.activity ||
               v.window_index != out.window_index) {
      throw FusionError("fusion inputs disagree on subject, activity or window index");
    }
    total += v.values.size();
  }
  out.values.resize(total);
  Eigen::Index at = 0;
  for (auto source : mask.sources()) {
    const auto& v = vectors.at(source);
    out.values.segment(at, v.values.size()) = v.values;
    at += v.values.size();
    out.mask = out.mask | v.mask;
  }
  return out;
}

FeatureSet FeatureSet::subset(const std::vector<Eigen::Index>& rows) const {
  FeatureSet s;
  s.activity = activity;
  s.mask = mask;
  s.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.X.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
    s.subjects.push_back(subjects[static_cast<std::size_t>(rows[i])]);
    s.window_index.push_back(window_index[static_cast<std::size_t>(rows[i])]);
  }
  return s;
}

FeatureVector FeatureSet::row(Eigen::Index i) const {
  FeatureVector v;
  v.subject = subjects[static_cast<std::size_t>(i)];
  v.activity = activity;
  v.mask = mask;
  v.window_index = window_index[static_cast<std::size_t>(i)];
  v.values = X.row(i).transpose();
  return v;
}

std::vector<SubjectId> FeatureSet::roster() const {
  std::vector<SubjectId> r(subjects);
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

FeatureSet to_feature_set(const std::vector<FeatureVector>& rows) {
  FeatureSet s;
  if (rows.empty()) return s;
  s.activity = rows.front().activity;
  s.mask = rows.front().mask;
  const auto dim = rows.front().values.size();
  s.X.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.values.size() != dim) throw ShapeError("feature rows differ in dimension");
    if (r.activity != s.activity || r.mask != s.mask)
      throw ShapeError("feature rows differ in activity or sensor mask");
    s.X.row(static_cast<Eigen::Index>(i)) = r.values.transpose();
    s.subjects.push_back(r.subject);
    s.window_index.push_back(r.window_index);
  }
  return s;
}

FeatureSet select(const std::vector<FeatureVector>& table, Activity activity, SensorMask mask) {
  std::vector<FeatureVector> exact;
  for (const auto& r : table)
    if (r.activity == activity && r.mask == mask) exact.push_back(r);

  if (exact.empty() && mask.size() > 1) {
    using Key = std::tuple<SubjectId, int>;
    std::map<Key, std::map<SensorSource, FeatureVector>> parts;
    for (const auto& r : table) {
      if (r.activity != activity || r.mask.size() != 1) continue;
      auto src = r.mask.sources().front();
      if (mask.contains(src)) parts[{r.subject, r.window_index}].emplace(src, r);
    }
    for (const auto& [key, by_source] : parts)
      if (static_cast<int>(by_source.size()) == mask.size()) exact.push_back(fuse(by_source, mask));
  }
  if (exact.empty())
    throw EmptySliceError("no feature rows for activity " + std::string(1, activity_code(activity)) +
                          " with mask " + mask.to_string());
  auto set = to_feature_set(exact);
  set.activity = activity;
  set.mask = mask;
  return set;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_cell(const std::string& s, std::size_t line_no) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError("feature file line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

void write_feature_file(std::ostream& out, const std::vector<FeatureVector>& rows) {
  const Eigen::Index dim = rows.empty() ? 0 : rows.front().values.size();
  out << "subject,activity,window_index,sensor_mask";
  for (Eigen::Index i = 0; i < dim; ++i) out << ",f" << i;
  out << '\n';
  for (const auto& r : rows) {
    if (r.values.size() != dim) throw ShapeError("feature file rows must share one width");
    out << r.subject << ',' << activity_code(r.activity) << ',' << r.window_index << ','
        << r.mask.to_string();
    for (double v : r.values) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_feature_file(const std::string& path, const std::vector<FeatureVector>& rows) {
  std::ofstream out(path);
  if (!out) throw PersistenceError("cannot write feature file '" + path + "'");
  write_feature_file(out, rows);
}

std::vector<FeatureVector> read_feature_file(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("feature file is empty");
  auto header = split_csv(line);
  if (header.size() < 4 || header[0] != "subject" || header[1] != "activity" ||
      header[2] != "window_index" || header[3] != "sensor_mask")
    throw FormatError("feature file header must start with subject,activity,window_index,sensor_mask");
  const std::size_t dim = header.size() - 4;

  std::vector<FeatureVector> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != header.size())
      throw FormatError("feature file line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " cells");
    FeatureVector v;
    v.subject = parse_cell<int>(cells[0], line_no);
    auto act = cells[1].size() == 1 ? activity_from_code(cells[1][0]) : std::nullopt;
    if (!act) throw FormatError("feature file line " + std::to_string(line_no) + ": bad activity");
    v.activity = *act;
    v.window_index = parse_cell<int>(cells[2], line_no);
    try {
      v.mask = SensorMask::parse(cells[3]);
    } catch (const Error&) {
      throw FormatError("feature file line " + std::to_string(line_no) + ": bad sensor mask");
    }
    v.values.resize(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i)
      v.values[static_cast<Eigen::Index>(i)] = parse_cell<double>(cells[4 + i], line_no);
    rows.push_back(std::move(v));
  }
  return rows;
}

std::vector<FeatureVector> read_feature_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PersistenceError("cannot open feature file '" + path + "'");
  return read_feature_file(in);
}

}  // namespace motioncred
