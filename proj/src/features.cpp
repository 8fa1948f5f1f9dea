#include "motioncred/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "motioncred/error.hpp"

namespace motioncred {

namespace {

struct AxisStats {
  double mean = 0, stddev = 0;
};

AxisStats axis_stats(const Eigen::VectorXd& v) {
  AxisStats s;
  s.mean = v.mean();
  s.stddev = std::sqrt((v.array() - s.mean).square().mean());
  return s;
}

double pearson(const Eigen::VectorXd& a, const AxisStats& sa, const Eigen::VectorXd& b,
               const AxisStats& sb) {
  if (sa.stddev == 0.0 || sb.stddev == 0.0) return 0.0;
  const double cov = ((a.array() - sa.mean) * (b.array() - sb.mean)).mean();
  return std::clamp(cov / (sa.stddev * sb.stddev), -1.0, 1.0);
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

double mean_peak_spacing(const Eigen::VectorXd& v, const AxisStats& s, double sample_rate_hz) {
  const double level = s.mean + s.stddev;
  Eigen::Index first = -1, last = -1, count = 0;
  for (Eigen::Index i = 1; i + 1 < v.size(); ++i) {
    if (v[i] > level && v[i] > v[i - 1] && v[i] > v[i + 1]) {
      if (first < 0) first = i;
      last = i;
      ++count;
    }
  }
  if (count < 2) return 0.0;
  return static_cast<double>(last - first) / static_cast<double>(count - 1) / sample_rate_hz;
}

void append_axis(const Eigen::VectorXd& v, const AxisStats& s, double sample_rate_hz,
                 Eigen::VectorXd& out, Eigen::Index& at) {
  const double lo = v.minCoeff(), hi = v.maxCoeff();
  std::array<double, kHistogramBins> bins{};
  if (hi > lo) {
    const double width = (hi - lo) / kHistogramBins;
    for (double x : v) {
      auto b = static_cast<int>(std::floor((x - lo) / width));
      bins[std::clamp(b, 0, kHistogramBins - 1)] += 1.0;
    }
  } else {
    bins[0] = static_cast<double>(v.size());
  }
  for (double b : bins) out[at++] = b / static_cast<double>(v.size());

  out[at++] = s.mean;
  out[at++] = s.stddev;
  out[at++] = s.stddev * s.stddev;
  out[at++] = (v.array() - s.mean).abs().mean();
  out[at++] = mean_peak_spacing(v, s, sample_rate_hz);
}

}  // namespace

std::vector<std::string> feature_names(SensorSource source) {
  const std::string prefix(source_name(source));
  std::vector<std::string> names;
  for (const char* axis : {"x", "y", "z"}) {
    for (int b = 0; b < kHistogramBins; ++b)
      names.push_back(prefix + "." + axis + ".bin" + std::to_string(b));
    for (const char* stat : {"mean", "std", "var", "mad", "peak_interval"})
      names.push_back(prefix + "." + axis + "." + stat);
  }
  for (const char* kind : {"corr", "cos"})
    for (const char* pair : {"xy", "xz", "yz"}) names.push_back(prefix + "." + kind + "." + pair);
  names.push_back(prefix + ".resultant");
  return names;
}

FeatureVector extract_features(const RawWindow& window, double sample_rate_hz) {
  const auto n = static_cast<Eigen::Index>(window.readings.size());
  if (n == 0) throw ShapeError("cannot extract features from an empty window");

  Eigen::VectorXd x(n), y(n), z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = window.readings[static_cast<std::size_t>(i)];
    if (r.source != window.source) throw ShapeError("window mixes sensor sources");
    x[i] = r.x;
    y[i] = r.y;
    z[i] = r.z;
  }
  const AxisStats sx = axis_stats(x), sy = axis_stats(y), sz = axis_stats(z);

  FeatureVector fv;
  fv.subject = window.subject;
  fv.activity = window.activity;
  fv.mask = SensorMask{window.source};
  fv.window_index = window.window_index;
  fv.values.resize(kFeaturesPerSource);

  Eigen::Index at = 0;
  append_axis(x, sx, sample_rate_hz, fv.values, at);
  append_axis(y, sy, sample_rate_hz, fv.values, at);
  append_axis(z, sz, sample_rate_hz, fv.values, at);
  fv.values[at++] = pearson(x, sx, y, sy);
  fv.values[at++] = pearson(x, sx, z, sz);
  fv.values[at++] = pearson(y, sy, z, sz);
  fv.values[at++] = cosine(x, y);
  fv.values[at++] = cosine(x, z);
  fv.values[at++] = cosine(y, z);
  fv.values[at++] = (x.array().square() + y.array().square() + z.array().square()).sqrt().mean();
  return fv;
}

std::vector<FeatureVector> extract_all(const std::vector<RawWindow>& windows,
                                       double sample_rate_hz) {
  std::vector<FeatureVector> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(extract_features(w, sample_rate_hz));
  return out;
}

}  // namespace motioncred
