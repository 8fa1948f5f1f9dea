#include <algorithm>
#include <functional>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "motioncred/error.hpp"
#include "motioncred/features.hpp"
#include "motioncred/synth.hpp"
#include "oracles/sine_window_expected.hpp"

using namespace motioncred;

namespace {

// Offsets into the 52-vector.
constexpr int kAxisStride = kHistogramBins + 5;
constexpr int kMean = kHistogramBins, kStd = kHistogramBins + 1, kVar = kHistogramBins + 2,
              kMad = kHistogramBins + 3, kPeak = kHistogramBins + 4;
constexpr int kCorrXY = 3 * kAxisStride, kCosXY = kCorrXY + 3;

RawWindow make_window(const std::function<std::array<double, 3>(int)>& f, int n = 200,
                      SensorSource src = SensorSource::PhoneAccel) {
  RawWindow w;
  w.subject = 1600;
  w.activity = Activity::A;
  w.source = src;
  for (int i = 0; i < n; ++i) {
    auto v = f(i);
    w.readings.push_back({1600, Activity::A, 1 + i * 50'000'000LL, src, v[0], v[1], v[2]});
  }
  return w;
}

FeatureVector source_vector(SensorSource s, double fill, int window_index = 0) {
  FeatureVector v;
  v.subject = 1600;
  v.activity = Activity::B;
  v.mask = SensorMask{s};
  v.window_index = window_index;
  v.values = Eigen::VectorXd::Constant(kFeaturesPerSource, fill);
  return v;
}

}  // namespace

TEST_CASE("feature schema has 52 named columns per source") {
  CHECK(feature_names(SensorSource::PhoneAccel).size() == 52);
  CHECK(feature_names(SensorSource::WatchGyro).front() == "watch-gyro.x.bin0");
}

TEST_CASE("sine window matches the straight-line oracle") {
  auto w = make_window([](int i) {
    const double t = i / 20.0;
    return std::array<double, 3>{2.0 * std::sin(2 * std::numbers::pi * 1.3 * t) + 0.5,
                                 1.5 * std::cos(2 * std::numbers::pi * 0.7 * t) - 1.0,
                                 0.3 * t + std::sin(2 * std::numbers::pi * 2.1 * t)};
  });
  auto fv = extract_features(w);
  REQUIRE(fv.values.size() == 52);
  for (int i = 0; i < 52; ++i)
    CHECK_MESSAGE(fv.values[i] == doctest::Approx(oracle::kSineWindowFeatures[static_cast<std::size_t>(i)]).epsilon(1e-9),
                  "feature ", i);
}

TEST_CASE("constant axis degenerates without error") {
  auto w = make_window([](int i) { return std::array<double, 3>{3.25, std::sin(i * 0.3), i * 0.01}; });
  auto fv = extract_features(w);
  CHECK(fv.values[0] == 1.0);
  for (int b = 1; b < kHistogramBins; ++b) CHECK(fv.values[b] == 0.0);
  CHECK(fv.values[kStd] == 0.0);
  CHECK(fv.values[kVar] == 0.0);
  CHECK(fv.values[kMad] == 0.0);
  CHECK(fv.values[kPeak] == 0.0);
  CHECK(fv.values[kCorrXY] == 0.0);      // corr(x, y)
  CHECK(fv.values[kCorrXY + 1] == 0.0);  // corr(x, z)
  CHECK(fv.values.allFinite());
}

TEST_CASE("identical axes are perfectly correlated") {
  auto w = make_window([](int i) {
    const double v = std::sin(i * 0.2) + 0.1 * i;
    return std::array<double, 3>{v, v, -v};
  });
  auto fv = extract_features(w);
  CHECK(fv.values[kCorrXY] == doctest::Approx(1.0));
  CHECK(fv.values[kCosXY] == doctest::Approx(1.0));
  CHECK(fv.values[kCorrXY + 1] == doctest::Approx(-1.0));
}

TEST_CASE("bins, mean and std are invariant to sample order; bins sum to one") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    auto w = make_window([&](int) { return std::array<double, 3>{g(rng), g(rng) + 5, g(rng) * 0.1}; });
    auto shuffled = w;
    std::shuffle(shuffled.readings.begin(), shuffled.readings.end(), rng);
    auto a = extract_features(w), b = extract_features(shuffled);
    for (int axis = 0; axis < 3; ++axis) {
      const int o = axis * kAxisStride;
      double mass = 0;
      for (int i = 0; i < kHistogramBins; ++i) {
        CHECK(a.values[o + i] == doctest::Approx(b.values[o + i]).epsilon(1e-12));
        mass += a.values[o + i];
      }
      CHECK(std::abs(mass - 1.0) <= 1e-9);
      CHECK(a.values[o + kMean] == doctest::Approx(b.values[o + kMean]).epsilon(1e-12));
      CHECK(a.values[o + kStd] == doctest::Approx(b.values[o + kStd]).epsilon(1e-12));
    }
    CHECK(a.values.allFinite());
  }
}

TEST_CASE("peak spacing is measured in seconds") {
  // Spike every 20 samples = 1 s at 20 Hz.
  auto w = make_window([](int i) {
    const double v = (i % 20 == 10) ? 5.0 : 0.0;
    return std::array<double, 3>{v, v, v};
  });
  auto fv = extract_features(w);
  CHECK(fv.values[kPeak] == doctest::Approx(1.0));
  CHECK(extract_features(w, 10.0).values[kPeak] == doctest::Approx(2.0));
}

TEST_CASE("extract_features rejects empty and mixed windows") {
  RawWindow empty;
  CHECK_THROWS_AS(extract_features(empty), ShapeError);
  auto w = make_window([](int i) { return std::array<double, 3>{1.0 * i, 0, 0}; });
  w.readings[3].source = SensorSource::WatchAccel;
  CHECK_THROWS_AS(extract_features(w), ShapeError);
}

TEST_CASE("fuse concatenates in fixed source order") {
  std::map<SensorSource, FeatureVector> parts;
  parts.emplace(SensorSource::WatchGyro, source_vector(SensorSource::WatchGyro, 4));
  parts.emplace(SensorSource::PhoneAccel, source_vector(SensorSource::PhoneAccel, 1));
  parts.emplace(SensorSource::WatchAccel, source_vector(SensorSource::WatchAccel, 3));
  parts.emplace(SensorSource::PhoneGyro, source_vector(SensorSource::PhoneGyro, 2));

  auto single = fuse(parts, SensorMask::phone_accel());
  CHECK(single.values.size() == 52);
  CHECK(single.values == parts.at(SensorSource::PhoneAccel).values);
  CHECK(single.mask == SensorMask::phone_accel());

  auto two = fuse(parts, SensorMask::all_accel());
  CHECK(two.values.size() == 104);
  CHECK(two.values[0] == 1.0);
  CHECK(two.values[52] == 3.0);
  CHECK(two.mask == SensorMask::all_accel());

  auto all = fuse(parts, SensorMask::all());
  CHECK(all.values.size() == 208);
  for (int s = 0; s < 4; ++s) CHECK(all.values[s * 52 + 7] == s + 1.0);
  CHECK(all.mask.to_string() == "phone-accel+phone-gyro+watch-accel+watch-gyro");
}

TEST_CASE("fuse errors") {
  std::map<SensorSource, FeatureVector> parts;
  parts.emplace(SensorSource::PhoneAccel, source_vector(SensorSource::PhoneAccel, 1));
  CHECK_THROWS_AS(fuse(parts, SensorMask::all_accel()), FusionError);
  parts.emplace(SensorSource::WatchAccel, source_vector(SensorSource::WatchAccel, 1, 3));
  CHECK_THROWS_AS(fuse(parts, SensorMask::all_accel()), FusionError);
}

TEST_CASE("select fuses single-source rows on shared windows only") {
  std::vector<FeatureVector> table;
  for (int w = 0; w < 3; ++w) table.push_back(source_vector(SensorSource::PhoneAccel, w, w));
  for (int w = 0; w < 2; ++w) table.push_back(source_vector(SensorSource::WatchAccel, 10 + w, w));
  auto set = select(table, Activity::B, SensorMask::all_accel());
  CHECK(set.size() == 2);
  CHECK(set.dim() == 104);
  CHECK(set.X(1, 0) == 1.0);
  CHECK(set.X(1, 52) == 11.0);
  CHECK(select(table, Activity::B, SensorMask::phone_accel()).size() == 3);
  CHECK_THROWS_AS(select(table, Activity::C, SensorMask::phone_accel()), EmptySliceError);
}

TEST_CASE("feature file round-trips exactly") {
  auto rows = synth_generate({.n_subjects = 3, .n_windows_per_subject = 4, .feature_dim = 6});
  std::stringstream buf;
  write_feature_file(buf, rows);
  std::string header;
  std::getline(buf, header);
  CHECK(header == "subject,activity,window_index,sensor_mask,f0,f1,f2,f3,f4,f5");
  buf.seekg(0);
  auto back = read_feature_file(buf);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].subject == rows[i].subject);
    CHECK(back[i].window_index == rows[i].window_index);
    CHECK(back[i].mask == rows[i].mask);
    CHECK(back[i].values == rows[i].values);
  }
}

TEST_CASE("synth_generate contract") {
  SynthConfig cfg{.n_subjects = 5, .n_windows_per_subject = 40, .feature_dim = 10,
                  .cluster_separation = 8.0, .seed = 99};
  auto a = synth_generate(cfg), b = synth_generate(cfg);
  std::stringstream sa, sb;
  write_feature_file(sa, a);
  write_feature_file(sb, b);
  CHECK(sa.str() == sb.str());

  auto tiny = synth_generate({.n_subjects = 2, .n_windows_per_subject = 1});
  REQUIRE(tiny.size() == 2);
  CHECK(tiny[0].subject != tiny[1].subject);

  CHECK_THROWS_AS(synth_generate({.n_subjects = 1}), ConfigurationError);
  CHECK_THROWS_AS(synth_generate({.cluster_separation = 0}), ConfigurationError);
}

TEST_CASE("separation 8 is separable by a nearest-centroid oracle") {
  SynthConfig cfg{.n_subjects = 5, .n_windows_per_subject = 40, .feature_dim = 10,
                  .cluster_separation = 8.0, .seed = 4};
  auto data = synth_generate(cfg);
  // Train centroids on even windows, test on odd ones.
  std::map<int, Eigen::VectorXd> sum;
  std::map<int, int> count;
  for (const auto& v : data)
    if (v.window_index % 2 == 0) {
      auto [it, _] = sum.try_emplace(v.subject, Eigen::VectorXd::Zero(v.values.size()));
      it->second += v.values;
      ++count[v.subject];
    }
  int correct = 0, total = 0;
  for (const auto& v : data) {
    if (v.window_index % 2 == 0) continue;
    int best = -1;
    double best_d = 1e300;
    for (const auto& [s, acc] : sum) {
      double d = (v.values - acc / count[s]).squaredNorm();
      if (d < best_d) best_d = d, best = s;
    }
    correct += best == v.subject;
    ++total;
  }
  CHECK(correct == total);
}
