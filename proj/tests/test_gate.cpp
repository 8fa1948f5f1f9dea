#include <random>

#include "doctest.h"
#include "motioncred/authentication.hpp"
#include "motioncred/error.hpp"
#include "motioncred/gate.hpp"
#include "motioncred/synth.hpp"

using namespace motioncred;

namespace {

constexpr auto kA = Activity::A;
const SensorMask kMask = SensorMask::phone_accel();

ForestParams params(int trees = 30) {
  ForestParams p;
  p.n_trees = trees;
  return p;
}

struct World {
  FeatureSet slice;
  ModelSet models;
  ThresholdTable thresholds;
};

World make_world(double separation = 8, std::uint64_t seed = 3) {
  World w;
  w.slice = select(synth_generate({.n_subjects = 5, .n_windows_per_subject = 20, .feature_dim = 5,
                                   .cluster_separation = separation, .seed = seed}),
                   kA, kMask);
  w.models.id[{kA, kMask}] = train_identification(w.slice, params(), 1);
  w.thresholds.id[{kA, kMask}] = 0.5;
  for (auto s : w.slice.roster()) {
    const auto split = build_auth_split(w.slice, s, 2);
    w.models.auth[{s, kA, kMask}] = train_authentication(split, params(), 3);
    w.thresholds.auth[{s, kA, kMask}] = 0.6;
  }
  return w;
}

}  // namespace

TEST_CASE("midpoint calibration") {
  const auto walk_b = summarize_confidence({0.65}), walk_a = summarize_confidence({0.22});
  CHECK(calibrate_threshold(walk_b, walk_a, 1.0 / 51) == doctest::Approx(0.435));
  const auto drink_b = summarize_confidence({0.8, 0.9}), drink_a = summarize_confidence({0.3});
  CHECK(calibrate_threshold(drink_b, drink_a, 1.0 / 51) == doctest::Approx(0.575));
  CHECK_THROWS_AS(calibrate_threshold(walk_b, walk_b, 0.1), CalibrationError);
  CHECK_THROWS_AS(calibrate_threshold(walk_a, walk_b, 0.1), CalibrationError);

  CHECK(calibrate_threshold(summarize_confidence({0.6}), summarize_confidence({0.2}), kAuthFloor) == 0.5);
  CHECK(calibrate_threshold(summarize_confidence({1.0}), summarize_confidence({0.99}), 0.5) == kThresholdCeiling);
}

TEST_CASE("benign percentile calibration") {
  std::vector<double> v;
  std::vector<bool> ok;
  for (int i = 0; i <= 100; ++i) {
    v.push_back(0.5 + i * 0.004);
    ok.push_back(true);
  }
  v.push_back(0.01);  // a wrong prediction, excluded
  ok.push_back(false);
  const auto b = summarize_confidence(v, ok);
  const auto a = summarize_confidence({0.3});
  CHECK(calibrate_threshold(b, a, 0.1, ThresholdPolicy::BenignPercentile) == doctest::Approx(0.52));
  CHECK(parse_policy("benign-percentile") == ThresholdPolicy::BenignPercentile);
  CHECK_THROWS_AS(parse_policy("median"), ConfigurationError);
}

TEST_CASE("verification paths") {
  auto w = make_world();
  const auto s0 = w.slice.subjects[0];
  const Eigen::VectorXd x = w.slice.X.row(0).transpose();

  auto d = verify(x, kA, kMask, s0, w.models, w.thresholds);
  CHECK(d.outcome == Outcome::Verified);
  CHECK(d.trace.predicted_subject == s0);
  CHECK(d.trace.id_probability >= d.trace.id_threshold);
  REQUIRE(d.trace.auth_probability);
  CHECK(*d.trace.auth_probability >= *d.trace.auth_threshold);
  CHECK(d.trace.step_reached == 2);
  CHECK(exit_code(d.outcome) == 0);

  // Claimed identity differs from the identified one.
  const auto other = w.slice.roster().back();
  REQUIRE(other != s0);
  d = verify(x, kA, kMask, other, w.models, w.thresholds);
  CHECK(d.outcome == Outcome::FallbackSecondFactor);
  CHECK(d.trace.step_reached == 1);
  CHECK_FALSE(d.trace.auth_probability);
  CHECK(exit_code(d.outcome) == 10);

  // Unreachable identification threshold.
  auto strict = w.thresholds;
  strict.id[{kA, kMask}] = 1.0;
  CHECK(verify(x, kA, kMask, s0, w.models, strict).outcome == Outcome::FallbackSecondFactor);

  // Confident imposter call from the claimed subject's auth model: swap in
  // another subject's authentication model.
  auto swapped = w.models;
  swapped.auth[{s0, kA, kMask}] = w.models.auth.at({other, kA, kMask});
  d = verify(x, kA, kMask, s0, swapped, w.thresholds);
  CHECK(d.outcome == Outcome::Rejected);
  CHECK(*d.trace.auth_probability < 0.4);
  CHECK(exit_code(d.outcome) == 11);

  auto unsure = w.thresholds;
  unsure.auth[{s0, kA, kMask}] = 1.0;
  CHECK(verify(x, kA, kMask, s0, w.models, unsure).outcome == Outcome::FallbackSecondFactor);
}

TEST_CASE("missing models and thresholds are configuration errors") {
  auto w = make_world();
  const auto s0 = w.slice.subjects[0];
  const Eigen::VectorXd x = w.slice.X.row(0).transpose();
  CHECK_THROWS_AS(verify(x, Activity::B, kMask, s0, w.models, w.thresholds), ConfigurationError);
  CHECK_THROWS_AS(verify(x, kA, kMask, 9999, w.models, w.thresholds), ConfigurationError);
  auto t = w.thresholds;
  t.id.clear();
  CHECK_THROWS_AS(verify(x, kA, kMask, s0, w.models, t), ConfigurationError);
  t = w.thresholds;
  t.auth.erase({s0, kA, kMask});
  CHECK_THROWS_AS(verify(x, kA, kMask, s0, w.models, t), ConfigurationError);
}

TEST_CASE("authentication is never queried before identification passes") {
  auto w = make_world();
  const auto s0 = w.slice.subjects[0];
  // An auth model of the wrong width throws if it is ever queried.
  Eigen::MatrixXd narrow = Eigen::MatrixXd::Random(20, 3);
  std::vector<int> labels(20);
  for (int i = 0; i < 20; ++i) labels[static_cast<std::size_t>(i)] = i % 2;
  w.models.auth[{s0, kA, kMask}] = train_forest(narrow, labels, params(3), 1);

  const Eigen::VectorXd x = w.slice.X.row(0).transpose();
  auto strict = w.thresholds;
  strict.id[{kA, kMask}] = 1.0;
  VerificationDecision d;
  CHECK_NOTHROW(d = verify(x, kA, kMask, s0, w.models, strict));
  CHECK(d.outcome == Outcome::FallbackSecondFactor);
  CHECK(d.trace.step_reached == 1);
  // Passing step 1 reaches the broken model.
  CHECK_THROWS_AS(verify(x, kA, kMask, s0, w.models, w.thresholds), ShapeError);
}

TEST_CASE("trace replay and threshold monotonicity") {
  auto w = make_world(2.5, 7);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0, 4);
  const auto roster = w.slice.roster();
  const std::vector<double> grid{0.2, 0.35, 0.5, 0.65, 0.8, 0.95, 1.0};
  const std::vector<double> auth_grid{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  for (int trial = 0; trial < 150; ++trial) {
    Eigen::VectorXd x = trial % 2 ? w.slice.X.row(trial % w.slice.size()).transpose().eval()
                                  : Eigen::VectorXd(5);
    if (trial % 2 == 0)
      for (auto& v : x) v = g(rng);
    const auto claimed = roster[static_cast<std::size_t>(trial) % roster.size()];
    std::vector<std::vector<Outcome>> out(grid.size(), std::vector<Outcome>(auth_grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < auth_grid.size(); ++j) {
        auto t = w.thresholds;
        t.id[{kA, kMask}] = grid[i];
        t.auth[{claimed, kA, kMask}] = auth_grid[j];
        const auto d = verify(x, kA, kMask, claimed, w.models, t);
        CHECK(replay(d.trace) == d.outcome);
        CHECK(verify(x, kA, kMask, claimed, w.models, t).outcome == d.outcome);
        out[i][j] = d.outcome;
      }
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < auth_grid.size(); ++j)
        if (out[i][j] == Outcome::FallbackSecondFactor)
          for (std::size_t i2 = i; i2 < grid.size(); ++i2)
            for (std::size_t j2 = j; j2 < auth_grid.size(); ++j2)
              CHECK(out[i2][j2] != Outcome::Verified);
  }
}

TEST_CASE("gate statistics") {
  auto w = make_world(2.0, 11);
  const auto& f = w.models.id.at({kA, kMask});
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0, 5);
  Eigen::MatrixXd X(120, 5);
  for (auto& v : X.reshaped()) v = g(rng);
  std::vector<int> truth(120);
  for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = w.slice.roster()[i % 5];

  const auto none = gate_stats(f, X, truth, 1.0);
  CHECK(none.total_samples == 120);
  CHECK(none.misclassified > 0);
  CHECK(none.misclassified_above_threshold == 0);
  CHECK(none.pass_rate == 0.0);

  std::size_t prev = none.misclassified;
  for (double tau : {0.0, 0.3, 0.5, 0.7, 0.9}) {
    const auto s = gate_stats(f, X, truth, tau);
    CHECK(s.misclassified_above_threshold <= s.misclassified);
    CHECK(s.misclassified <= s.total_samples);
    CHECK(s.misclassified_above_threshold <= prev);
    prev = s.misclassified_above_threshold;
    if (tau == 0.0) CHECK(s.pass_rate == 1.0);
  }
}

TEST_CASE("threshold table persistence") {
  ThresholdTable t;
  t.id[{Activity::A, SensorMask::phone_accel()}] = 0.435;
  t.id[{Activity::K, SensorMask::all()}] = 0.575;
  t.auth[{1600, Activity::A, SensorMask::phone_accel()}] = 0.62;
  const auto back = ThresholdTable::from_json(t.to_json());
  CHECK(back.id == t.id);
  CHECK(back.auth == t.auth);
  CHECK(back.id_threshold(Activity::K, SensorMask::all()) == 0.575);
  CHECK_FALSE(back.id_threshold(Activity::B, SensorMask::all()));

  auto bad = t;
  bad.auth[{1600, Activity::A, SensorMask::phone_accel()}] = 0.3;
  CHECK_THROWS_AS(ThresholdTable::from_json(bad.to_json()), PersistenceError);
  CHECK_THROWS_AS(ThresholdTable::from_json("{}"), PersistenceError);
  CHECK_THROWS_AS(ThresholdTable::load("/nonexistent/thresholds.table"), PersistenceError);
}
