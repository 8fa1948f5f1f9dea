#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "motioncred/config.hpp"
#include "motioncred/error.hpp"

using namespace motioncred;
namespace fs = std::filesystem;

TEST_CASE("minimal config takes defaults") {
  const auto c = RunConfig::parse(R"({"seed": 5})");
  CHECK(*c.seed == 5);
  CHECK(c.activities.size() == 18);
  CHECK(c.detail_activities.size() == 6);
  REQUIRE(c.sensor_masks.size() == 2);
  CHECK(c.sensor_masks[0] == SensorMask::phone_accel());
  CHECK(c.sensor_masks[1] == SensorMask::all());
  CHECK(c.threshold_policy == ThresholdPolicy::Midpoint);
  CHECK(c.attack.h == 0.2);
  CHECK(c.attack.max_iters == 200);

  const auto e = c.experiment();
  CHECK(e.seed == 5);
  CHECK(e.folds == 10);
  CHECK(e.masks == c.sensor_masks);
}

TEST_CASE("every field parses") {
  const auto c = RunConfig::parse(R"({
    "seed": 9, "output_dir": "o", "sensor_masks": ["all-accel", "phone-accel+watch-gyro"],
    "activities": ["A", "B", "C"], "detail_activities": ["B"], "folds": 4, "threads": 2, "auth_subjects": 3,
    "forest": {"n_trees": 7, "max_depth": 5, "min_leaf": 2, "features_per_split": 3, "bootstrap": false,
               "laplace_alpha": 0.5},
    "attack": {"h": 0.5, "step_size": 0.1, "max_iters": 50, "kappa": 0.2, "coords_per_iter": 4},
    "threshold_policy": "benign-percentile"})",
                                 "/base");
  CHECK(c.output_dir == "/base/o");
  CHECK(c.sensor_masks[0] == SensorMask::all_accel());
  CHECK(c.sensor_masks[1] == SensorMask{SensorSource::PhoneAccel, SensorSource::WatchGyro});
  CHECK(c.activities == std::vector<Activity>{Activity::A, Activity::B, Activity::C});
  CHECK(c.detail_activities == std::vector<Activity>{Activity::B});
  CHECK(c.folds == 4);
  CHECK(c.threads == 2);
  CHECK(c.auth_subjects == 3);
  CHECK(c.forest.n_trees == 7);
  CHECK(c.forest.max_depth == 5);
  CHECK(c.forest.min_leaf == 2);
  CHECK(c.forest.features_per_split == 3);
  CHECK_FALSE(c.forest.bootstrap);
  CHECK(c.forest.laplace_alpha == 0.5);
  CHECK(c.attack.h == 0.5);
  CHECK(c.attack.step_size == 0.1);
  CHECK(c.attack.max_iters == 50);
  CHECK(c.attack.kappa == 0.2);
  CHECK(c.attack.coords_per_iter == 4);
  CHECK(c.threshold_policy == ThresholdPolicy::BenignPercentile);
}

TEST_CASE("schema violations are rejected up front") {
  CHECK_THROWS_AS(RunConfig::parse(R"({})"), ConfigurationError);  // no seed
  CHECK(*RunConfig::parse(R"({})", ".", 4).seed == 4);
  CHECK(*RunConfig::parse(R"({"seed": 1})", ".", 4).seed == 4);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": 1, "sede": 2})"), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": 1, "forest": {"n_tree": 2}})"), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": 1, "attack": {"iters": 2}})"), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": "1"})"), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": -1})"), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": 1, "folds": 2.5})"), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": 1, "folds": 2})"), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": 1, "sensor_masks": []})"), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": 1, "sensor_masks": ["phone-magnet"]})"), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": 1, "activities": ["N"]})"), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": 1, "threshold_policy": "median"})"), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": 1, "forest": {"n_trees": 0}})"), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": 1, "attack": {"h": 0}})"), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": 1, "forest": {"bootstrap": 1}})"), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse("{\"seed\": 1,"), ConfigurationError);
}

TEST_CASE("referenced paths must exist") {
  const fs::path dir = fs::temp_directory_path() / "motioncred_test_config";
  fs::remove_all(dir);
  fs::create_directories(dir / "data");
  std::ofstream(dir / "features.csv") << "subject,activity,window_index,sensor_mask,f0\n";
  std::ofstream(dir / "run.json") << R"({"seed": 3, "data_dir": "data", "features": "features.csv"})";

  const auto c = RunConfig::load((dir / "run.json").string());
  CHECK(fs::equivalent(c.data_dir, dir / "data"));
  CHECK(fs::equivalent(c.features, dir / "features.csv"));

  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": 3, "data_dir": "missing"})", dir.string()), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::parse(R"({"seed": 3, "features": "missing.csv"})", dir.string()), ConfigurationError);
  CHECK_THROWS_AS(RunConfig::load((dir / "absent.json").string()), ConfigurationError);
  fs::remove_all(dir);
}
