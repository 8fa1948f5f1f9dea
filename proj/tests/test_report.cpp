#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "motioncred/error.hpp"
#include "motioncred/experiment.hpp"
#include "motioncred/report.hpp"
#include "motioncred/svg.hpp"
#include "motioncred/synth.hpp"
#include "oracles/centroid.hpp"

using namespace motioncred;
namespace fs = std::filesystem;

namespace {

const std::vector<Activity> kSix{Activity::A, Activity::B, Activity::F, Activity::R, Activity::K, Activity::L};

const std::vector<FeatureVector>& cohort() {
  static const auto table = [] {
    SynthRawConfig sc;
    sc.n_subjects = 6;
    sc.activities = kSix;
    sc.seconds_per_activity = 200;
    sc.seed = 21;
    return ingest_readings(synth_raw(sc));
  }();
  return table;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.activities = kSix;
  cfg.detail_activities = kSix;
  cfg.forest.n_trees = 20;
  cfg.attack.max_iters = 40;
  cfg.folds = 4;
  cfg.auth_subjects = 3;
  cfg.seed = 8;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("synthetic evaluation: bundle contents and accuracy") {
  const auto cfg = small_config();
  const auto result = run_experiment(cohort(), cfg);

  // Every cell reaches 0.99, and an independent centroid classifier agrees the
  // slices are that separable.
  for (auto m : cfg.masks)
    for (auto a : cfg.activities) {
      REQUIRE(oracle::centroid_accuracy(select(cohort(), a, m)) >= 0.99);
      const auto* cell = result.accuracy.find(a, m);
      REQUIRE(cell);
      CHECK(cell->accuracy >= 0.99);
    }
  CHECK(result.attack.size() == 12);
  CHECK(result.gate.size() == 12);
  CHECK(result.thresholds.id.size() == 12);
  CHECK(result.thresholds.auth.size() == 36);
  for (const auto& [key, tau] : result.thresholds.auth) CHECK(tau >= kAuthFloor);

  const fs::path dir = fs::temp_directory_path() / "motioncred_test_report";
  fs::remove_all(dir);
  const auto files = write_report_bundle(dir.string(), result, cfg);
  for (const char* name : {"accuracy_table.csv", "probability_stats.csv", "eer_report.csv", "gate_stats.csv",
                           "attack_summary.csv", "thresholds.table", "fig2.svg", "fig3.svg", "fig4.svg",
                           "fig5.svg", "fig6.svg", "fig7.svg", "eer_report.all.csv"}) {
    CAPTURE(name);
    CHECK(std::find(files.begin(), files.end(), name) != files.end());
    CHECK(fs::file_size(dir / name) > 0);
  }

  // Header row first; every real number carries exactly four decimals.
  const std::regex number(R"((^|,)-?\d+\.(\d+)(?=,|$))");
  for (const auto& f : files) {
    if (!f.ends_with(".csv")) continue;
    CAPTURE(f);
    const auto rows = lines(slurp(dir / f));
    REQUIRE(rows.size() >= 2);
    CHECK(std::isalpha(static_cast<unsigned char>(rows[0][0])));
    for (std::size_t r = 1; r < rows.size(); ++r)
      for (std::sregex_iterator it(rows[r].begin(), rows[r].end(), number), end; it != end; ++it)
        CHECK((*it)[2].length() == 4);
  }

  const auto acc = lines(slurp(dir / "accuracy_table.csv"));
  CHECK(acc[0] == "activity,phone-accel,phone-accel+phone-gyro+watch-accel+watch-gyro");
  CHECK(acc.size() == 8);  // header, six activities, average
  CHECK(acc.back().starts_with("Avg,"));
  CHECK(lines(slurp(dir / "eer_report.csv"))[0] == "activity,condition,mean_eer,std_eer,n_subjects");
  const auto gate = lines(slurp(dir / "gate_stats.csv"));
  CHECK(gate[0] == "activity,mask,tau,total_samples,misclassified,misclassified_above_threshold,pass_rate");
  CHECK(gate.size() == 1 + 12 + 2);
  CHECK(slurp(dir / "fig5.svg").starts_with("<svg"));
  CHECK(ThresholdTable::load((dir / "thresholds.table").string()).id == result.thresholds.id);

  // Same inputs, same bytes.
  const fs::path again = dir / "again";
  write_report_bundle(again.string(), run_experiment(cohort(), cfg), cfg);
  for (const auto& f : files) {
    CAPTURE(f);
    CHECK(slurp(dir / f) == slurp(again / f));
  }
  fs::remove_all(dir);
}

TEST_CASE("experiment preconditions") {
  auto cfg = small_config();
  cfg.folds = 2;
  CHECK_THROWS_AS(run_experiment(cohort(), cfg), ConfigurationError);
  cfg = small_config();
  cfg.forest.n_trees = 0;
  CHECK_THROWS_AS(run_experiment(cohort(), cfg), ConfigurationError);
}

TEST_CASE("svg output escapes text") {
  const auto s = svg::bar_chart("a < b & c", "y", {"x\"y"}, {{"s", {0.5}}});
  CHECK(s.find("a &lt; b &amp; c") != std::string::npos);
  CHECK(s.find("x&quot;y") != std::string::npos);
  CHECK(s.find("a < b") == std::string::npos);
}
