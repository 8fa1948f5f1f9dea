// motioncred: command-line driver for the behavioral-biometrics pipeline.
//
//   synth     -> raw logs for a synthetic cohort
//   ingest    -> canonical feature file
//   split     -> train / calibration / test feature files
//   train     -> <dir>/models/id/*.model, <dir>/models/auth/*.model
//   attack    -> adversarial feature file plus sidecar
//   calibrate -> <dir>/thresholds.table
//   evaluate  -> report bundle (CSV tables and SVG figures)
//   verify    -> one decision; exit 0 verified, 10 fallback, 11 rejected

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "motioncred/config.hpp"
#include "motioncred/error.hpp"
#include "motioncred/experiment.hpp"
#include "motioncred/folds.hpp"
#include "motioncred/random.hpp"
#include "motioncred/report.hpp"
#include "motioncred/report_format.hpp"
#include "motioncred/synth.hpp"

namespace fs = std::filesystem;
using namespace motioncred;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string mask;
  std::string activity;
  std::string out;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Common& c, bool with_config = true) {
  if (with_config) cmd->add_option("--config", c.config, "JSON run configuration")->envname("MOTIONCRED_CONFIG");
  cmd->add_option("--seed", c.seed, "master seed (overrides the config)")->envname("MOTIONCRED_SEED");
  cmd->add_option("--mask", c.mask, "sensor mask: phone-accel, all-accel, all or a '+'-joined list")
      ->envname("MOTIONCRED_MASK");
  cmd->add_option("--activity", c.activity, "restrict to one activity code")->envname("MOTIONCRED_ACTIVITY");
  cmd->add_option("--out", c.out, "output path")->envname("MOTIONCRED_OUT");
  cmd->add_option("--threads", c.threads, "worker threads, 0 = all cores")->envname("MOTIONCRED_THREADS");
}

RunConfig load_config(const Common& c) {
  if (c.config.empty()) throw ConfigurationError("--config is required");
  auto cfg = RunConfig::load(c.config, c.seed);
  if (c.threads) cfg.threads = *c.threads;
  if (!c.mask.empty()) cfg.sensor_masks = {SensorMask::parse(c.mask)};
  if (!c.activity.empty()) {
    const auto a = parse_activity(c.activity);
    cfg.activities = {a};
    cfg.detail_activities = {a};
  }
  cfg.validate();
  return cfg;
}

std::uint64_t tag(Activity a, SensorMask m) {
  return static_cast<std::uint64_t>(activity_code(a)) << 8 | m.bits();
}

std::uint64_t sub_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
  return derive_rng(master, tags)();
}

std::string slice_name(Activity a, SensorMask m) { return std::string(1, activity_code(a)) + "_" + mask_label(m); }

fs::path id_model_path(const fs::path& root, Activity a, SensorMask m) {
  return root / "models" / "id" / (slice_name(a, m) + ".model");
}

fs::path auth_model_path(const fs::path& root, SubjectId s, Activity a, SensorMask m) {
  return root / "models" / "auth" / (std::to_string(s) + "_" + slice_name(a, m) + ".model");
}

// Subjects with an authentication model for the slice, read from file names.
std::vector<SubjectId> auth_subjects_on_disk(const fs::path& root, Activity a, SensorMask m) {
  std::vector<SubjectId> out;
  const fs::path dir = root / "models" / "auth";
  if (!fs::is_directory(dir)) return out;
  const std::string suffix = "_" + slice_name(a, m) + ".model";
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.size() > suffix.size() && name.ends_with(suffix))
      out.push_back(std::stoi(name.substr(0, name.size() - suffix.size())));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<FeatureSet> try_select(const std::vector<FeatureVector>& table, Activity a, SensorMask m) {
  try {
    return select(table, a, m);
  } catch (const EmptySliceError&) {
    return std::nullopt;
  }
}

std::vector<FeatureVector> feature_table(const RunConfig& cfg, const std::string& override_path) {
  const std::string path = override_path.empty() ? cfg.features : override_path;
  if (path.empty()) throw ConfigurationError("no feature file: set 'features' in the config or pass --features");
  return read_feature_file(path);
}

// ---------------------------------------------------------------------------

int cmd_synth(const Common& c, int subjects, double seconds, const std::vector<std::string>& activities) {
  if (c.out.empty()) throw ConfigurationError("--out is required");
  if (!c.seed) throw ConfigurationError("--seed is required");
  SynthRawConfig sc;
  sc.n_subjects = subjects;
  sc.seconds_per_activity = seconds;
  sc.seed = *c.seed;
  if (!activities.empty()) {
    sc.activities.clear();
    for (const auto& a : activities) sc.activities.push_back(parse_activity(a));
  }
  const auto readings = synth_raw(sc);
  write_raw_logs(c.out, readings);
  std::size_t n = 0;
  for (const auto& [_, list] : readings) n += list.size();
  std::cout << "wrote " << n << " readings for " << subjects << " subjects under " << (fs::path(c.out) / "raw").string()
            << "\n";
  return 0;
}

int cmd_ingest(const Common& c, const std::vector<std::string>& paths) {
  if (c.out.empty()) throw ConfigurationError("--out is required");
  IngestSummary summary;
  const auto rows = ingest_paths(paths, &summary);
  std::cout << "subject,activity,source,windows\n";
  for (const auto& [key, n] : summary.window_counts) {
    const auto& [s, a, src] = key;
    std::cout << s << ',' << activity_code(a) << ',' << source_name(src) << ',' << n << '\n';
  }
  write_feature_file(c.out, rows);
  std::cerr << summary.files << " files, " << summary.readings << " readings, " << summary.malformed
            << " malformed lines, " << summary.discarded << " readings in partial windows, " << rows.size()
            << " feature rows -> " << c.out << "\n";
  return 0;
}

// Windows are keyed by (subject, activity, window_index) so every source of a
// window lands in the same part and fusion still works after the split.
int cmd_split(const Common& c, const std::string& input, int folds) {
  if (c.out.empty()) throw ConfigurationError("--out is required");
  if (!c.seed) throw ConfigurationError("--seed is required");
  if (folds < 3) throw ConfigurationError("--folds must be >= 3");
  const auto table = read_feature_file(input);
  using Key = std::tuple<SubjectId, Activity, int>;
  std::map<Activity, std::vector<Key>> keys;
  {
    std::set<Key> seen;
    for (const auto& r : table)
      if (seen.insert({r.subject, r.activity, r.window_index}).second)
        keys[r.activity].push_back({r.subject, r.activity, r.window_index});
  }
  std::map<Key, int> part;  // 0 test, 1 calibration, 2 train
  for (auto& [a, list] : keys) {
    std::map<SubjectId, int> counts;
    for (const auto& k : list) ++counts[std::get<0>(k)];
    std::vector<Key> eligible;
    for (const auto& k : list) {
      if (counts[std::get<0>(k)] >= folds) eligible.push_back(k);
      else part[k] = 2;  // too few windows to hold any out
    }
    if (eligible.empty()) continue;
    std::vector<int> labels;
    for (const auto& k : eligible) labels.push_back(std::get<0>(k));
    const auto f = stratified_folds(labels, folds, sub_seed(*c.seed, {7, static_cast<std::uint64_t>(activity_code(a))}));
    for (std::size_t i = 0; i < eligible.size(); ++i) part[eligible[i]] = std::min(f.fold_of[i], 2);
  }
  std::vector<FeatureVector> parts[3];
  for (const auto& r : table) parts[part.at({r.subject, r.activity, r.window_index})].push_back(r);
  fs::create_directories(c.out);
  const char* names[3] = {"test.csv", "calibration.csv", "train.csv"};
  for (int p = 0; p < 3; ++p) {
    write_feature_file((fs::path(c.out) / names[p]).string(), parts[p]);
    std::cout << names[p] << ' ' << parts[p].size() << " rows\n";
  }
  return 0;
}

int cmd_train(const Common& c, const std::string& features) {
  const auto cfg = load_config(c);
  const auto table = feature_table(cfg, features);
  const fs::path root = c.out.empty() ? fs::path(cfg.output_dir) : fs::path(c.out);
  fs::create_directories(root / "models" / "id");
  fs::create_directories(root / "models" / "auth");
  int id_models = 0, auth_models = 0;
  for (auto m : cfg.sensor_masks)
    for (auto a : cfg.activities) {
      const auto slice = try_select(table, a, m);
      if (!slice) {
        std::cerr << "skip " << slice_name(a, m) << ": no rows\n";
        continue;
      }
      const auto t = tag(a, m);
      train_identification(*slice, cfg.forest, sub_seed(*cfg.seed, {2, t}), cfg.threads)
          .save(id_model_path(root, a, m).string());
      ++id_models;
      std::map<SubjectId, int> counts;
      for (auto s : slice->subjects) ++counts[s];
      int n_auth = 0;
      for (const auto& [s, n] : counts) {
        if (n < 10) continue;
        if (cfg.auth_subjects > 0 && n_auth >= cfg.auth_subjects) break;
        AuthSplit split;
        try {
          split = build_auth_split(*slice, s, sub_seed(*cfg.seed, {4, t}));
        } catch (const SplitError& e) {
          std::cerr << "skip authentication model " << s << ' ' << slice_name(a, m) << ": " << e.what() << "\n";
          continue;
        }
        train_authentication(split, cfg.forest, sub_seed(*cfg.seed, {5, t, static_cast<std::uint64_t>(s)}),
                             cfg.threads)
            .save(auth_model_path(root, s, a, m).string());
        ++auth_models;
        ++n_auth;
      }
      std::cerr << "trained " << slice_name(a, m) << "\n";
    }
  std::cout << id_models << " identification models, " << auth_models << " authentication models under "
            << (root / "models").string() << "\n";
  return 0;
}

// Feature files hold one width, so each mask gets its own output; with more
// than one mask the label goes before the extension.
int cmd_attack(const Common& c, const std::string& model_dir, const std::string& input) {
  const auto cfg = load_config(c);
  if (c.out.empty()) throw ConfigurationError("--out is required");
  const auto table = read_feature_file(input);
  int written = 0;
  for (auto m : cfg.sensor_masks) {
    std::vector<FeatureVector> adversarial;
    std::ostringstream sidecar;
    sidecar << "sample_id,success,queries,final_loss\n";
    for (auto a : cfg.activities) {
      const auto path = id_model_path(model_dir, a, m);
      if (!fs::exists(path)) continue;
      const auto slice = try_select(table, a, m);
      if (!slice) continue;
      const auto model = DecisionForest::load(path.string());
      std::vector<Eigen::Index> rows;
      std::vector<Eigen::Index> truth;
      for (Eigen::Index i = 0; i < slice->size(); ++i) {
        const auto ci = model.class_index(slice->subjects[static_cast<std::size_t>(i)]);
        if (ci < 0) continue;  // subject not enrolled in this model
        rows.push_back(i);
        truth.push_back(ci);
      }
      if (rows.empty()) continue;
      const auto data = slice->subset(rows);
      // The attacker bounds and scales its steps from the data it holds.
      AttackConfig ac = cfg.attack;
      ac.fit_to_training_data(data.X);
      ac.seed = sub_seed(*cfg.seed, {3, tag(a, m)});
      const auto r = attack_dataset([&model](const Eigen::VectorXd& x) { return model.predict_proba(x); }, data.X,
                                    truth, ac, cfg.threads);
      for (Eigen::Index i = 0; i < data.size(); ++i) {
        auto fv = data.row(i);
        fv.values = r.adversarial.row(i).transpose();
        const auto& res = r.results[static_cast<std::size_t>(i)];
        sidecar << adversarial.size() << ',' << (res.success ? 1 : 0) << ',' << res.queries << ','
                << fixed4(res.final_loss) << '\n';
        adversarial.push_back(std::move(fv));
      }
      std::cout << slice_name(a, m) << " n=" << data.size() << " accuracy " << fixed4(r.accuracy_before) << " -> "
                << fixed4(r.accuracy_after) << " success_rate " << fixed4(r.success_rate) << "\n";
    }
    if (adversarial.empty()) continue;
    fs::path out(c.out);
    if (cfg.sensor_masks.size() > 1)
      out = out.parent_path() / (out.stem().string() + "." + mask_label(m) + out.extension().string());
    write_feature_file(out.string(), adversarial);
    const auto sidecar_path = fs::path(out).replace_extension(".sidecar.csv");
    std::ofstream(sidecar_path) << sidecar.str();
    std::cerr << adversarial.size() << " adversarial rows -> " << out.string() << ", " << sidecar_path.string() << "\n";
    ++written;
  }
  if (written == 0) throw ConfigurationError("nothing to attack: no model matches the input rows");
  return 0;
}

int cmd_calibrate(const Common& c, const std::string& model_dir, const std::string& benign_path,
                  const std::vector<std::string>& adversarial_paths) {
  const auto cfg = load_config(c);
  const auto benign = read_feature_file(benign_path);
  std::vector<FeatureVector> adversarial;
  for (const auto& p : adversarial_paths) {
    auto rows = read_feature_file(p);
    adversarial.insert(adversarial.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  const fs::path root(model_dir);
  ThresholdTable table;
  int failures = 0;
  auto calibrate = [&](const ProbabilityStats& b, const ProbabilityStats& a, double floor, const std::string& what) {
    try {
      return calibrate_threshold(b, a, floor, cfg.threshold_policy);
    } catch (const CalibrationError& e) {
      ++failures;
      std::cerr << what << ": " << e.what() << "; using " << fixed4(kThresholdCeiling) << "\n";
      return kThresholdCeiling;
    }
  };
  for (auto m : cfg.sensor_masks)
    for (auto a : cfg.activities) {
      const auto path = id_model_path(root, a, m);
      if (!fs::exists(path)) continue;
      const auto b = try_select(benign, a, m);
      const auto x = try_select(adversarial, a, m);
      if (!b || !x) {
        std::cerr << "skip " << slice_name(a, m) << ": missing benign or adversarial rows\n";
        continue;
      }
      const auto model = DecisionForest::load(path.string());
      const double floor = 1.0 / static_cast<double>(model.n_classes());
      table.id[{a, m}] = calibrate(probability_stats(model, b->X, b->subjects),
                                   probability_stats(model, x->X, x->subjects), floor,
                                   "identification " + slice_name(a, m));
      // Authentication thresholds use the same adversarial rows, transferred
      // to each subject's binary model.
      for (auto s : auth_subjects_on_disk(root, a, m)) {
        const auto auth = DecisionForest::load(auth_model_path(root, s, a, m).string());
        auto labels = [s](const std::vector<SubjectId>& subjects) {
          std::vector<int> out;
          for (auto v : subjects) out.push_back(v == s ? kGenuine : kImposter);
          return out;
        };
        table.auth[{s, a, m}] = calibrate(auth_probability_stats(auth, b->X, labels(b->subjects)),
                                          auth_probability_stats(auth, x->X, labels(x->subjects)), kAuthFloor,
                                          "authentication " + std::to_string(s) + " " + slice_name(a, m));
      }
    }
  const fs::path out = c.out.empty() ? root / "thresholds.table" : fs::path(c.out);
  table.save(out.string());
  std::cout << table.id.size() << " identification and " << table.auth.size() << " authentication thresholds -> "
            << out.string() << " (" << failures << " fell back to the ceiling)\n";
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& features) {
  const auto cfg = load_config(c);
  const auto table = feature_table(cfg, features);
  const std::string dir = c.out.empty() ? (fs::path(cfg.output_dir) / "report").string() : c.out;
  const auto result = run_experiment(table, cfg.experiment(), [](const std::string& s) { std::cerr << s << "\n"; });
  for (const auto& f : write_report_bundle(dir, result, cfg.experiment())) std::cout << (fs::path(dir) / f).string() << "\n";
  for (const auto& f : result.calibration_failures) std::cerr << "calibration fell back to the ceiling: " << f << "\n";
  return 0;
}

int cmd_verify(const Common& c, const std::string& model_dir, std::string thresholds_path, const std::string& sample,
               int row, SubjectId claimed) {
  const fs::path root(model_dir);
  if (thresholds_path.empty()) thresholds_path = (root / "thresholds.table").string();
  const auto thresholds = ThresholdTable::load(thresholds_path);
  auto table = read_feature_file(sample);
  FeatureVector fv;
  if (!c.activity.empty() || !c.mask.empty()) {
    if (c.activity.empty() || c.mask.empty()) throw ConfigurationError("--activity and --mask go together");
    const auto slice = select(table, parse_activity(c.activity), SensorMask::parse(c.mask));
    if (row < 0 || row >= slice.size()) throw ConfigurationError("--row out of range");
    fv = slice.row(row);
  } else {
    if (row < 0 || static_cast<std::size_t>(row) >= table.size()) throw ConfigurationError("--row out of range");
    fv = table[static_cast<std::size_t>(row)];
  }
  ModelSet models;
  if (const auto p = id_model_path(root, fv.activity, fv.mask); fs::exists(p))
    models.id[{fv.activity, fv.mask}] = DecisionForest::load(p.string());
  if (const auto p = auth_model_path(root, claimed, fv.activity, fv.mask); fs::exists(p))
    models.auth[{claimed, fv.activity, fv.mask}] = DecisionForest::load(p.string());
  const auto d = verify(fv, claimed, models, thresholds);
  std::cout << format_decision(d) << "\n";
  return exit_code(d.outcome);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavioral-biometric identification and authentication under black-box attack"};
  app.require_subcommand(1);
  Common common;

  auto* synth = app.add_subcommand("synth", "write raw sensor logs for a synthetic cohort");
  add_common(synth, common, false);
  int subjects = 10;
  double seconds = 120.0;
  std::vector<std::string> synth_activities;
  synth->add_option("--subjects", subjects, "number of subjects")->check(CLI::Range(2, 1000));
  synth->add_option("--seconds", seconds, "seconds per activity")->check(CLI::PositiveNumber);
  synth->add_option("--activities", synth_activities, "activity codes (default all)")->delimiter(',');

  auto* ingest = app.add_subcommand("ingest", "raw logs to a canonical feature file");
  add_common(ingest, common, false);
  std::vector<std::string> paths;
  ingest->add_option("paths", paths, "raw log files or directories")->required();

  auto* split = app.add_subcommand("split", "split a feature file into train, calibration and test parts");
  add_common(split, common, false);
  std::string split_input;
  int split_folds = 10;
  split->add_option("input", split_input, "feature file")->required()->check(CLI::ExistingFile);
  split->add_option("--folds", split_folds, "one fold each for test and calibration, the rest for training");

  std::string features;
  auto* train = app.add_subcommand("train", "train identification and authentication models");
  add_common(train, common);
  train->add_option("--features", features, "feature file (overrides the config)")->check(CLI::ExistingFile);

  std::string model_dir;
  std::string input;
  auto* attack = app.add_subcommand("attack", "black-box attack on the identification models");
  add_common(attack, common);
  attack->add_option("--model-dir", model_dir, "directory written by train")->required()->check(CLI::ExistingDirectory);
  attack->add_option("--input", input, "feature file to perturb")->required()->check(CLI::ExistingFile);

  std::string benign;
  std::vector<std::string> adversarial;
  auto* calibrate = app.add_subcommand("calibrate", "calibrate per-model confidence thresholds");
  add_common(calibrate, common);
  calibrate->add_option("--model-dir", model_dir, "directory written by train")->required()->check(CLI::ExistingDirectory);
  calibrate->add_option("--benign", benign, "benign feature file")->required()->check(CLI::ExistingFile);
  calibrate->add_option("--adversarial", adversarial, "adversarial feature files, one per mask")->required()->check(CLI::ExistingFile);

  auto* evaluate = app.add_subcommand("evaluate", "full experiment and report bundle");
  add_common(evaluate, common);
  evaluate->add_option("--features", features, "feature file (overrides the config)")->check(CLI::ExistingFile);

  std::string thresholds, sample;
  int row = 0;
  SubjectId claimed = 0;
  auto* ver = app.add_subcommand("verify", "two-step verification of one sample");
  add_common(ver, common, false);
  ver->add_option("--model-dir", model_dir, "directory written by train")->required()->check(CLI::ExistingDirectory);
  ver->add_option("--thresholds", thresholds, "threshold table (default <model-dir>/thresholds.table)");
  ver->add_option("--sample", sample, "feature file holding the sample")->required()->check(CLI::ExistingFile);
  ver->add_option("--row", row, "row of the sample file (after --activity/--mask selection)");
  ver->add_option("--claimed", claimed, "claimed subject id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) return cmd_synth(common, subjects, seconds, synth_activities);
    if (*ingest) return cmd_ingest(common, paths);
    if (*split) return cmd_split(common, split_input, split_folds);
    if (*train) return cmd_train(common, features);
    if (*attack) return cmd_attack(common, model_dir, input);
    if (*calibrate) return cmd_calibrate(common, model_dir, benign, adversarial);
    if (*evaluate) return cmd_evaluate(common, features);
    if (*ver) return cmd_verify(common, model_dir, thresholds, sample, row, claimed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
