#include "motioncred/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "motioncred/error.hpp"
#include "motioncred/features.hpp"
#include "motioncred/folds.hpp"
#include "motioncred/random.hpp"

namespace fs = std::filesystem;

namespace motioncred {

std::vector<FeatureVector> ingest_readings(const std::map<SensorSource, std::vector<SensorReading>>& readings,
                                           IngestSummary* summary) {
  std::vector<FeatureVector> out;
  for (const auto& [source, list] : readings) {
    const auto w = window(list);
    if (summary) {
      summary->readings += list.size();
      summary->discarded += w.discarded;
      for (const auto& [key, n] : count_windows(w.windows)) summary->window_counts[key] += n;
    }
    auto rows = extract_all(w.windows);
    out.insert(out.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  return out;
}

std::vector<FeatureVector> ingest_paths(const std::vector<std::string>& paths, IngestSummary* summary) {
  std::vector<std::string> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> found;
      for (const auto& e : fs::recursive_directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".txt" && source_from_path(e.path().string()))
          found.push_back(e.path().string());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      if (!source_from_path(p)) throw IngestError("cannot tell the sensor source of '" + p + "' from its path");
      files.push_back(p);
    } else {
      throw IngestError("no such file or directory '" + p + "'");
    }
  }
  if (files.empty()) throw IngestError("no raw sensor logs found");

  std::map<SensorSource, std::vector<SensorReading>> readings;
  IngestSummary local;
  for (const auto& f : files) {
    const auto source = *source_from_path(f);
    auto parsed = parse_raw_file(f, source);
    local.malformed += parsed.malformed;
    auto& dst = readings[source];
    dst.insert(dst.end(), parsed.readings.begin(), parsed.readings.end());
  }
  local.files = files.size();
  auto out = ingest_readings(readings, &local);
  if (summary) *summary = std::move(local);
  return out;
}

void write_raw_logs(const std::string& dir, const std::map<SensorSource, std::vector<SensorReading>>& readings) {
  for (const auto& [source, list] : readings) {
    const bool phone = source == SensorSource::PhoneAccel || source == SensorSource::PhoneGyro;
    const bool accel = source == SensorSource::PhoneAccel || source == SensorSource::WatchAccel;
    const std::string device = phone ? "phone" : "watch", kind = accel ? "accel" : "gyro";
    const fs::path sub = fs::path(dir) / "raw" / device / kind;
    fs::create_directories(sub);
    std::map<SubjectId, std::ofstream> files;
    for (const auto& r : list) {
      auto it = files.find(r.subject);
      if (it == files.end()) {
        const auto path = sub / ("data_" + std::to_string(r.subject) + "_" + kind + "_" + device + ".txt");
        it = files.emplace(r.subject, std::ofstream(path)).first;
        if (!it->second) throw PersistenceError("cannot write '" + path.string() + "'");
      }
      it->second << serialize(r) << '\n';
    }
  }
}

GateStats ExperimentResult::gate_total(SensorMask m) const {
  GateStats t;
  for (const auto& [key, g] : gate)
    if (key.second == m) {
      t.total_samples += g.total_samples;
      t.misclassified += g.misclassified;
      t.misclassified_above_threshold += g.misclassified_above_threshold;
    }
  t.pass_rate = t.misclassified == 0 ? 0.0
                                     : static_cast<double>(t.misclassified_above_threshold) /
                                           static_cast<double>(t.misclassified);
  return t;
}

namespace {

std::uint64_t sub_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
  return derive_rng(master, tags)();
}

std::uint64_t tag(Activity a, SensorMask m) {
  return static_cast<std::uint64_t>(activity_code(a)) << 8 | m.bits();
}

QueryFn as_query(const DecisionForest& f) {
  return [&f](const Eigen::VectorXd& x) { return f.predict_proba(x); };
}

std::vector<Eigen::Index> class_indices(const DecisionForest& f, const std::vector<int>& labels) {
  std::vector<Eigen::Index> out;
  for (int l : labels) {
    const auto c = f.class_index(l);
    if (c < 0) throw TrainingError("label " + std::to_string(l) + " unknown to the model");
    out.push_back(c);
  }
  return out;
}

AttackConfig fitted(const AttackConfig& base, const Eigen::MatrixXd& train, std::uint64_t seed) {
  AttackConfig cfg = base;
  cfg.fit_to_training_data(train);
  cfg.seed = seed;
  return cfg;
}

AttackSummary summarize(const AttackDatasetResult& r) {
  AttackSummary s;
  s.n = r.results.size();
  s.accuracy_before = r.accuracy_before;
  s.accuracy_after = r.accuracy_after;
  s.success_rate = r.success_rate;
  double q = 0;
  for (const auto& x : r.results) q += static_cast<double>(x.queries);
  s.mean_queries = s.n ? q / static_cast<double>(s.n) : 0.0;
  return s;
}

void append(std::vector<double>& conf, std::vector<bool>& ok, const ProbabilityStats& s) {
  conf.insert(conf.end(), s.confidence.begin(), s.confidence.end());
  ok.insert(ok.end(), s.correct.begin(), s.correct.end());
}

double calibrate_or_ceiling(const ProbabilityStats& benign, const ProbabilityStats& adv, double floor,
                            ThresholdPolicy policy, const std::string& what, ExperimentResult& out) {
  try {
    return calibrate_threshold(benign, adv, floor, policy);
  } catch (const CalibrationError& e) {
    out.calibration_failures.push_back(what + ": " + e.what());
    return kThresholdCeiling;
  }
}

void identification_attack(const FeatureSet& slice, const ExperimentConfig& cfg, ExperimentResult& out) {
  const SliceKey key{slice.activity, slice.mask};
  const auto t = tag(slice.activity, slice.mask);
  std::map<SubjectId, int> counts;
  for (auto s : slice.subjects) ++counts[s];
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < slice.size(); ++i)
    if (counts[slice.subjects[static_cast<std::size_t>(i)]] >= cfg.folds) keep.push_back(i);
  const FeatureSet data = slice.subset(keep);

  const auto folds = stratified_folds(data.subjects, cfg.folds, sub_seed(cfg.seed, {1, t}));
  std::vector<Eigen::Index> train_rows, calib_rows, eval_rows;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const int f = folds.fold_of[static_cast<std::size_t>(i)];
    (f == 0 ? eval_rows : f == 1 ? calib_rows : train_rows).push_back(i);
  }
  const FeatureSet train = data.subset(train_rows), calib = data.subset(calib_rows), eval = data.subset(eval_rows);
  const auto model = train_identification(train, cfg.forest, sub_seed(cfg.seed, {2, t}), cfg.threads);
  const auto query = as_query(model);
  const auto attack_cfg = fitted(cfg.attack, train.X, sub_seed(cfg.seed, {3, t}));

  const auto calib_adv = attack_dataset(query, calib.X, class_indices(model, calib.subjects), attack_cfg, cfg.threads);
  const auto calib_b = probability_stats(model, calib.X, calib.subjects);
  const auto calib_a = probability_stats(model, calib_adv.adversarial, calib.subjects);
  const double floor = 1.0 / static_cast<double>(model.n_classes());
  const double tau = calibrate_or_ceiling(calib_b, calib_a, floor, cfg.policy,
                                          std::string("identification ") + activity_code(slice.activity) + " " +
                                              slice.mask.to_string(),
                                          out);
  out.thresholds.id[key] = tau;

  const auto eval_adv = attack_dataset(query, eval.X, class_indices(model, eval.subjects), attack_cfg, cfg.threads);
  out.attack[key] = summarize(eval_adv);
  out.id_benign[key] = probability_stats(model, eval.X, eval.subjects);
  out.id_adversarial[key] = probability_stats(model, eval_adv.adversarial, eval.subjects);
  out.gate[key] = gate_stats(model, eval_adv.adversarial, eval.subjects, tau);
}

void authentication_attack(const FeatureSet& slice, const ExperimentConfig& cfg, ExperimentResult& out) {
  const SliceKey key{slice.activity, slice.mask};
  const auto t = tag(slice.activity, slice.mask);
  std::map<SubjectId, int> counts;
  for (auto s : slice.subjects) ++counts[s];
  std::vector<SubjectId> eligible;
  for (const auto& [s, n] : counts)
    if (n >= 10) eligible.push_back(s);
  if (cfg.auth_subjects > 0 && eligible.size() > static_cast<std::size_t>(cfg.auth_subjects))
    eligible.resize(static_cast<std::size_t>(cfg.auth_subjects));

  std::vector<double> bc, ac, mc;
  std::vector<bool> bo, ao, mo;
  auto& eer = out.eer[slice.mask];
  for (auto s : eligible) {
    const auto subject_tag = static_cast<std::uint64_t>(s);
    AuthSplit split;
    try {
      split = build_auth_split(slice, s, sub_seed(cfg.seed, {4, t}));
    } catch (const SplitError&) {
      continue;  // imposter pool too small for this subject
    }
    const auto model = train_authentication(split, cfg.forest, sub_seed(cfg.seed, {5, t, subject_tag}), cfg.threads);
    const auto attack_cfg = fitted(cfg.attack, split.train.X, sub_seed(cfg.seed, {6, t, subject_tag}));
    const auto adv = attack_dataset(as_query(model), split.test.X, class_indices(model, split.test_label),
                                    attack_cfg, cfg.threads);

    eer.add(slice.activity, Condition::Benign, s, roc_and_eer(genuine_scores(model, split.test.X), split.test_label).second);
    eer.add(slice.activity, Condition::Adversarial, s,
            roc_and_eer(genuine_scores(model, adv.adversarial), split.test_label).second);

    const auto b = auth_probability_stats(model, split.test.X, split.test_label);
    const auto a = auth_probability_stats(model, adv.adversarial, split.test_label);
    append(bc, bo, b);
    append(ac, ao, a);
    for (std::size_t i = 0; i < a.confidence.size(); ++i)
      if (!a.correct[i]) {
        mc.push_back(a.confidence[i]);
        mo.push_back(false);
      }
    out.thresholds.auth[{s, slice.activity, slice.mask}] = calibrate_or_ceiling(
        b, a, kAuthFloor, cfg.policy,
        "authentication " + std::to_string(s) + " " + activity_code(slice.activity) + " " + slice.mask.to_string(),
        out);
  }
  if (!bc.empty()) {
    out.auth_benign[key] = summarize_confidence(bc, bo);
    out.auth_adversarial[key] = summarize_confidence(ac, ao);
  }
  if (!mc.empty()) out.auth_adversarial_misclassified[key] = summarize_confidence(mc, mo);
}

}  // namespace

ExperimentResult run_experiment(const std::vector<FeatureVector>& table, const ExperimentConfig& cfg,
                                const std::function<void(const std::string&)>& log) {
  cfg.forest.validate();
  if (cfg.folds < 3) throw ConfigurationError("experiment needs at least 3 folds");
  auto note = [&](const std::string& s) {
    if (log) log(s);
  };

  ExperimentResult out;
  for (auto m : cfg.masks)
    for (auto a : cfg.activities) {
      note(std::string("identification ") + activity_code(a) + " " + m.to_string());
      out.accuracy.set(a, m, cross_validate(select(table, a, m), cfg.forest, cfg.folds,
                                            sub_seed(cfg.seed, {0, tag(a, m)}), cfg.threads));
    }
  for (auto m : cfg.masks)
    for (auto a : cfg.detail_activities) {
      const auto slice = select(table, a, m);
      note(std::string("attack ") + activity_code(a) + " " + m.to_string());
      identification_attack(slice, cfg, out);
      note(std::string("authentication ") + activity_code(a) + " " + m.to_string());
      authentication_attack(slice, cfg, out);
    }
  return out;
}

}  // namespace motioncred
