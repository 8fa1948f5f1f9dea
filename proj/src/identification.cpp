#include "motioncred/identification.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "motioncred/error.hpp"
#include "motioncred/folds.hpp"
#include "motioncred/report_format.hpp"

namespace motioncred {

DecisionForest train_identification(const FeatureSet& slice, const ForestParams& params,
                                    std::uint64_t seed, int threads) {
  if (slice.roster().size() < 2)
    throw TrainingError("identification needs at least two subjects for activity " +
                        std::string(1, activity_code(slice.activity)));
  return train_forest(slice.X, slice.subjects, params, seed, threads);
}

DecisionForest train_identification(const std::vector<FeatureVector>& table, Activity activity,
                                    SensorMask mask, const ForestParams& params, std::uint64_t seed,
                                    int threads) {
  return train_identification(select(table, activity, mask), params, seed, threads);
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw ShapeError("prediction and truth lengths differ");
  if (truth.empty()) throw EmptySliceError("accuracy of an empty sample set");
  std::size_t ok = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) ok += predicted[i] == truth[i];
  return static_cast<double>(ok) / static_cast<double>(truth.size());
}

void AccuracyTable::set(Activity a, SensorMask m, CellResult cell) { cells_[{a, m}] = std::move(cell); }

const CellResult* AccuracyTable::find(Activity a, SensorMask m) const {
  auto it = cells_.find({a, m});
  return it == cells_.end() ? nullptr : &it->second;
}

std::vector<SensorMask> AccuracyTable::masks() const {
  std::vector<SensorMask> out;
  for (const auto& [key, cell] : cells_)
    if (std::find(out.begin(), out.end(), key.second) == out.end()) out.push_back(key.second);
  std::sort(out.begin(), out.end());
  return out;
}

double AccuracyTable::average(SensorMask m) const {
  double sum = 0;
  int n = 0;
  for (const auto& [key, cell] : cells_)
    if (key.second == m) {
      sum += cell.accuracy;
      ++n;
    }
  if (n == 0) throw EmptySliceError("no accuracy cells for mask " + m.to_string());
  return sum / n;
}

void AccuracyTable::write_csv(std::ostream& out) const {
  const auto ms = masks();
  out << "activity";
  for (auto m : ms) out << ',' << m.to_string();
  out << '\n';
  for (Activity a : kAllActivities) {
    bool any = false;
    for (auto m : ms) any = any || find(a, m);
    if (!any) continue;
    out << activity_code(a);
    for (auto m : ms) {
      out << ',';
      if (const auto* c = find(a, m)) out << fixed4(c->accuracy);
    }
    out << '\n';
  }
  out << "Avg";
  for (auto m : ms) out << ',' << fixed4(average(m));
  out << '\n';
}

CellResult cross_validate(const FeatureSet& slice, const ForestParams& params, int k,
                          std::uint64_t seed, int threads) {
  CellResult cell;
  std::map<SubjectId, int> counts;
  for (auto s : slice.subjects) ++counts[s];
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < slice.size(); ++i)
    if (counts[slice.subjects[static_cast<std::size_t>(i)]] >= k) keep.push_back(i);
  for (const auto& [s, n] : counts)
    if (n < k) cell.dropped_subjects.push_back(s);

  const FeatureSet data = slice.subset(keep);
  const auto roster = data.roster();
  if (roster.size() < 2)
    throw TrainingError("fewer than two subjects with at least " + std::to_string(k) +
                        " windows for activity " + std::string(1, activity_code(slice.activity)));
  cell.n_subjects = static_cast<int>(roster.size());
  cell.n_samples = static_cast<int>(data.size());

  const auto folds = stratified_folds(data.subjects, k, seed);
  for (int f = 0; f < k; ++f) {
    const FeatureSet train = data.subset(folds.train_indices(f));
    const FeatureSet test = data.subset(folds.test_indices(f));
    const auto forest = train_identification(train, params, seed + static_cast<std::uint64_t>(f), threads);
    std::vector<int> predicted;
    for (Eigen::Index i = 0; i < test.size(); ++i) predicted.push_back(forest.predict(test.X.row(i).transpose()));
    cell.fold_accuracy.push_back(accuracy(predicted, test.subjects));
  }
  cell.accuracy = std::accumulate(cell.fold_accuracy.begin(), cell.fold_accuracy.end(), 0.0) / k;
  return cell;
}

AccuracyTable evaluate_identification(const std::vector<FeatureVector>& table,
                                      const std::vector<Activity>& activities,
                                      const std::vector<SensorMask>& masks,
                                      const ForestParams& params, int k, std::uint64_t seed,
                                      int threads) {
  AccuracyTable out;
  for (auto m : masks)
    for (auto a : activities) out.set(a, m, cross_validate(select(table, a, m), params, k, seed, threads));
  return out;
}

const char* condition_name(Condition c) { return c == Condition::Benign ? "benign" : "adversarial"; }

ProbabilityStats summarize_confidence(std::vector<double> confidence, std::vector<bool> correct) {
  if (confidence.empty()) throw EmptySliceError("probability statistics of an empty sample set");
  if (!correct.empty() && correct.size() != confidence.size())
    throw ShapeError("confidence and correctness lengths differ");
  ProbabilityStats s;
  const double n = static_cast<double>(confidence.size());
  s.mean = std::accumulate(confidence.begin(), confidence.end(), 0.0) / n;
  double ss = 0;
  for (double c : confidence) {
    ss += (c - s.mean) * (c - s.mean);
    const int bin = std::clamp(static_cast<int>(c * ProbabilityStats::kBins), 0, ProbabilityStats::kBins - 1);
    ++s.histogram[static_cast<std::size_t>(bin)];
  }
  s.std = std::sqrt(ss / n);
  s.confidence = std::move(confidence);
  s.correct = std::move(correct);
  return s;
}

ProbabilityStats probability_stats(const DecisionForest& model, const Eigen::MatrixXd& X,
                                   const std::vector<int>& truth) {
  if (!truth.empty() && truth.size() != static_cast<std::size_t>(X.rows()))
    throw ShapeError("truth labels do not match sample count");
  std::vector<double> top;
  std::vector<bool> correct;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const ProbabilityVector p = model.predict_proba(X.row(i).transpose());
    const auto j = argmax(p);
    top.push_back(p[j]);
    if (!truth.empty())
      correct.push_back(model.classes()[static_cast<std::size_t>(j)] == truth[static_cast<std::size_t>(i)]);
  }
  return summarize_confidence(std::move(top), std::move(correct));
}

}  // namespace motioncred
