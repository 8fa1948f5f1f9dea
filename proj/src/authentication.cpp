#include "motioncred/authentication.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "motioncred/error.hpp"
#include "motioncred/random.hpp"
#include "motioncred/report_format.hpp"

namespace motioncred {

namespace {

constexpr std::size_t kMinGenuine = 10;

std::vector<Eigen::Index> take(std::vector<Eigen::Index> rows, std::size_t n, Rng& rng) {
  shuffle(rows, rng);
  rows.resize(n);
  return rows;
}

FeatureSet concat(const FeatureSet& slice, std::vector<Eigen::Index> a, const std::vector<Eigen::Index>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return slice.subset(a);
}

}  // namespace

AuthSplit build_auth_split(const FeatureSet& slice, SubjectId subject, std::uint64_t seed) {
  const std::string what = "subject " + std::to_string(subject) + " activity " +
                           std::string(1, activity_code(slice.activity));
  std::vector<Eigen::Index> genuine;
  std::map<SubjectId, std::vector<Eigen::Index>> others;
  for (Eigen::Index i = 0; i < slice.size(); ++i) {
    const auto s = slice.subjects[static_cast<std::size_t>(i)];
    (s == subject ? genuine : others[s]).push_back(i);
  }
  if (genuine.size() < kMinGenuine)
    throw SplitError(what + ": " + std::to_string(genuine.size()) + " genuine windows, need " +
                     std::to_string(kMinGenuine));
  if (others.size() < 2) throw SplitError(what + ": needs at least two other subjects");

  Rng rng = derive_rng(seed, {static_cast<std::uint64_t>(subject),
                              static_cast<std::uint64_t>(activity_code(slice.activity))});
  shuffle(genuine, rng);
  const std::size_t n_train = (7 * genuine.size() + 5) / 10;
  const std::vector<Eigen::Index> gen_train(genuine.begin(), genuine.begin() + static_cast<std::ptrdiff_t>(n_train));
  const std::vector<Eigen::Index> gen_test(genuine.begin() + static_cast<std::ptrdiff_t>(n_train), genuine.end());

  std::vector<SubjectId> ids;
  for (const auto& [s, rows] : others) ids.push_back(s);
  shuffle(ids, rng);
  const auto half = static_cast<std::ptrdiff_t>((ids.size() + 1) / 2);
  AuthSplit split;
  split.subject = subject;
  split.activity = slice.activity;
  split.mask = slice.mask;
  split.train_imposter_ids.assign(ids.begin(), ids.begin() + half);
  split.test_imposter_ids.assign(ids.begin() + half, ids.end());
  std::sort(split.train_imposter_ids.begin(), split.train_imposter_ids.end());
  std::sort(split.test_imposter_ids.begin(), split.test_imposter_ids.end());

  auto pool = [&](const std::vector<SubjectId>& group, std::size_t need, const char* side) {
    std::vector<Eigen::Index> rows;
    for (auto s : group) rows.insert(rows.end(), others[s].begin(), others[s].end());
    if (rows.size() < need)
      throw SplitError(what + ": " + side + " imposter pool has " + std::to_string(rows.size()) +
                       " windows, need " + std::to_string(need));
    return take(std::move(rows), need, rng);
  };
  const auto imp_train = pool(split.train_imposter_ids, gen_train.size(), "train");
  const auto imp_test = pool(split.test_imposter_ids, gen_test.size(), "test");

  split.train = concat(slice, gen_train, imp_train);
  split.test = concat(slice, gen_test, imp_test);
  split.train_label.assign(gen_train.size(), kGenuine);
  split.train_label.resize(gen_train.size() + imp_train.size(), kImposter);
  split.test_label.assign(gen_test.size(), kGenuine);
  split.test_label.resize(gen_test.size() + imp_test.size(), kImposter);
  return split;
}

AuthSplit build_auth_split(const std::vector<FeatureVector>& table, SubjectId subject,
                           Activity activity, SensorMask mask, std::uint64_t seed) {
  return build_auth_split(select(table, activity, mask), subject, seed);
}

DecisionForest train_authentication(const AuthSplit& split, const ForestParams& params,
                                    std::uint64_t seed, int threads) {
  return train_forest(split.train.X, split.train_label, params, seed, threads);
}

std::vector<double> genuine_scores(const DecisionForest& model, const Eigen::MatrixXd& X) {
  const auto g = model.class_index(kGenuine);
  if (g < 0) throw ShapeError("model has no genuine class");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) out.push_back(model.predict_proba(X.row(i).transpose())[g]);
  return out;
}

std::pair<RocCurve, double> roc_and_eer(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw ShapeError("score and label lengths differ");
  std::vector<std::pair<double, int>> s;
  std::size_t n_gen = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw ShapeError("non-finite score");
    const bool gen = labels[i] == kGenuine;
    n_gen += gen;
    s.emplace_back(scores[i], gen ? 1 : 0);
  }
  const std::size_t n_imp = s.size() - n_gen;
  if (n_gen == 0 || n_imp == 0) throw EmptySliceError("ROC needs both genuine and imposter scores");
  std::sort(s.begin(), s.end());

  std::vector<double> thresholds{0.0, 1.0};
  for (const auto& p : s) thresholds.push_back(p.first);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  // Sweep: everything below the threshold is rejected.
  RocCurve roc;
  std::size_t pos = 0, gen_below = 0, imp_below = 0;
  for (double t : thresholds) {
    for (; pos < s.size() && s[pos].first < t; ++pos) (s[pos].second ? gen_below : imp_below)++;
    roc.points.push_back({t, static_cast<double>(n_imp - imp_below) / static_cast<double>(n_imp),
                          static_cast<double>(gen_below) / static_cast<double>(n_gen)});
  }

  double prev_far = roc.points.front().far, prev_frr = roc.points.front().frr;
  auto crossing = [&](double far, double frr) {
    const double d0 = prev_far - prev_frr, d1 = far - frr;
    if (d1 == 0.0) return far;
    const double t = d0 / (d0 - d1);
    return prev_far + t * (far - prev_far);
  };
  for (std::size_t j = 0; j < roc.points.size(); ++j) {
    const auto& p = roc.points[j];
    if (p.far - p.frr <= 0) return {roc, j == 0 ? p.far : crossing(p.far, p.frr)};
    prev_far = p.far;
    prev_frr = p.frr;
  }
  return {roc, crossing(0.0, 1.0)};
}

ProbabilityStats auth_probability_stats(const DecisionForest& model, const Eigen::MatrixXd& X,
                                        const std::vector<int>& labels) {
  return probability_stats(model, X, labels);
}

void EerReport::add(Activity a, Condition c, SubjectId subject, double eer) {
  values_[{a, c, subject}] = eer;
}

std::vector<EerReport::Row> EerReport::rows() const {
  std::map<std::pair<Activity, Condition>, std::vector<double>> groups;
  for (const auto& [key, eer] : values_) groups[{std::get<0>(key), std::get<1>(key)}].push_back(eer);
  std::vector<Row> out;
  for (const auto& [key, v] : groups) {
    double mean = 0, ss = 0;
    for (double e : v) mean += e;
    mean /= static_cast<double>(v.size());
    for (double e : v) ss += (e - mean) * (e - mean);
    out.push_back({key.first, key.second, mean, std::sqrt(ss / static_cast<double>(v.size())),
                   static_cast<int>(v.size())});
  }
  return out;
}

double EerReport::mean(Activity a, Condition c) const {
  for (const auto& r : rows())
    if (r.activity == a && r.condition == c) return r.mean_eer;
  throw EmptySliceError(std::string("no EER values for activity ") + activity_code(a) + " " + condition_name(c));
}

void EerReport::write_csv(std::ostream& out) const {
  out << "activity,condition,mean_eer,std_eer,n_subjects\n";
  for (const auto& r : rows())
    out << activity_code(r.activity) << ',' << condition_name(r.condition) << ',' << fixed4(r.mean_eer)
        << ',' << fixed4(r.std_eer) << ',' << r.n_subjects << '\n';
}

}  // namespace motioncred
