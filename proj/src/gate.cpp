#include "motioncred/gate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "motioncred/authentication.hpp"
#include "motioncred/error.hpp"

namespace motioncred {

const char* policy_name(ThresholdPolicy p) {
  return p == ThresholdPolicy::Midpoint ? "midpoint" : "benign-percentile";
}

ThresholdPolicy parse_policy(std::string_view text) {
  if (text == "midpoint") return ThresholdPolicy::Midpoint;
  if (text == "benign-percentile") return ThresholdPolicy::BenignPercentile;
  throw ConfigurationError("unknown threshold policy '" + std::string(text) + "'");
}

namespace {

// Linear interpolation between closest ranks.
double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double calibrate_threshold(const ProbabilityStats& benign, const ProbabilityStats& adversarial,
                           double floor, ThresholdPolicy policy) {
  if (benign.confidence.empty() || adversarial.confidence.empty())
    throw CalibrationError("calibration needs benign and adversarial samples");
  if (!(benign.mean > adversarial.mean))
    throw CalibrationError("benign mean " + std::to_string(benign.mean) +
                           " does not exceed adversarial mean " + std::to_string(adversarial.mean));
  double tau = 0;
  if (policy == ThresholdPolicy::Midpoint) {
    tau = (benign.mean + adversarial.mean) / 2;
  } else {
    std::vector<double> ok;
    for (std::size_t i = 0; i < benign.confidence.size(); ++i)
      if (benign.correct.empty() || benign.correct[i]) ok.push_back(benign.confidence[i]);
    if (ok.empty()) throw CalibrationError("no correctly predicted benign samples");
    tau = percentile(std::move(ok), 0.05);
  }
  return std::clamp(tau, floor, kThresholdCeiling);
}

std::optional<double> ThresholdTable::id_threshold(Activity a, SensorMask m) const {
  auto it = id.find({a, m});
  if (it == id.end()) return std::nullopt;
  return it->second;
}

std::optional<double> ThresholdTable::auth_threshold(SubjectId s, Activity a, SensorMask m) const {
  auto it = auth.find({s, a, m});
  if (it == auth.end()) return std::nullopt;
  return it->second;
}

std::string ThresholdTable::to_json() const {
  using nlohmann::json;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "motioncred.thresholds";
  json ids = json::array(), auths = json::array();
  for (const auto& [key, tau] : id)
    ids.push_back({{"activity", std::string(1, activity_code(key.first))}, {"mask", key.second.to_string()}, {"tau", tau}});
  for (const auto& [key, tau] : auth)
    auths.push_back({{"subject", std::get<0>(key)},
                     {"activity", std::string(1, activity_code(std::get<1>(key)))},
                     {"mask", std::get<2>(key).to_string()},
                     {"tau", tau}});
  doc["identification"] = std::move(ids);
  doc["authentication"] = std::move(auths);
  return doc.dump(2);
}

ThresholdTable ThresholdTable::from_json(const std::string& text) {
  using nlohmann::json;
  try {
    const json doc = json::parse(text);
    if (doc.at("kind").get<std::string>() != "motioncred.thresholds")
      throw PersistenceError("document is not a threshold table");
    if (doc.at("schema_version").get<int>() != kSchemaVersion)
      throw PersistenceError("unsupported threshold table schema version");
    auto tau_of = [](const json& j, double lo) {
      const double tau = j.at("tau").get<double>();
      if (!(tau >= lo && tau <= 1.0)) throw PersistenceError("threshold " + std::to_string(tau) + " out of range");
      return tau;
    };
    ThresholdTable t;
    for (const auto& j : doc.at("identification"))
      t.id[{parse_activity(j.at("activity").get<std::string>()), SensorMask::parse(j.at("mask").get<std::string>())}] =
          tau_of(j, 0.0);
    for (const auto& j : doc.at("authentication"))
      t.auth[{j.at("subject").get<SubjectId>(), parse_activity(j.at("activity").get<std::string>()),
              SensorMask::parse(j.at("mask").get<std::string>())}] = tau_of(j, kAuthFloor);
    return t;
  } catch (const json::exception& e) {
    throw PersistenceError(std::string("malformed threshold table: ") + e.what());
  } catch (const ConfigurationError& e) {
    throw PersistenceError(std::string("malformed threshold table: ") + e.what());
  }
}

void ThresholdTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw PersistenceError("cannot write threshold table '" + path + "'");
  out << to_json() << '\n';
}

ThresholdTable ThresholdTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PersistenceError("cannot open threshold table '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Verified: return "verified";
    case Outcome::FallbackSecondFactor: return "fallback-second-factor";
    case Outcome::Rejected: return "rejected";
  }
  return "?";
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::Verified: return 0;
    case Outcome::FallbackSecondFactor: return 10;
    case Outcome::Rejected: return 11;
  }
  return 1;
}

VerificationDecision verify(const Eigen::VectorXd& values, Activity activity, SensorMask mask,
                            SubjectId claimed_subject, const ModelSet& models,
                            const ThresholdTable& thresholds) {
  const std::string where = std::string("activity ") + activity_code(activity) + " mask " + mask.to_string();
  const auto id_model = models.id.find({activity, mask});
  if (id_model == models.id.end()) throw ConfigurationError("no identification model for " + where);
  const auto auth_model = models.auth.find({claimed_subject, activity, mask});
  if (auth_model == models.auth.end())
    throw ConfigurationError("no authentication model for subject " + std::to_string(claimed_subject) + ", " + where);
  const auto tau_id = thresholds.id_threshold(activity, mask);
  if (!tau_id) throw ConfigurationError("no identification threshold for " + where);
  const auto tau_auth = thresholds.auth_threshold(claimed_subject, activity, mask);
  if (!tau_auth)
    throw ConfigurationError("no authentication threshold for subject " + std::to_string(claimed_subject) + ", " + where);

  VerificationDecision d;
  auto& t = d.trace;
  t.claimed_subject = claimed_subject;
  t.id_threshold = *tau_id;

  const ProbabilityVector p1 = id_model->second.predict_proba(values);
  const auto top = argmax(p1);
  t.predicted_subject = id_model->second.classes()[static_cast<std::size_t>(top)];
  t.id_probability = p1[top];
  t.step_reached = 1;
  if (t.id_probability < t.id_threshold || t.predicted_subject != claimed_subject) {
    d.outcome = Outcome::FallbackSecondFactor;
    return d;
  }

  t.step_reached = 2;
  t.auth_threshold = *tau_auth;
  t.auth_probability = genuine_scores(auth_model->second, values.transpose())[0];
  d.outcome = replay(t);
  return d;
}

VerificationDecision verify(const FeatureVector& sample, SubjectId claimed_subject,
                            const ModelSet& models, const ThresholdTable& thresholds) {
  return verify(sample.values, sample.activity, sample.mask, claimed_subject, models, thresholds);
}

Outcome replay(const VerificationTrace& t) {
  if (t.id_probability < t.id_threshold || t.predicted_subject != t.claimed_subject)
    return Outcome::FallbackSecondFactor;
  if (!t.auth_probability || !t.auth_threshold) return Outcome::FallbackSecondFactor;
  const double p2 = *t.auth_probability;
  if (std::max(p2, 1 - p2) < *t.auth_threshold) return Outcome::FallbackSecondFactor;
  return p2 <= 0.5 ? Outcome::Rejected : Outcome::Verified;  // ties go to the imposter class
}

std::string format_decision(const VerificationDecision& d) {
  const auto& t = d.trace;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "outcome=%s claimed=%d predicted=%d id_p=%.4f id_tau=%.4f", outcome_name(d.outcome),
                t.claimed_subject, t.predicted_subject, t.id_probability, t.id_threshold);
  std::string out = buf;
  if (t.auth_probability) {
    std::snprintf(buf, sizeof buf, " auth_p=%.4f auth_tau=%.4f", *t.auth_probability, *t.auth_threshold);
    out += buf;
  }
  out += " step=" + std::to_string(t.step_reached);
  return out;
}

GateStats gate_stats(const DecisionForest& model, const Eigen::MatrixXd& X,
                     const std::vector<int>& truth, double tau) {
  if (truth.size() != static_cast<std::size_t>(X.rows())) throw ShapeError("truth labels do not match sample count");
  GateStats g;
  g.total_samples = truth.size();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const ProbabilityVector p = model.predict_proba(X.row(i).transpose());
    const auto top = argmax(p);
    if (model.classes()[static_cast<std::size_t>(top)] == truth[static_cast<std::size_t>(i)]) continue;
    ++g.misclassified;
    g.misclassified_above_threshold += p[top] >= tau;
  }
  g.pass_rate = g.misclassified == 0 ? 0.0
                                     : static_cast<double>(g.misclassified_above_threshold) /
                                           static_cast<double>(g.misclassified);
  return g;
}

}  // namespace motioncred
