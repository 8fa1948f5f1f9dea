#include "motioncred/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "motioncred/error.hpp"
#include "motioncred/report_format.hpp"
#include "motioncred/svg.hpp"

namespace fs = std::filesystem;

namespace motioncred {

namespace {

void stats_row(std::ostream& out, const char* model, const SliceKey& key, const char* condition,
               const ProbabilityStats& s) {
  out << model << ',' << activity_code(key.first) << ',' << key.second.to_string() << ',' << condition << ','
      << s.confidence.size() << ',' << fixed4(s.mean) << ',' << fixed4(s.std);
  for (auto h : s.histogram) out << ',' << h;
  out << '\n';
}

std::vector<double> density(const ProbabilityStats& s) {
  std::vector<double> out;
  const double scale = static_cast<double>(ProbabilityStats::kBins) / static_cast<double>(s.confidence.size());
  for (auto h : s.histogram) out.push_back(static_cast<double>(h) * scale);
  return out;
}

std::string label(Activity a) { return std::string(activity_name(a)); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw PersistenceError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

void write_probability_stats_csv(std::ostream& out, const ExperimentResult& r) {
  out << "model,activity,mask,condition,n,mean,std";
  for (int b = 0; b < ProbabilityStats::kBins; ++b) {
    char buf[8];
    std::snprintf(buf, sizeof buf, ",bin%02d", b);
    out << buf;
  }
  out << '\n';
  for (const auto& [key, s] : r.id_benign) {
    stats_row(out, "identification", key, "benign", s);
    stats_row(out, "identification", key, "adversarial", r.id_adversarial.at(key));
  }
  for (const auto& [key, s] : r.auth_benign) {
    stats_row(out, "authentication", key, "benign", s);
    stats_row(out, "authentication", key, "adversarial", r.auth_adversarial.at(key));
    if (auto it = r.auth_adversarial_misclassified.find(key); it != r.auth_adversarial_misclassified.end())
      stats_row(out, "authentication", key, "adversarial-misclassified", it->second);
  }
}

void write_attack_summary_csv(std::ostream& out, const ExperimentResult& r) {
  out << "activity,mask,n,accuracy_before,accuracy_after,misclassification_error,success_rate,mean_queries\n";
  for (const auto& [key, a] : r.attack)
    out << activity_code(key.first) << ',' << key.second.to_string() << ',' << a.n << ',' << fixed4(a.accuracy_before)
        << ',' << fixed4(a.accuracy_after) << ',' << fixed4(a.misclassification_error()) << ','
        << fixed4(a.success_rate) << ',' << fixed4(a.mean_queries) << '\n';
}

void write_gate_stats_csv(std::ostream& out, const ExperimentResult& r) {
  out << "activity,mask,tau,total_samples,misclassified,misclassified_above_threshold,pass_rate\n";
  std::vector<SensorMask> masks;
  for (const auto& [key, g] : r.gate) {
    out << activity_code(key.first) << ',' << key.second.to_string() << ',' << fixed4(r.thresholds.id.at(key)) << ','
        << g.total_samples << ',' << g.misclassified << ',' << g.misclassified_above_threshold << ','
        << fixed4(g.pass_rate) << '\n';
    if (std::find(masks.begin(), masks.end(), key.second) == masks.end()) masks.push_back(key.second);
  }
  for (auto m : masks) {
    const auto g = r.gate_total(m);
    out << "all," << m.to_string() << ",," << g.total_samples << ',' << g.misclassified << ','
        << g.misclassified_above_threshold << ',' << fixed4(g.pass_rate) << '\n';
  }
}

std::vector<std::string> write_report_bundle(const std::string& dir, const ExperimentResult& r,
                                             const ExperimentConfig& cfg) {
  fs::create_directories(dir);
  const fs::path root(dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_file(root / name, text);
    written.push_back(name);
  };
  auto csv = [&](const std::string& name, auto&& fn) {
    std::ostringstream o;
    fn(o);
    emit(name, o.str());
  };

  csv("accuracy_table.csv", [&](std::ostream& o) { r.accuracy.write_csv(o); });
  csv("probability_stats.csv", [&](std::ostream& o) { write_probability_stats_csv(o, r); });
  csv("attack_summary.csv", [&](std::ostream& o) { write_attack_summary_csv(o, r); });
  csv("gate_stats.csv", [&](std::ostream& o) { write_gate_stats_csv(o, r); });
  if (!cfg.masks.empty() && r.eer.count(cfg.masks.front()))
    csv("eer_report.csv", [&](std::ostream& o) { r.eer.at(cfg.masks.front()).write_csv(o); });
  for (const auto& [mask, report] : r.eer)
    csv("eer_report." + mask_label(mask) + ".csv", [&](std::ostream& o) { report.write_csv(o); });
  emit("thresholds.table", r.thresholds.to_json() + "\n");

  if (cfg.masks.empty()) return written;
  const SensorMask m = cfg.masks.front();
  const std::string suffix = " (" + mask_label(m) + ")";

  // fig2..fig4: identification confidence densities, two activities each.
  const std::vector<std::pair<Activity, Activity>> pairs{
      {Activity::A, Activity::B}, {Activity::F, Activity::R}, {Activity::K, Activity::L}};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::vector<svg::Panel> panels;
    for (Activity a : {pairs[i].first, pairs[i].second}) {
      auto b = r.id_benign.find({a, m});
      if (b == r.id_benign.end()) continue;
      panels.push_back({label(a), {{"benign", density(b->second)}, {"adversarial", density(r.id_adversarial.at({a, m}))}}});
    }
    if (!panels.empty())
      emit("fig" + std::to_string(i + 2) + ".svg",
           svg::histogram_panels("Identification top-1 probability" + suffix, panels));
  }

  std::vector<std::string> cats;
  std::vector<double> err_b, err_a, auth_b, auth_a, auth_m, eer_b, eer_a;
  for (Activity a : cfg.detail_activities) {
    auto at = r.attack.find({a, m});
    if (at == r.attack.end()) continue;
    cats.push_back(label(a));
    err_b.push_back(1.0 - at->second.accuracy_before);
    err_a.push_back(at->second.misclassification_error());
    auto ab = r.auth_benign.find({a, m});
    auth_b.push_back(ab == r.auth_benign.end() ? 0.0 : ab->second.mean);
    auto aa = r.auth_adversarial.find({a, m});
    auth_a.push_back(aa == r.auth_adversarial.end() ? 0.0 : aa->second.mean);
    auto am = r.auth_adversarial_misclassified.find({a, m});
    auth_m.push_back(am == r.auth_adversarial_misclassified.end() ? 0.0 : am->second.mean);
    const auto eer = r.eer.find(m);
    auto mean_or_zero = [&](Condition c) {
      try {
        return eer == r.eer.end() ? 0.0 : eer->second.mean(a, c);
      } catch (const EmptySliceError&) {
        return 0.0;
      }
    };
    eer_b.push_back(mean_or_zero(Condition::Benign));
    eer_a.push_back(mean_or_zero(Condition::Adversarial));
  }
  if (!cats.empty()) {
    emit("fig5.svg", svg::bar_chart("Identification misclassification error" + suffix, "error", cats,
                                    {{"benign", err_b}, {"adversarial", err_a}}));
    emit("fig6.svg", svg::bar_chart("Authentication mean predicted-class probability" + suffix, "probability", cats,
                                    {{"benign", auth_b}, {"adversarial", auth_a}, {"adversarial, misclassified", auth_m}}));
    const double top = std::max({0.5, *std::max_element(eer_a.begin(), eer_a.end()), *std::max_element(eer_b.begin(), eer_b.end())});
    emit("fig7.svg", svg::line_chart("Authentication EER" + suffix, "EER", cats,
                                     {{"benign", eer_b}, {"adversarial", eer_a}}, top));
  }
  return written;
}

}  // namespace motioncred
