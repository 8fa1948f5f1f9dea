#include "motioncred/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "motioncred/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace motioncred {

namespace {

// Rejects keys outside `allowed` before any field is read.
void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigurationError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.count(key)) throw ConfigurationError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string name = where + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) throw ConfigurationError(name + " must be a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) throw ConfigurationError(name + " must be an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (it->is_number_unsigned() == false && it->template get<long long>() < 0)
        throw ConfigurationError(name + " must be non-negative");
    }
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!it->is_number()) throw ConfigurationError(name + " must be a number");
  } else {
    if (!it->is_string()) throw ConfigurationError(name + " must be a string");
  }
  out = it->template get<T>();
}

std::vector<std::string> string_list(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_array() || v.empty()) throw ConfigurationError(std::string(key) + " must be a non-empty list");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw ConfigurationError(std::string(key) + " entries must be strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<Activity> activity_list(const json& obj, const char* key) {
  std::vector<Activity> out;
  for (const auto& s : string_list(obj, key)) out.push_back(parse_activity(s));
  return out;
}

std::string resolve(const std::string& path, const std::string& base) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

}  // namespace

RunConfig RunConfig::parse(const std::string& json_text, const std::string& base_dir,
                           std::optional<std::uint64_t> seed_override) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigurationError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc, "config",
             {"data_dir", "features", "output_dir", "sensor_masks", "activities", "detail_activities", "seed",
              "folds", "threads", "auth_subjects", "forest", "attack", "threshold_policy"});

  RunConfig c;
  read(doc, "data_dir", "config", c.data_dir);
  read(doc, "features", "config", c.features);
  read(doc, "output_dir", "config", c.output_dir);
  c.data_dir = resolve(c.data_dir, base_dir);
  c.features = resolve(c.features, base_dir);
  c.output_dir = resolve(c.output_dir, base_dir);
  if (doc.contains("sensor_masks")) {
    c.sensor_masks.clear();
    for (const auto& s : string_list(doc, "sensor_masks")) c.sensor_masks.push_back(SensorMask::parse(s));
  }
  if (doc.contains("activities")) c.activities = activity_list(doc, "activities");
  if (doc.contains("detail_activities")) c.detail_activities = activity_list(doc, "detail_activities");
  if (doc.contains("seed")) {
    std::uint64_t seed = 0;
    read(doc, "seed", "config", seed);
    c.seed = seed;
  }
  if (seed_override) c.seed = seed_override;
  read(doc, "folds", "config", c.folds);
  read(doc, "threads", "config", c.threads);
  read(doc, "auth_subjects", "config", c.auth_subjects);
  if (doc.contains("threshold_policy")) {
    std::string p;
    read(doc, "threshold_policy", "config", p);
    c.threshold_policy = parse_policy(p);
  }
  if (doc.contains("forest")) {
    const auto& f = doc["forest"];
    check_keys(f, "forest",
               {"n_trees", "max_depth", "min_leaf", "features_per_split", "bootstrap", "laplace_alpha"});
    read(f, "n_trees", "forest", c.forest.n_trees);
    read(f, "max_depth", "forest", c.forest.max_depth);
    read(f, "min_leaf", "forest", c.forest.min_leaf);
    read(f, "features_per_split", "forest", c.forest.features_per_split);
    read(f, "bootstrap", "forest", c.forest.bootstrap);
    read(f, "laplace_alpha", "forest", c.forest.laplace_alpha);
  }
  if (doc.contains("attack")) {
    const auto& a = doc["attack"];
    check_keys(a, "attack", {"h", "step_size", "max_iters", "kappa", "coords_per_iter"});
    read(a, "h", "attack", c.attack.h);
    read(a, "step_size", "attack", c.attack.step_size);
    read(a, "max_iters", "attack", c.attack.max_iters);
    read(a, "kappa", "attack", c.attack.kappa);
    read(a, "coords_per_iter", "attack", c.attack.coords_per_iter);
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto base = fs::path(path).parent_path();
  return parse(buf.str(), base.empty() ? "." : base.string(), seed_override);
}

void RunConfig::validate() const {
  if (!seed) throw ConfigurationError("config needs an explicit seed");
  if (!data_dir.empty() && !fs::is_directory(data_dir))
    throw ConfigurationError("data_dir '" + data_dir + "' does not exist");
  if (!features.empty() && !fs::is_regular_file(features))
    throw ConfigurationError("features '" + features + "' does not exist");
  if (sensor_masks.empty()) throw ConfigurationError("sensor_masks is empty");
  for (auto m : sensor_masks)
    if (m.empty()) throw ConfigurationError("empty sensor mask");
  if (activities.empty()) throw ConfigurationError("activities is empty");
  if (folds < 3) throw ConfigurationError("folds must be >= 3");
  if (threads < 0) throw ConfigurationError("threads must be >= 0");
  if (auth_subjects < 0) throw ConfigurationError("auth_subjects must be >= 0");
  forest.validate();
  attack.validate(0);
}

ExperimentConfig RunConfig::experiment() const {
  validate();
  ExperimentConfig e;
  e.activities = activities;
  e.detail_activities = detail_activities;
  e.masks = sensor_masks;
  e.forest = forest;
  e.attack = attack;
  e.policy = threshold_policy;
  e.folds = folds;
  e.auth_subjects = auth_subjects;
  e.seed = *seed;
  e.threads = threads;
  return e;
}

}  // namespace motioncred
