#include "motioncred/synth.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "motioncred/error.hpp"

namespace motioncred {

std::vector<FeatureVector> synth_generate(const SynthConfig& cfg) {
  if (cfg.n_subjects < 2) throw ConfigurationError("synthetic data needs at least two subjects");
  if (!(cfg.cluster_separation > 0)) throw ConfigurationError("cluster_separation must be positive");
  if (cfg.feature_dim < 1 || cfg.n_windows_per_subject < 0)
    throw ConfigurationError("synthetic data needs a positive dimension");

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sep = cfg.cluster_separation;
  // Spread chosen so that random draws usually clear the separation.
  double spread = sep * (1.0 + std::sqrt(static_cast<double>(cfg.n_subjects)) /
                                   std::sqrt(static_cast<double>(cfg.feature_dim)));

  std::vector<Eigen::VectorXd> means;
  int attempts = 0;
  while (static_cast<int>(means.size()) < cfg.n_subjects) {
    Eigen::VectorXd m(cfg.feature_dim);
    for (auto& v : m) v = spread * normal(rng);
    bool ok = true;
    for (const auto& other : means) ok = ok && (m - other).norm() >= sep;
    if (ok) {
      means.push_back(std::move(m));
      attempts = 0;
    } else if (++attempts > 200) {
      spread *= 1.5;
      attempts = 0;
    }
  }

  std::vector<FeatureVector> out;
  out.reserve(static_cast<std::size_t>(cfg.n_subjects * cfg.n_windows_per_subject));
  for (int s = 0; s < cfg.n_subjects; ++s) {
    for (int w = 0; w < cfg.n_windows_per_subject; ++w) {
      FeatureVector v;
      v.subject = cfg.first_subject + s;
      v.activity = cfg.activity;
      v.mask = SensorMask::phone_accel();
      v.window_index = w;
      v.values = means[static_cast<std::size_t>(s)];
      for (auto& x : v.values) x += normal(rng);
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::map<SensorSource, std::vector<SensorReading>> synth_raw(const SynthRawConfig& cfg) {
  if (cfg.n_subjects < 2) throw ConfigurationError("synthetic data needs at least two subjects");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> offset(-6.0, 6.0), amp(0.5, 3.0), freq(0.4, 3.0),
      phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, cfg.noise);

  struct Axis {
    double offset, amp, freq;
  };
  // Per (subject, source, axis) signature; activities shift it slightly so the
  // per-activity models differ.
  const auto sources = cfg.sources.sources();
  std::vector<std::array<Axis, 3>> signature;
  for (int s = 0; s < cfg.n_subjects; ++s)
    for (std::size_t k = 0; k < sources.size(); ++k) {
      std::array<Axis, 3> axes{};
      for (auto& a : axes) a = {offset(rng), amp(rng), freq(rng)};
      signature.push_back(axes);
    }

  const auto samples = static_cast<int>(std::floor(cfg.seconds_per_activity * kDefaultSampleRateHz));
  const std::int64_t step_ns = static_cast<std::int64_t>(1e9 / kDefaultSampleRateHz);
  std::map<SensorSource, std::vector<SensorReading>> out;
  for (int s = 0; s < cfg.n_subjects; ++s) {
    std::int64_t t0 = 1'000'000'000'000LL + s * 10'000'000'000'000LL;
    for (std::size_t ai = 0; ai < cfg.activities.size(); ++ai) {
      const double shift = 0.25 * static_cast<double>(ai);
      for (std::size_t k = 0; k < sources.size(); ++k) {
        const auto& axes = signature[static_cast<std::size_t>(s) * sources.size() + k];
        std::array<double, 3> ph{phase(rng), phase(rng), phase(rng)};
        auto& dst = out[sources[k]];
        for (int i = 0; i < samples; ++i) {
          const double t = i / kDefaultSampleRateHz;
          std::array<double, 3> v{};
          for (int a = 0; a < 3; ++a) {
            const auto& ax = axes[static_cast<std::size_t>(a)];
            v[static_cast<std::size_t>(a)] =
                ax.offset + shift +
                ax.amp * std::sin(2.0 * std::numbers::pi * ax.freq * t + ph[static_cast<std::size_t>(a)]) +
                noise(rng);
          }
          dst.push_back({cfg.first_subject + s, cfg.activities[ai], t0 + i * step_ns, sources[k],
                         v[0], v[1], v[2]});
        }
      }
      t0 += static_cast<std::int64_t>(samples + 100) * step_ns;
    }
  }
  return out;
}

}  // namespace motioncred
