#include "motioncred/zoo.hpp"

#include <numeric>
#include <string>

#include "motioncred/error.hpp"
#include "motioncred/parallel.hpp"
#include "motioncred/random.hpp"

namespace motioncred {

void AttackConfig::fit_to_training_data(const Eigen::MatrixXd& X) {
  if (X.rows() == 0) throw ConfigurationError("cannot fit attack bounds to an empty matrix");
  clip_min = X.colwise().minCoeff().transpose();
  clip_max = X.colwise().maxCoeff().transpose();
  const Eigen::RowVectorXd mean = X.colwise().mean();
  scale = ((X.rowwise() - mean).array().square().colwise().mean()).sqrt().transpose();
}

void AttackConfig::validate(Eigen::Index dim) const {
  if (!(h > 0)) throw ConfigurationError("attack h must be positive");
  if (!(step_size > 0)) throw ConfigurationError("attack step_size must be positive");
  if (max_iters < 1) throw ConfigurationError("attack max_iters must be >= 1");
  if (!(kappa >= 0)) throw ConfigurationError("attack kappa must be >= 0");
  if (coords_per_iter < 1) throw ConfigurationError("attack coords_per_iter must be >= 1");
  if (clip_min.size() != clip_max.size())
    throw ConfigurationError("clip_min and clip_max differ in length");
  if (clip_min.size() != 0 && clip_min.size() != dim)
    throw ConfigurationError("clip bounds have " + std::to_string(clip_min.size()) +
                             " entries for a " + std::to_string(dim) + "-feature input");
  if (clip_min.size() != 0 && (clip_min.array() > clip_max.array()).any())
    throw ConfigurationError("clip_min exceeds clip_max");
  if (scale.size() != 0 && scale.size() != dim)
    throw ConfigurationError("attack scale has the wrong length");
  if (scale.size() != 0 && (scale.array() < 0).any())
    throw ConfigurationError("attack scale must be non-negative");
}

AttackResult zoo_attack(const QueryFn& query, const Eigen::VectorXd& x, Eigen::Index true_class,
                        const AttackConfig& cfg) {
  const Eigen::Index d = x.size();
  cfg.validate(d);

  // Effective bounds always contain the original point.
  Eigen::VectorXd lo = x, hi = x;
  if (cfg.clip_min.size() != 0) {
    lo = cfg.clip_min.cwiseMin(x);
    hi = cfg.clip_max.cwiseMax(x);
  } else {
    lo.setConstant(-std::numeric_limits<double>::infinity());
    hi.setConstant(std::numeric_limits<double>::infinity());
  }
  const Eigen::VectorXd unit = cfg.scale.size() != 0 ? cfg.scale : Eigen::VectorXd::Ones(d);

  AttackResult result;
  result.original = x;

  Eigen::VectorXd best = x;
  double best_loss = std::numeric_limits<double>::infinity();
  Eigen::Index best_class = -1;
  auto evaluate = [&](const Eigen::VectorXd& z) {
    ++result.queries;
    const ProbabilityVector p = query(z);
    const double loss = attack_loss(p, true_class, cfg.kappa);
    if (loss < best_loss) {
      best_loss = loss;
      best = z;
      best_class = argmax(p);
    }
    return loss;
  };
  auto done = [&] { return best_class != true_class && best_loss <= -cfg.kappa; };

  Rng rng = derive_rng(cfg.seed, {0x7a6f6f});
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  shuffle(order, rng);
  std::size_t pos = 0;
  bool epoch_moved = false;

  Eigen::VectorXd current = x;
  // Each iteration queries its starting point once (the first one is the clean
  // query), then spends two queries per probed coordinate.
  for (int it = 1; it <= cfg.max_iters; ++it) {
    result.iterations_used = it;
    evaluate(current);
    if (it == 1) result.original_class = best_class;
    if (done()) break;
    for (int c = 0; c < cfg.coords_per_iter; ++c) {
      if (pos == order.size()) {
        if (!epoch_moved) {
          // Plateau: nudge one random coordinate by h.
          const auto j = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(d)));
          const double sign = uniform_index(rng, 2) == 0 ? -1.0 : 1.0;
          current[j] = std::clamp(current[j] + sign * cfg.h * unit[j], lo[j], hi[j]);
        }
        shuffle(order, rng);
        pos = 0;
        epoch_moved = false;
      }
      const Eigen::Index i = order[pos++];
      if (unit[i] == 0.0 || lo[i] == hi[i]) continue;
      const double g = estimate_gradient(evaluate, current, i, cfg.h * unit[i], lo[i], hi[i]);
      if (g == 0.0) continue;
      epoch_moved = true;
      current[i] = std::clamp(current[i] - (g > 0 ? 1.0 : -1.0) * cfg.step_size * unit[i], lo[i], hi[i]);
    }
  }

  result.perturbed = best;
  result.final_loss = best_loss;
  result.adversarial_class = best_class;
  result.success = best_class != true_class;
  return result;
}

AttackDatasetResult attack_dataset(const QueryFn& query, const Eigen::MatrixXd& X,
                                   const std::vector<Eigen::Index>& true_class,
                                   const AttackConfig& cfg, int threads) {
  if (static_cast<std::size_t>(X.rows()) != true_class.size())
    throw ShapeError("attack_dataset: label count does not match sample count");
  cfg.validate(X.cols());

  AttackDatasetResult out;
  out.results.resize(true_class.size());
  parallel_for(true_class.size(), threads, [&](std::size_t i) {
    AttackConfig local = cfg;
    local.seed = derive_rng(cfg.seed, {i})();
    out.results[i] = zoo_attack(query, X.row(static_cast<Eigen::Index>(i)).transpose(), true_class[i], local);
  });

  out.adversarial.resize(X.rows(), X.cols());
  std::size_t success = 0, before = 0, after = 0;
  for (std::size_t i = 0; i < out.results.size(); ++i) {
    const auto& r = out.results[i];
    out.adversarial.row(static_cast<Eigen::Index>(i)) = r.perturbed.transpose();
    success += r.success && r.original_class == true_class[i];
    before += r.original_class == true_class[i];
    after += r.adversarial_class == true_class[i];
  }
  const double n = std::max<double>(1.0, static_cast<double>(out.results.size()));
  out.accuracy_before = static_cast<double>(before) / n;
  out.accuracy_after = static_cast<double>(after) / n;
  out.success_rate = static_cast<double>(success) / std::max<double>(1.0, static_cast<double>(before));
  return out;
}

}  // namespace motioncred
