#include "chemorl/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace chemorl {

void Environment::validate() const {
  params.validate();
  op.validate();
  if (!x0.finite() || x0.g < 0 || x0.b1 < 0 || x0.b2 < 0 || x0.a1 < 0 ||
      x0.a2 < 0)
    throw std::invalid_argument("initial state must be finite and >= 0");
  if (!(bounds.i_max_1 > 0.0) || !(bounds.i_max_2 > 0.0))
    throw std::invalid_argument("input bounds must be strictly positive");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(dt_hours > 0.0)) throw std::invalid_argument("dt must be positive");
  if (n_substeps < 1) throw std::invalid_argument("n_substeps must be >= 1");
}

void UncertaintySpec::validate() const {
  // r < 1/3 keeps the 3-sigma truncation above zero for positive nominals.
  if (!(relative_std >= 0.0) || !(relative_std < 1.0 / 3.0))
    throw std::invalid_argument("relative_std must lie in [0, 1/3)");
}

void TrainingConfig::validate() const {
  if (n_episodes < 2) throw std::invalid_argument("n_episodes must be >= 2");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("learning_rate must be positive");
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (!(sigma_floor > 0.0))
    throw std::invalid_argument("sigma_floor must be positive");
  if (rollout_threads < 1)
    throw std::invalid_argument("rollout_threads must be >= 1");
  if (uncertainty) uncertainty->validate();
}

namespace {

double truncated_unit_normal(RandomStream& rng) {
  for (;;) {
    const double z = rng.next_gaussian();
    if (std::abs(z) <= 3.0) return z;
  }
}

double perturb(double nominal, double r, RandomStream& rng) {
  if (r == 0.0) return nominal;
  return nominal * (1.0 + r * truncated_unit_normal(rng));
}

}  // namespace

Disturbed sample_disturbance(const UncertaintySpec& spec,
                             const SystemState& nominal_x0,
                             const KineticParameters& nominal_params,
                             RandomStream& rng) {
  spec.validate();
  const double r = spec.relative_std;
  Disturbed d{nominal_x0, nominal_params};
  d.x0.g = perturb(nominal_x0.g, r, rng);
  d.x0.b1 = perturb(nominal_x0.b1, r, rng);
  d.x0.b2 = perturb(nominal_x0.b2, r, rng);
  d.x0.a1 = perturb(nominal_x0.a1, r, rng);
  d.x0.a2 = perturb(nominal_x0.a2, r, rng);
  d.params.strain[0].q_a_max = perturb(nominal_params.strain[0].q_a_max, r, rng);
  d.params.strain[1].q_a_max = perturb(nominal_params.strain[1].q_a_max, r, rng);
  return d;
}

EpisodeTrajectory rollout_episode(const GaussianPolicy& policy,
                                  const Environment& env,
                                  const ReturnConfig& return_cfg,
                                  const std::vector<ReferencePoint>& refs,
                                  RandomStream& action_rng,
                                  const Disturbed& plant) {
  EpisodeTrajectory traj;
  traj.realized = plant;
  traj.states.reserve(env.n_steps + 1);
  traj.states.push_back(plant.x0);
  traj.observations.reserve(env.n_steps);
  traj.raw_actions.reserve(env.n_steps);
  traj.applied_actions.reserve(env.n_steps);

  for (int t = 0; t < env.n_steps; ++t) {
    const Observation obs = build_observation(
        traj.states, traj.applied_actions, t, env.n_steps);
    const ActionDistribution dist = policy.forward(obs);
    const SampledAction action = sample_action(dist, env.bounds, action_rng);
    traj.observations.push_back(obs);
    traj.raw_actions.push_back(action.raw);
    traj.applied_actions.push_back(action.applied);
    traj.states.push_back(integrate_interval(traj.states.back(), action.applied,
                                             plant.params, env.op, env.dt_hours,
                                             env.n_substeps));
  }
  traj.ret = episode_return(traj.states, refs, return_cfg);
  return traj;
}

Eigen::VectorXd estimate_gradient(
    std::span<const double> advantages,
    std::span<const Eigen::VectorXd> episode_grads) {
  if (advantages.empty() || advantages.size() != episode_grads.size())
    throw std::invalid_argument("advantages/gradients length mismatch");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(episode_grads[0].size());
  for (size_t k = 0; k < advantages.size(); ++k)
    g.noalias() += advantages[k] * episode_grads[k];
  return g / static_cast<double>(advantages.size());
}

namespace {

struct EpochBatch {
  std::vector<double> totals;
  std::vector<Eigen::VectorXd> grads;
};

/// Rolls the epoch's N_MC episodes; storage indexed by episode so thread
/// scheduling cannot change the result.
EpochBatch run_epoch(const GaussianPolicy& policy, const TrainingConfig& cfg,
                     const Environment& env, const ReturnConfig& return_cfg,
                     const std::vector<ReferencePoint>& series, int epoch,
                     bool with_grads) {
  const int n = cfg.n_episodes;
  EpochBatch batch;
  batch.totals.resize(n);
  if (with_grads) batch.grads.resize(n);
  std::vector<std::exception_ptr> errors(n);

  auto worker = [&](int first, int last) {
    for (int k = first; k < last; ++k) {
      try {
        Disturbed plant{env.x0, env.params};
        if (cfg.uncertainty) {
          RandomStream drng = episode_stream(cfg.seed, epoch, k,
                                             StreamPurpose::disturbance);
          plant = sample_disturbance(*cfg.uncertainty, env.x0, env.params, drng);
        }
        RandomStream arng =
            episode_stream(cfg.seed, epoch, k, StreamPurpose::action_sampling);
        EpisodeTrajectory traj =
            rollout_episode(policy, env, return_cfg, series, arng, plant);
        batch.totals[k] = traj.ret.total;
        if (with_grads)
          batch.grads[k] =
              policy.grad_log_prob_sum(traj.observations, traj.raw_actions);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };

  const int threads = std::min(cfg.rollout_threads, n);
  if (threads <= 1) {
    worker(0, n);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back(worker, t * chunk, std::min(n, (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }
  for (int k = 0; k < n; ++k)
    if (errors[k]) {
      try {
        std::rethrow_exception(errors[k]);
      } catch (const std::exception& e) {
        throw std::runtime_error("episode " + std::to_string(k) + " of epoch " +
                                 std::to_string(epoch) + " failed: " + e.what());
      }
    }
  return batch;
}

}  // namespace

TrainResult train(const TrainingConfig& cfg, const Environment& env,
                  const ReturnConfig& return_cfg, const ReferenceSpec& refs,
                  const GaussianPolicy* warm_start) {
  cfg.validate();
  env.validate();
  return_cfg.validate(env.n_steps);
  refs.validate();
  const std::vector<ReferencePoint> series =
      reference_series(refs, env.n_steps, env.dt_hours);

  GaussianPolicy policy = [&] {
    if (warm_start) return *warm_start;
    RandomStream init_rng =
        episode_stream(cfg.seed, 0, 0, StreamPurpose::policy_init);
    return GaussianPolicy::initialize(PolicyLayout{}, cfg.sigma_floor,
                                      env.bounds, init_rng);
  }();

  TrainResult result{policy, policy, 0, 0.0, {}};
  result.best_mean_return = -std::numeric_limits<double>::infinity();
  int stale_epochs = 0;

  for (int m = 0; m < cfg.max_epochs; ++m) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochBatch batch =
        run_epoch(policy, cfg, env, return_cfg, series, m, /*with_grads=*/true);

    double mean = 0.0;
    for (double v : batch.totals) mean += v;
    mean /= cfg.n_episodes;
    double var = 0.0;
    for (double v : batch.totals) var += (v - mean) * (v - mean);
    var /= cfg.n_episodes;
    const double stddev = std::sqrt(var);
    if (!std::isfinite(mean) || !std::isfinite(stddev))
      throw std::runtime_error("training diverged: non-finite return at epoch " +
                               std::to_string(m));

    EpochRecord record;
    record.epoch = m;
    record.mean_return = mean;
    record.std_return = stddev;
    record.best_flag = mean > result.best_mean_return;
    if (record.best_flag) {
      result.best_mean_return = mean;
      result.best_epoch = m;
      result.best_policy = policy;
      stale_epochs = 0;
    } else {
      ++stale_epochs;
    }
    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    result.records.push_back(record);

    if (stale_epochs >= cfg.patience) break;
    if (m == cfg.max_epochs - 1) break;

    const std::vector<double> advantages = normalize_returns(batch.totals);
    const Eigen::VectorXd ghat = estimate_gradient(advantages, batch.grads);
    if (!ghat.allFinite())
      throw std::runtime_error(
          "training diverged: non-finite gradient estimate at epoch " +
          std::to_string(m));
    Eigen::VectorXd theta = policy.to_flat();
    theta += cfg.learning_rate * ghat;
    if (!theta.allFinite())
      throw std::runtime_error(
          "training diverged: non-finite parameters at epoch " +
          std::to_string(m));
    policy.from_flat(theta);
  }

  result.final_policy = policy;
  return result;
}

std::vector<EpisodeTrajectory> replay_epoch(const GaussianPolicy& policy,
                                            const TrainingConfig& cfg,
                                            const Environment& env,
                                            const ReturnConfig& return_cfg,
                                            const ReferenceSpec& refs,
                                            int epoch) {
  const std::vector<ReferencePoint> series =
      reference_series(refs, env.n_steps, env.dt_hours);
  std::vector<EpisodeTrajectory> episodes;
  episodes.reserve(cfg.n_episodes);
  for (int k = 0; k < cfg.n_episodes; ++k) {
    Disturbed plant{env.x0, env.params};
    if (cfg.uncertainty) {
      RandomStream drng =
          episode_stream(cfg.seed, epoch, k, StreamPurpose::disturbance);
      plant = sample_disturbance(*cfg.uncertainty, env.x0, env.params, drng);
    }
    RandomStream arng =
        episode_stream(cfg.seed, epoch, k, StreamPurpose::action_sampling);
    episodes.push_back(
        rollout_episode(policy, env, return_cfg, series, arng, plant));
  }
  return episodes;
}

}  // namespace chemorl
