#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chemorl/dynamics.hpp"
#include "chemorl/rng.hpp"

namespace chemorl {

/// Feedforward trunk with two linear heads (action mean, pre-std).
struct PolicyLayout {
  int obs_dim = 15;
  int hidden_width = 20;
  int hidden_depth = 4;
  int action_dim = 2;

  std::size_t parameter_count() const;
  bool operator==(const PolicyLayout&) const = default;
};

/// Agent observation: [x_{t-1}, u_{t-2}, x_t, u_{t-1}, t_n].
/// Slots referring to times before the episode start are zero-filled;
/// t_n is the step index mapped onto [-1, 1].
struct Observation {
  std::array<double, 15> v{};
  bool finite() const;
};

Observation build_observation(std::span<const SystemState> states,
                              std::span<const ControlInput> applied_inputs,
                              int t, int n_steps);

struct ActionDistribution {
  std::array<double, 2> mean{};
  std::array<double, 2> stddev{};  // always >= sigma_floor
};

struct SampledAction {
  std::array<double, 2> raw{};  // as drawn from the Gaussian
  ControlInput applied;         // clamped to [0, I_max_i]
};

/// Draws componentwise from the Gaussian and clamps only the value sent to
/// the plant; the raw draw is kept because the score function must be
/// evaluated on what was actually sampled.
SampledAction sample_action(const ActionDistribution& dist,
                            const InputBounds& bounds, RandomStream& rng);

/// Sum over components of the Gaussian log density at the raw action.
double log_prob(const ActionDistribution& dist,
                const std::array<double, 2>& raw_action);

namespace detail {

/// Parameter blocks in canonical flat order: per hidden layer W then b,
/// then mean head W, b, then pre-std head W, b. Matrices flatten row-major.
struct NetParams {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> b;
  Eigen::MatrixXd Wm, Ws;
  Eigen::VectorXd bm, bs;

  static NetParams zeros(const PolicyLayout& layout);
  Eigen::VectorXd to_flat() const;
  void from_flat(const PolicyLayout& layout, const Eigen::VectorXd& flat);
};

}  // namespace detail

/// Gaussian stochastic policy. LeakyReLU(0.1) hidden activations; the mean
/// head is raw linear output; std = softplus(pre-std) + sigma_floor.
class GaussianPolicy {
public:
  GaussianPolicy(const PolicyLayout& layout, double sigma_floor);

  /// Fan-in-scaled uniform weights, zero biases, except the pre-std bias
  /// which is set so the initial std is about 20% of each action range.
  static GaussianPolicy initialize(const PolicyLayout& layout,
                                   double sigma_floor,
                                   const InputBounds& bounds,
                                   RandomStream& rng);

  ActionDistribution forward(const Observation& obs) const;

  /// Exact reverse-mode gradient of sum_t log pi(raw_t | obs_t) with respect
  /// to the flat parameter vector.
  Eigen::VectorXd grad_log_prob_sum(
      std::span<const Observation> observations,
      std::span<const std::array<double, 2>> raw_actions) const;

  std::size_t parameter_count() const { return layout_.parameter_count(); }
  const PolicyLayout& layout() const { return layout_; }
  double sigma_floor() const { return sigma_floor_; }

  Eigen::VectorXd to_flat() const { return params_.to_flat(); }
  void from_flat(const Eigen::VectorXd& flat) {
    params_.from_flat(layout_, flat);
  }

  /// Versioned text checkpoint; values round-trip bit-exactly (hexfloat).
  void save(const std::string& path, std::uint64_t seed) const;
  static GaussianPolicy load(const std::string& path,
                             std::uint64_t* seed_out = nullptr);

  /// FNV-1a over the parameter bytes; identifies a checkpoint in manifests.
  std::string content_hash() const;

private:
  PolicyLayout layout_;
  double sigma_floor_;
  detail::NetParams params_;

  struct ForwardCache;
  ActionDistribution forward_cached(const Observation& obs,
                                    ForwardCache& cache) const;
};

}  // namespace chemorl
