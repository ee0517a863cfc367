#pragma once

#include <span>
#include <string>
#include <vector>

#include "chemorl/dynamics.hpp"
#include "chemorl/reference.hpp"
#include "chemorl/returns.hpp"

namespace chemorl {

/// Normalized average absolute error of one tracked state over steps
/// 1..N_s: mean of |(ref - value)/ref|. References must be nonzero.
double naae_per_state(std::span<const double> values,
                      std::span<const double> refs);

/// Total NAAE: arithmetic mean of the per-state values.
double naae_total(std::span<const double> per_state);

/// NAAE of the episode-mean trajectory (values averaged across episodes
/// first, then scored against the references).
double naae_of_mean_trajectory(const std::vector<std::vector<SystemState>>& episodes,
                               const std::vector<ReferencePoint>& refs,
                               const TrackedStates& tracked);

struct NaaeStats {
  double mean = 0.0;
  double stddev = 0.0;  // population std across episodes
};

/// Table-style variant: total NAAE computed per episode from that episode's
/// own states, then mean/std across the batch.
NaaeStats naae_episode_stats(const std::vector<std::vector<SystemState>>& episodes,
                             const std::vector<ReferencePoint>& refs,
                             const TrackedStates& tracked);

/// Trapezoidal area under a [0,1]-normalized mean-return curve, divided by
/// the number of epoch intervals. 1 means instant, stable convergence.
double nauc(std::span<const double> normalized_means);

struct ScenarioScore {
  std::string scenario;
  double naae = 0.0;
  double nauc = 0.0;
  int rank_naae = 0;
  int rank_nauc = 0;
  int rank_sum = 0;
};

/// Ranks NAAE ascending and NAUC descending (1 = best); ties broken by
/// lower NAAE, then scenario id, so ranks are always a permutation of
/// 1..#scenarios. Output is sorted by rank_sum with the same tie-break.
std::vector<ScenarioScore> rank_scenarios(std::vector<ScenarioScore> scores);

}  // namespace chemorl
