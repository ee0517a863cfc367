#include "chemorl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace chemorl {

double naae_per_state(std::span<const double> values,
                      std::span<const double> refs) {
  if (values.empty() || values.size() != refs.size())
    throw std::invalid_argument("naae_per_state: length mismatch or empty");
  double sum = 0.0;
  for (size_t t = 0; t < values.size(); ++t) {
    if (refs[t] == 0.0)
      throw std::invalid_argument("naae_per_state: zero reference value");
    sum += std::abs((refs[t] - values[t]) / refs[t]);
  }
  return sum / static_cast<double>(values.size());
}

double naae_total(std::span<const double> per_state) {
  if (per_state.empty())
    throw std::invalid_argument("naae_total: empty tracked set");
  double sum = 0.0;
  for (double v : per_state) sum += v;
  return sum / static_cast<double>(per_state.size());
}

namespace {

/// Per-state series (steps 1..N_s) pulled out of a state trajectory.
std::vector<double> tracked_series(const std::vector<SystemState>& states,
                                   bool use_b1) {
  std::vector<double> out;
  out.reserve(states.size() - 1);
  for (size_t t = 1; t < states.size(); ++t)
    out.push_back(use_b1 ? states[t].b1 : states[t].b2);
  return out;
}

std::vector<double> ref_series(const std::vector<ReferencePoint>& refs,
                               bool use_b1) {
  std::vector<double> out;
  out.reserve(refs.size());
  for (const auto& r : refs) out.push_back(use_b1 ? r.b1_star : r.b2_star);
  return out;
}

double total_naae_of(const std::vector<SystemState>& states,
                     const std::vector<ReferencePoint>& refs,
                     const TrackedStates& tracked) {
  if (states.size() != refs.size() + 1)
    throw std::invalid_argument("trajectory/reference length mismatch");
  std::vector<double> per_state;
  if (tracked.b1)
    per_state.push_back(
        naae_per_state(tracked_series(states, true), ref_series(refs, true)));
  if (tracked.b2)
    per_state.push_back(
        naae_per_state(tracked_series(states, false), ref_series(refs, false)));
  return naae_total(per_state);
}

}  // namespace

double naae_of_mean_trajectory(
    const std::vector<std::vector<SystemState>>& episodes,
    const std::vector<ReferencePoint>& refs, const TrackedStates& tracked) {
  if (episodes.empty())
    throw std::invalid_argument("naae_of_mean_trajectory: no episodes");
  const size_t len = episodes.front().size();
  std::vector<SystemState> mean(len);
  for (const auto& ep : episodes) {
    if (ep.size() != len)
      throw std::invalid_argument("episodes of differing length");
    for (size_t t = 0; t < len; ++t) {
      mean[t].g += ep[t].g;
      mean[t].b1 += ep[t].b1;
      mean[t].b2 += ep[t].b2;
      mean[t].a1 += ep[t].a1;
      mean[t].a2 += ep[t].a2;
    }
  }
  const double n = static_cast<double>(episodes.size());
  for (auto& s : mean) {
    s.g /= n;
    s.b1 /= n;
    s.b2 /= n;
    s.a1 /= n;
    s.a2 /= n;
  }
  return total_naae_of(mean, refs, tracked);
}

NaaeStats naae_episode_stats(
    const std::vector<std::vector<SystemState>>& episodes,
    const std::vector<ReferencePoint>& refs, const TrackedStates& tracked) {
  if (episodes.empty())
    throw std::invalid_argument("naae_episode_stats: no episodes");
  std::vector<double> totals;
  totals.reserve(episodes.size());
  for (const auto& ep : episodes)
    totals.push_back(total_naae_of(ep, refs, tracked));
  NaaeStats stats;
  for (double v : totals) stats.mean += v;
  stats.mean /= static_cast<double>(totals.size());
  double var = 0.0;
  for (double v : totals) var += (v - stats.mean) * (v - stats.mean);
  stats.stddev = std::sqrt(var / static_cast<double>(totals.size()));
  return stats;
}

double nauc(std::span<const double> normalized_means) {
  if (normalized_means.size() < 2)
    throw std::invalid_argument("nauc needs at least 2 epochs");
  for (double v : normalized_means)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("nauc input outside [0,1]");
  double area = 0.0;
  for (size_t i = 0; i + 1 < normalized_means.size(); ++i)
    area += 0.5 * (normalized_means[i] + normalized_means[i + 1]);
  return area / static_cast<double>(normalized_means.size() - 1);
}

std::vector<ScenarioScore> rank_scenarios(std::vector<ScenarioScore> scores) {
  if (scores.empty())
    throw std::invalid_argument("rank_scenarios: empty score list");
  const size_t n = scores.size();

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  // NAAE ascending; ties by scenario id for a deterministic permutation.
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scores[a].naae != scores[b].naae) return scores[a].naae < scores[b].naae;
    return scores[a].scenario < scores[b].scenario;
  });
  for (size_t pos = 0; pos < n; ++pos)
    scores[order[pos]].rank_naae = static_cast<int>(pos) + 1;

  // NAUC descending.
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scores[a].nauc != scores[b].nauc) return scores[a].nauc > scores[b].nauc;
    return scores[a].scenario < scores[b].scenario;
  });
  for (size_t pos = 0; pos < n; ++pos)
    scores[order[pos]].rank_nauc = static_cast<int>(pos) + 1;

  for (auto& s : scores) s.rank_sum = s.rank_naae + s.rank_nauc;

  std::sort(scores.begin(), scores.end(),
            [](const ScenarioScore& a, const ScenarioScore& b) {
              if (a.rank_sum != b.rank_sum) return a.rank_sum < b.rank_sum;
              if (a.naae != b.naae) return a.naae < b.naae;
              return a.scenario < b.scenario;
            });
  return scores;
}

}  // namespace chemorl
