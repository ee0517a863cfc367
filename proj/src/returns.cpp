#include "chemorl/returns.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chemorl {

WeightScheme weight_scheme_from_name(const std::string& name) {
  if (name == "tr") return WeightScheme::terminal_only;
  if (name == "1_sr_1_tr") return WeightScheme::equal_stage_terminal;
  if (name == "1_sr_2_tr") return WeightScheme::terminal_double;
  if (name == "1_sr_3_tr") return WeightScheme::terminal_triple;
  throw std::invalid_argument("unknown weight scheme: " + name);
}

std::string weight_scheme_name(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::terminal_only: return "tr";
    case WeightScheme::equal_stage_terminal: return "1_sr_1_tr";
    case WeightScheme::terminal_double: return "1_sr_2_tr";
    case WeightScheme::terminal_triple: return "1_sr_3_tr";
  }
  throw std::invalid_argument("unknown weight scheme enum");
}

std::vector<double> weight_scheme(WeightScheme scheme, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  double stage = 1.0, terminal = 1.0;
  switch (scheme) {
    case WeightScheme::terminal_only: stage = 0.0; terminal = 1.0; break;
    case WeightScheme::equal_stage_terminal: stage = 1.0; terminal = 1.0; break;
    case WeightScheme::terminal_double: stage = 1.0; terminal = 2.0; break;
    case WeightScheme::terminal_triple: stage = 1.0; terminal = 3.0; break;
  }
  std::vector<double> w(static_cast<size_t>(n_steps), stage);
  w.back() = terminal;
  return w;
}

void ReturnConfig::validate(int n_steps) const {
  if (tracked.count() < 1)
    throw std::invalid_argument("at least one tracked state required");
  if (kind == ReturnKind::saturation) {
    if (!(alpha_max > 0.0))
      throw std::invalid_argument("alpha_max must be strictly positive");
    if ((tracked.b1 && !(beta_b1 > 0.0)) || (tracked.b2 && !(beta_b2 > 0.0)))
      throw std::invalid_argument("beta must be strictly positive");
    if (static_cast<int>(weights.size()) != n_steps)
      throw std::invalid_argument("weight vector must have n_steps entries");
    for (double w : weights)
      if (w < 0.0) throw std::invalid_argument("weights must be >= 0");
  } else {
    if (q_b1 < 0.0 || q_b2 < 0.0 || qt_b1 < 0.0 || qt_b2 < 0.0)
      throw std::invalid_argument("quadratic weights must be >= 0");
  }
}

namespace {

void check_lengths(const std::vector<SystemState>& states,
                   const std::vector<ReferencePoint>& refs) {
  if (states.size() < 2)
    throw std::invalid_argument("trajectory must contain at least 2 states");
  if (refs.size() != states.size() - 1)
    throw std::invalid_argument("reference series must cover steps 1..N_s");
}

}  // namespace

EpisodeReturn quadratic_return(const std::vector<SystemState>& states,
                               const std::vector<ReferencePoint>& refs,
                               const ReturnConfig& cfg) {
  check_lengths(states, refs);
  const size_t n_steps = refs.size();
  EpisodeReturn out;
  out.rewards.resize(n_steps);
  for (size_t t = 1; t <= n_steps; ++t) {
    const bool terminal = (t == n_steps);
    const double w1 = terminal ? cfg.qt_b1 : cfg.q_b1;
    const double w2 = terminal ? cfg.qt_b2 : cfg.q_b2;
    double cost = 0.0;
    if (cfg.tracked.b1) {
      const double e = states[t].b1 - refs[t - 1].b1_star;
      cost += w1 * e * e;
    }
    if (cfg.tracked.b2) {
      const double e = states[t].b2 - refs[t - 1].b2_star;
      cost += w2 * e * e;
    }
    out.rewards[t - 1] = -cost;
    out.total += out.rewards[t - 1];
  }
  return out;
}

EpisodeReturn saturation_return(const std::vector<SystemState>& states,
                                const std::vector<ReferencePoint>& refs,
                                const ReturnConfig& cfg) {
  check_lengths(states, refs);
  const size_t n_steps = refs.size();
  if (cfg.weights.size() != n_steps)
    throw std::invalid_argument("weights/trajectory length mismatch");
  EpisodeReturn out;
  out.rewards.resize(n_steps);
  for (size_t t = 1; t <= n_steps; ++t) {
    double factor = 1.0;
    if (cfg.tracked.b1) {
      const double e = states[t].b1 - refs[t - 1].b1_star;
      factor *= cfg.beta_b1 / (cfg.beta_b1 + e * e);
    }
    if (cfg.tracked.b2) {
      const double e = states[t].b2 - refs[t - 1].b2_star;
      factor *= cfg.beta_b2 / (cfg.beta_b2 + e * e);
    }
    out.rewards[t - 1] = cfg.weights[t - 1] * cfg.alpha_max * factor;
    out.total += out.rewards[t - 1];
  }
  return out;
}

EpisodeReturn episode_return(const std::vector<SystemState>& states,
                             const std::vector<ReferencePoint>& refs,
                             const ReturnConfig& cfg) {
  return cfg.kind == ReturnKind::quadratic ? quadratic_return(states, refs, cfg)
                                           : saturation_return(states, refs, cfg);
}

std::vector<double> normalize_returns(const std::vector<double>& totals,
                                      double eps_mach) {
  if (totals.size() < 2)
    throw std::invalid_argument("normalize_returns needs at least 2 episodes");
  double mean = 0.0;
  for (double v : totals) mean += v;
  mean /= static_cast<double>(totals.size());
  double var = 0.0;
  for (double v : totals) var += (v - mean) * (v - mean);
  var /= static_cast<double>(totals.size());
  const double denom = std::sqrt(var) + eps_mach;
  std::vector<double> adv(totals.size());
  for (size_t i = 0; i < totals.size(); ++i) adv[i] = (totals[i] - mean) / denom;
  return adv;
}

std::vector<double> normalize_return_curve(ReturnKind kind,
                                           const std::vector<double>& means) {
  if (means.empty()) return {};
  std::vector<double> out(means.size());
  const double max = *std::max_element(means.begin(), means.end());
  const double min = *std::min_element(means.begin(), means.end());
  if (kind == ReturnKind::saturation) {
    if (!(max > 0.0)) {
      std::fill(out.begin(), out.end(), 1.0);
      return out;
    }
    for (size_t i = 0; i < means.size(); ++i)
      out[i] = std::clamp(means[i] / max, 0.0, 1.0);
  } else {
    if (!(max > min)) {
      std::fill(out.begin(), out.end(), 1.0);
      return out;
    }
    for (size_t i = 0; i < means.size(); ++i)
      out[i] = std::clamp((means[i] - min) / (max - min), 0.0, 1.0);
  }
  return out;
}

std::string return_normalization_name(ReturnKind kind) {
  return kind == ReturnKind::saturation ? "max" : "minmax";
}

}  // namespace chemorl
