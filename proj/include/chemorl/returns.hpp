#pragma once

#include <array>
#include <string>
#include <vector>

#include "chemorl/dynamics.hpp"
#include "chemorl/reference.hpp"

namespace chemorl {

enum class ReturnKind { quadratic, saturation };

/// Stage/terminal weighting presets for the saturation return.
enum class WeightScheme {
  terminal_only,        // "tr"
  equal_stage_terminal, // "1_sr_1_tr"
  terminal_double,      // "1_sr_2_tr"
  terminal_triple,      // "1_sr_3_tr"
};

WeightScheme weight_scheme_from_name(const std::string& name);
std::string weight_scheme_name(WeightScheme scheme);

/// Stage weights w_1..w_{N_s-1} followed by the terminal weight w_{N_s};
/// n_steps entries in total.
std::vector<double> weight_scheme(WeightScheme scheme, int n_steps);

/// Which of the two reference-tracked biomass states participate in the
/// return. The untracked chemostat states always carry zero weight.
struct TrackedStates {
  bool b1 = true;
  bool b2 = true;
  int count() const { return (b1 ? 1 : 0) + (b2 ? 1 : 0); }
};

struct ReturnConfig {
  ReturnKind kind = ReturnKind::saturation;
  TrackedStates tracked;

  // quadratic: diagonal weights on the tracked states (stage, terminal)
  double q_b1 = 1.0, q_b2 = 1.0;
  double qt_b1 = 1.0, qt_b2 = 1.0;

  // saturation
  double alpha_max = 1.0;
  double beta_b1 = 27.0, beta_b2 = 27.0;
  std::vector<double> weights;  // stage w_1..w_{Ns-1} then terminal w_{Ns}

  void validate(int n_steps) const;
};

struct EpisodeReturn {
  double total = 0.0;
  std::vector<double> rewards;  // R_1..R_{N_s}
};

/// Negated quadratic tracking cost; zero iff the tracked states match their
/// references at every rewarded step. Rewards start at step 1.
EpisodeReturn quadratic_return(const std::vector<SystemState>& states,
                               const std::vector<ReferencePoint>& refs,
                               const ReturnConfig& cfg);

/// Product of reciprocal saturation factors per tracked state: each factor
/// beta/(beta + squared error) lies in (0, 1], so a step's reward reaches
/// w*alpha_max only when every tracked error is zero.
EpisodeReturn saturation_return(const std::vector<SystemState>& states,
                                const std::vector<ReferencePoint>& refs,
                                const ReturnConfig& cfg);

EpisodeReturn episode_return(const std::vector<SystemState>& states,
                             const std::vector<ReferencePoint>& refs,
                             const ReturnConfig& cfg);

/// Batch standardization used by the gradient estimator:
/// (J_k - mean) / (population std + eps_mach).
std::vector<double> normalize_returns(const std::vector<double>& totals,
                                      double eps_mach = 1e-8);

/// Per-run [0,1] display scaling of a mean-return curve. Saturation curves
/// divide by the run maximum; quadratic curves are min-max scaled since a
/// negative return cannot be brought into [0,1] by its maximum alone.
/// A flat curve maps to all ones.
std::vector<double> normalize_return_curve(ReturnKind kind,
                                           const std::vector<double>& means);

/// Name of the scaling rule applied by normalize_return_curve; recorded in
/// metrics output so the two conventions are never conflated.
std::string return_normalization_name(ReturnKind kind);

}  // namespace chemorl
