#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "chemorl/reference.hpp"
#include "chemorl/returns.hpp"
#include "chemorl/trainer.hpp"

namespace chemorl {

/// Return-function choice as written in config files; the stage/terminal
/// weight vector is resolved against the horizon when a scenario is built.
struct ReturnSpec {
  ReturnKind kind = ReturnKind::saturation;
  double alpha_max = 1.0;
  double beta = 27.0;
  WeightScheme scheme = WeightScheme::equal_stage_terminal;

  ReturnConfig resolve(int n_steps) const;
};

/// Grid of return configurations evaluated by `experiment`.
struct ScenarioGrid {
  std::vector<WeightScheme> schemes = {
      WeightScheme::terminal_only, WeightScheme::equal_stage_terminal,
      WeightScheme::terminal_double, WeightScheme::terminal_triple};
  std::vector<double> betas = {3.0, 9.0, 27.0};
  bool include_quadratic = true;
  double alpha_max = 1.0;
};

struct ExperimentConfig {
  int case_id = 1;
  Environment env;
  std::vector<ReferenceSpec> references;
  TrainingConfig training;
  ReturnSpec scenario_return;  // used by the single-scenario `train` command
  ScenarioGrid grid;
  std::string scenario_name_template = "{scheme}_beta_{beta}";
  std::string output_dir;

  void validate() const;
};

/// Nominal configuration for one of the four control cases:
///  1 multi-setpoint, 2 multi-trajectory, 3/4 the same under 7% uncertainty.
ExperimentConfig default_case_config(int case_id);

/// Restores the publication-scale training budget (500 episodes/epoch;
/// 500 epochs for setpoint cases, 800 for trajectory cases).
void apply_paper_scale(ExperimentConfig& cfg);

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace chemorl
