#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chemorl/config.hpp"
#include "chemorl/metrics.hpp"
#include "chemorl/trainer.hpp"

namespace chemorl {

/// A fully resolved unit of work: one return configuration against one
/// reference, trained with one budget/seed.
struct ScenarioPlan {
  std::string name;
  ReferenceSpec reference;
  ReturnSpec ret;
  TrainingConfig training;
  Environment env;
};

/// Cartesian product of the grid's weight schemes and betas (plus the
/// quadratic benchmark) over every reference in the config. With a single
/// reference the names match the published labels (`1_sr_2_tr_beta_27`,
/// `qc`); with several, each name is prefixed by a reference tag.
std::vector<ScenarioPlan> expand_scenarios(const ExperimentConfig& cfg);

struct ScenarioResult {
  std::string name;
  bool failed = false;
  std::string error;

  int best_epoch = -1;
  int epochs_run = 0;
  double best_mean_return = 0.0;
  double epoch0_mean_return = 0.0;
  double naae_mean_trajectory = 0.0;
  std::vector<double> naae_per_state_values;
  NaaeStats naae_stats;
  double nauc_value = 0.0;
  std::string checkpoint_best_hash;
  std::string checkpoint_final_hash;
  double train_seconds = 0.0;
};

struct ExperimentResult {
  std::vector<ScenarioResult> scenarios;  // in expansion order
  std::vector<ScenarioScore> rank_table;  // successful scenarios only
};

struct RunOptions {
  int workers = 1;       // concurrent scenarios
  bool dry_run = false;  // expand, validate and write the manifest only
  bool quiet = false;
};

/// Trains one scenario and writes its artifact directory:
/// training_log.csv, returns.csv, best_epoch_trajectories.csv,
/// references.csv, metrics.json, checkpoint_best.txt, checkpoint_final.txt.
ScenarioResult run_scenario(const ScenarioPlan& plan,
                            const std::string& scenario_dir);

/// Runs a whole case: every scenario in isolation (a failure is recorded,
/// not propagated), then the rank table and the manifest at the root.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const RunOptions& options);

/// Rebuilds rank_table.csv from the metrics.json files below a directory.
std::vector<ScenarioScore> rank_from_directory(const std::string& experiment_dir,
                                               const std::string& out_csv);

// CSV artifacts. Single trajectories use header t,g,b1,b2,a1,a2,I1,I2;
// episode batches prepend an episode column.
void write_trajectory_csv(const std::string& path,
                          const std::vector<SystemState>& states,
                          const std::vector<ControlInput>& actions, double dt);
void write_trajectories_csv(const std::string& path,
                            const std::vector<EpisodeTrajectory>& episodes,
                            double dt);
std::vector<std::vector<SystemState>> read_trajectory_states_csv(
    const std::string& path);
void write_references_csv(const std::string& path,
                          const std::vector<ReferencePoint>& refs, double dt);
void write_rank_table_csv(const std::string& path,
                          const std::vector<ScenarioScore>& scores);

}  // namespace chemorl
