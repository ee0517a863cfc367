#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "chemorl/config.hpp"
#include "chemorl/csv.hpp"
#include "chemorl/harness.hpp"

namespace fs = std::filesystem;
using namespace chemorl;

namespace {

ExperimentConfig resolve_config(const std::string& config_path, int case_id,
                                std::optional<std::uint64_t> seed,
                                bool paper_scale, const std::string& out_dir) {
  ExperimentConfig cfg = config_path.empty() ? default_case_config(case_id)
                                             : load_config_file(config_path);
  if (seed) cfg.training.seed = *seed;
  if (paper_scale) apply_paper_scale(cfg);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  cfg.validate();
  return cfg;
}

std::vector<ControlInput> read_actions_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const int c1 = table.column("I1");
  const int c2 = table.column("I2");
  std::vector<ControlInput> actions;
  for (const auto& row : table.rows)
    actions.push_back({parse_double(row[c1]), parse_double(row[c2])});
  return actions;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& actions_path,
                 const std::string& out_path) {
  const std::vector<ControlInput> actions = read_actions_csv(actions_path);
  for (const auto& a : actions)
    if (a.I1 < 0 || a.I1 > cfg.env.bounds.i_max_1 || a.I2 < 0 ||
        a.I2 > cfg.env.bounds.i_max_2)
      throw std::invalid_argument("action outside configured input bounds");
  IntegrationDiagnostics diag;
  const std::vector<SystemState> states =
      simulate_episode(cfg.env.x0, actions, cfg.env.params, cfg.env.op,
                       cfg.env.dt_hours, cfg.env.n_substeps, &diag);
  write_trajectory_csv(out_path, states, actions, cfg.env.dt_hours);
  std::cout << "wrote " << out_path << " (" << states.size() << " states, "
            << diag.clamped_components << " clamped components)\n";
  return 0;
}

int cmd_train(const ExperimentConfig& cfg) {
  ScenarioPlan plan;
  plan.reference = cfg.references.front();
  plan.ret = cfg.scenario_return;
  plan.training = cfg.training;
  plan.env = cfg.env;
  plan.name = plan.ret.kind == ReturnKind::quadratic
                  ? "qc"
                  : weight_scheme_name(plan.ret.scheme) + "_beta_" +
                        format_double(plan.ret.beta);
  const fs::path dir = fs::path(cfg.output_dir) / plan.name;
  const ScenarioResult r = run_scenario(plan, dir.string());
  std::cout << "scenario " << r.name << "\n"
            << "  epochs run        " << r.epochs_run << "\n"
            << "  best epoch        " << r.best_epoch << "\n"
            << "  best mean return  " << format_double(r.best_mean_return) << "\n"
            << "  NAAE (mean traj)  " << format_double(r.naae_mean_trajectory)
            << "\n"
            << "  NAAE per episode  " << format_double(r.naae_stats.mean)
            << " +- " << format_double(r.naae_stats.stddev) << "\n"
            << "  NAUC              " << format_double(r.nauc_value) << "\n"
            << "  artifacts in      " << dir.string() << "\n";
  return 0;
}

int cmd_experiment(const ExperimentConfig& cfg, int workers, bool dry_run) {
  RunOptions options;
  options.workers = workers;
  options.dry_run = dry_run;
  const ExperimentResult result = run_experiment(cfg, options);
  if (dry_run) {
    std::cout << "dry run: " << result.scenarios.size()
              << " scenarios planned, manifest written to " << cfg.output_dir
              << "/manifest.json\n";
    return 0;
  }
  int failed = 0;
  for (const auto& s : result.scenarios)
    if (s.failed) ++failed;
  std::cout << "completed " << (result.scenarios.size() - failed) << "/"
            << result.scenarios.size() << " scenarios";
  if (failed) std::cout << " (" << failed << " failed; see manifest.json)";
  std::cout << "\nrank table:\n";
  for (const auto& s : result.rank_table)
    std::cout << "  " << s.rank_sum << "  " << s.scenario << " (NAAE "
              << format_double(s.naae) << ", NAUC " << format_double(s.nauc)
              << ")\n";
  return failed == 0 ? 0 : 1;
}

int cmd_evaluate(const ExperimentConfig& cfg, const std::string& traj_path,
                 const std::string& out_path) {
  const auto episodes = read_trajectory_states_csv(traj_path);
  const auto refs = reference_series(cfg.references.front(), cfg.env.n_steps,
                                     cfg.env.dt_hours);
  TrackedStates tracked;
  const double naae_mean = naae_of_mean_trajectory(episodes, refs, tracked);
  const NaaeStats stats = naae_episode_stats(episodes, refs, tracked);
  nlohmann::json j;
  j["episodes"] = episodes.size();
  j["naae_mean_trajectory"] = naae_mean;
  j["naae_episode_mean"] = stats.mean;
  j["naae_episode_std"] = stats.stddev;
  j["naae_std_kind"] = "population";
  const std::string text = j.dump(2);
  if (out_path.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream out(out_path);
    out << text << '\n';
    std::cout << "wrote " << out_path << '\n';
  }
  return 0;
}

int cmd_rank(const std::string& experiment_dir, const std::string& out_path) {
  const std::string out = out_path.empty()
                              ? (fs::path(experiment_dir) / "rank_table.csv").string()
                              : out_path;
  const auto ranked = rank_from_directory(experiment_dir, out);
  for (const auto& s : ranked)
    std::cout << s.rank_sum << "  " << s.scenario << " (NAAE "
              << format_double(s.naae) << ", NAUC " << format_double(s.nauc)
              << ")\n";
  std::cout << "wrote " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Policy-gradient training for multi-setpoint and multi-trajectory "
      "tracking of a two-strain optogenetic chemostat consortium"};
  app.require_subcommand(1);

  std::string config_path, out_dir, actions_path, traj_path, out_file,
      experiment_dir;
  int case_id = 1;
  std::optional<std::uint64_t> seed;
  bool paper_scale = false, dry_run = false;
  int workers = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--case", case_id, "control case 1-4 when no config given")
        ->check(CLI::Range(1, 4));
    cmd->add_option("--seed", seed, "override training seed");
    cmd->add_flag("--paper-scale", paper_scale,
                  "publication-scale training budget");
    cmd->add_option("--out", out_dir, "output directory");
  };

  CLI::App* train_cmd =
      app.add_subcommand("train", "train the single scenario in the config");
  add_common(train_cmd);

  CLI::App* exp_cmd =
      app.add_subcommand("experiment", "run a full case's scenario grid");
  add_common(exp_cmd);
  exp_cmd->add_option("--workers", workers, "concurrent scenarios")
      ->check(CLI::PositiveNumber);
  exp_cmd->add_flag("--dry-run", dry_run,
                    "expand and validate scenarios, write manifest only");

  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "open-loop rollout from an action file");
  add_common(sim_cmd);
  sim_cmd->add_option("--actions", actions_path, "CSV with I1,I2 columns")
      ->required();
  sim_cmd->add_option("--trajectory-out", out_file, "output trajectory CSV");

  CLI::App* eval_cmd = app.add_subcommand(
      "evaluate", "tracking metrics from a saved trajectory batch");
  add_common(eval_cmd);
  eval_cmd
      ->add_option("--trajectories", traj_path,
                   "best_epoch_trajectories.csv to score")
      ->required();
  eval_cmd->add_option("--metrics-out", out_file, "write metrics JSON here");

  CLI::App* rank_cmd = app.add_subcommand(
      "rank", "aggregate a rank table from scenario metrics");
  rank_cmd->add_option("--experiment-dir", experiment_dir,
                       "directory containing scenario subdirectories")
      ->required();
  rank_cmd->add_option("--rank-out", out_file, "output rank table CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rank_cmd->parsed()) return cmd_rank(experiment_dir, out_file);

    ExperimentConfig cfg =
        resolve_config(config_path, case_id, seed, paper_scale, out_dir);
    if (train_cmd->parsed()) return cmd_train(cfg);
    if (exp_cmd->parsed()) return cmd_experiment(cfg, workers, dry_run);
    if (sim_cmd->parsed())
      return cmd_simulate(cfg, actions_path,
                          out_file.empty() ? "trajectory.csv" : out_file);
    if (eval_cmd->parsed()) return cmd_evaluate(cfg, traj_path, out_file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
