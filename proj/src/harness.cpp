#include "chemorl/harness.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "chemorl/csv.hpp"

namespace chemorl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string replace_all(std::string s, const std::string& from,
                        const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string reference_tag(const ReferenceSpec& ref) {
  if (ref.kind == ReferenceKind::constant)
    return "b1_" + format_double(ref.b1_setpoint) + "_b2_" +
           format_double(ref.b2_setpoint);
  return "phi_" + format_double(ref.frequency);
}

std::string scenario_name(const ExperimentConfig& cfg, const ReferenceSpec& ref,
                          bool quadratic, WeightScheme scheme, double beta) {
  std::string base = quadratic ? "qc" : cfg.scenario_name_template;
  if (!quadratic) {
    base = replace_all(base, "{scheme}", weight_scheme_name(scheme));
    base = replace_all(base, "{beta}", format_double(beta));
  }
  const bool multi_ref = cfg.references.size() > 1;
  if (base.find("{ref}") != std::string::npos)
    base = replace_all(base, "{ref}", reference_tag(ref));
  else if (multi_ref)
    base = reference_tag(ref) + "__" + base;
  return base;
}

}  // namespace

std::vector<ScenarioPlan> expand_scenarios(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ScenarioPlan> plans;
  for (const auto& ref : cfg.references) {
    for (auto scheme : cfg.grid.schemes) {
      for (double beta : cfg.grid.betas) {
        ScenarioPlan plan;
        plan.name = scenario_name(cfg, ref, false, scheme, beta);
        plan.reference = ref;
        plan.ret = {ReturnKind::saturation, cfg.grid.alpha_max, beta, scheme};
        plan.training = cfg.training;
        plan.env = cfg.env;
        plans.push_back(std::move(plan));
      }
    }
    if (cfg.grid.include_quadratic) {
      ScenarioPlan plan;
      plan.name = scenario_name(cfg, ref, true, {}, 0.0);
      plan.reference = ref;
      plan.ret.kind = ReturnKind::quadratic;
      plan.training = cfg.training;
      plan.env = cfg.env;
      plans.push_back(std::move(plan));
    }
  }
  return plans;
}

namespace {

void write_training_log_csv(const std::string& path,
                            const std::vector<EpochRecord>& records) {
  std::ofstream out(path);
  out << "epoch,mean_return,std_return,best_flag\n";
  for (const auto& r : records)
    out << r.epoch << ',' << format_double(r.mean_return) << ','
        << format_double(r.std_return) << ',' << (r.best_flag ? 1 : 0) << '\n';
}

void write_returns_csv(const std::string& path,
                       const std::vector<EpochRecord>& records,
                       const std::vector<double>& normalized) {
  std::ofstream out(path);
  out << "epoch,mean_return,std_return,normalized_mean_return\n";
  for (size_t i = 0; i < records.size(); ++i)
    out << records[i].epoch << ',' << format_double(records[i].mean_return)
        << ',' << format_double(records[i].std_return) << ','
        << format_double(normalized[i]) << '\n';
}

}  // namespace

void write_references_csv(const std::string& path,
                          const std::vector<ReferencePoint>& refs, double dt) {
  std::ofstream out(path);
  out << "t,b1_star,b2_star\n";
  for (size_t k = 0; k < refs.size(); ++k)
    out << format_double((k + 1) * dt) << ',' << format_double(refs[k].b1_star)
        << ',' << format_double(refs[k].b2_star) << '\n';
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<SystemState>& states,
                          const std::vector<ControlInput>& actions, double dt) {
  if (states.size() != actions.size() + 1)
    throw std::invalid_argument("trajectory/action length mismatch");
  std::ofstream out(path);
  out << "t,g,b1,b2,a1,a2,I1,I2\n";
  for (size_t t = 0; t < states.size(); ++t) {
    // The terminal row repeats the final held input (stepwise-constant plot
    // convention).
    const ControlInput& u = actions.empty()
                                ? ControlInput{}
                                : actions[std::min(t, actions.size() - 1)];
    const auto s = states[t].to_array();
    out << format_double(t * dt);
    for (double v : s) out << ',' << format_double(v);
    out << ',' << format_double(u.I1) << ',' << format_double(u.I2) << '\n';
  }
}

void write_trajectories_csv(const std::string& path,
                            const std::vector<EpisodeTrajectory>& episodes,
                            double dt) {
  std::ofstream out(path);
  out << "episode,t,g,b1,b2,a1,a2,I1,I2\n";
  for (size_t k = 0; k < episodes.size(); ++k) {
    const auto& ep = episodes[k];
    for (size_t t = 0; t < ep.states.size(); ++t) {
      const ControlInput& u =
          ep.applied_actions.empty()
              ? ControlInput{}
              : ep.applied_actions[std::min(t, ep.applied_actions.size() - 1)];
      const auto s = ep.states[t].to_array();
      out << k << ',' << format_double(t * dt);
      for (double v : s) out << ',' << format_double(v);
      out << ',' << format_double(u.I1) << ',' << format_double(u.I2) << '\n';
    }
  }
}

std::vector<std::vector<SystemState>> read_trajectory_states_csv(
    const std::string& path) {
  const CsvTable table = read_csv(path);
  const int c_ep = table.column("episode");
  const int c_g = table.column("g");
  const int c_b1 = table.column("b1");
  const int c_b2 = table.column("b2");
  const int c_a1 = table.column("a1");
  const int c_a2 = table.column("a2");
  std::vector<std::vector<SystemState>> episodes;
  for (const auto& row : table.rows) {
    const size_t ep = static_cast<size_t>(parse_double(row[c_ep]));
    if (episodes.size() <= ep) episodes.resize(ep + 1);
    episodes[ep].push_back({parse_double(row[c_g]), parse_double(row[c_b1]),
                            parse_double(row[c_b2]), parse_double(row[c_a1]),
                            parse_double(row[c_a2])});
  }
  return episodes;
}

void write_rank_table_csv(const std::string& path,
                          const std::vector<ScenarioScore>& scores) {
  std::ofstream out(path);
  out << "scenario,naae,nauc,rank_naae,rank_nauc,rank_sum\n";
  for (const auto& s : scores)
    out << s.scenario << ',' << format_double(s.naae) << ','
        << format_double(s.nauc) << ',' << s.rank_naae << ',' << s.rank_nauc
        << ',' << s.rank_sum << '\n';
}

ScenarioResult run_scenario(const ScenarioPlan& plan,
                            const std::string& scenario_dir) {
  ScenarioResult result;
  result.name = plan.name;
  fs::create_directories(scenario_dir);

  const ReturnConfig return_cfg = plan.ret.resolve(plan.env.n_steps);
  const TrainResult trained =
      train(plan.training, plan.env, return_cfg, plan.reference);

  result.best_epoch = trained.best_epoch;
  result.epochs_run = static_cast<int>(trained.records.size());
  result.best_mean_return = trained.best_mean_return;
  result.epoch0_mean_return = trained.records.front().mean_return;
  for (const auto& r : trained.records) result.train_seconds += r.wall_time_s;

  // Learning-curve metrics on the realized (possibly early-stopped) curve.
  std::vector<double> means;
  means.reserve(trained.records.size());
  for (const auto& r : trained.records) means.push_back(r.mean_return);
  const std::vector<double> normalized =
      normalize_return_curve(return_cfg.kind, means);
  result.nauc_value = nauc(normalized);

  // Best-epoch episode batch, re-rolled bit-identically from its stream keys.
  const std::vector<EpisodeTrajectory> batch =
      replay_epoch(trained.best_policy, plan.training, plan.env, return_cfg,
                   plan.reference, trained.best_epoch);
  std::vector<std::vector<SystemState>> episode_states;
  episode_states.reserve(batch.size());
  for (const auto& ep : batch) episode_states.push_back(ep.states);

  const std::vector<ReferencePoint> refs =
      reference_series(plan.reference, plan.env.n_steps, plan.env.dt_hours);
  const TrackedStates tracked = return_cfg.tracked;
  result.naae_mean_trajectory =
      naae_of_mean_trajectory(episode_states, refs, tracked);
  result.naae_stats = naae_episode_stats(episode_states, refs, tracked);
  {
    std::vector<double> rb1, rb2, sb1, sb2;
    const size_t n_steps = refs.size();
    std::vector<SystemState> mean(n_steps + 1);
    for (const auto& ep : episode_states)
      for (size_t t = 0; t <= n_steps; ++t) {
        mean[t].b1 += ep[t].b1;
        mean[t].b2 += ep[t].b2;
      }
    for (auto& s : mean) {
      s.b1 /= static_cast<double>(episode_states.size());
      s.b2 /= static_cast<double>(episode_states.size());
    }
    for (size_t t = 1; t <= n_steps; ++t) {
      sb1.push_back(mean[t].b1);
      sb2.push_back(mean[t].b2);
      rb1.push_back(refs[t - 1].b1_star);
      rb2.push_back(refs[t - 1].b2_star);
    }
    if (tracked.b1) result.naae_per_state_values.push_back(naae_per_state(sb1, rb1));
    if (tracked.b2) result.naae_per_state_values.push_back(naae_per_state(sb2, rb2));
  }

  result.checkpoint_best_hash = trained.best_policy.content_hash();
  result.checkpoint_final_hash = trained.final_policy.content_hash();

  const fs::path dir(scenario_dir);
  write_training_log_csv((dir / "training_log.csv").string(), trained.records);
  write_returns_csv((dir / "returns.csv").string(), trained.records, normalized);
  write_trajectories_csv((dir / "best_epoch_trajectories.csv").string(), batch,
                         plan.env.dt_hours);
  write_references_csv((dir / "references.csv").string(), refs,
                       plan.env.dt_hours);
  trained.best_policy.save((dir / "checkpoint_best.txt").string(),
                           plan.training.seed);
  trained.final_policy.save((dir / "checkpoint_final.txt").string(),
                            plan.training.seed);

  json metrics;
  metrics["scenario"] = plan.name;
  metrics["return_kind"] =
      plan.ret.kind == ReturnKind::saturation ? "saturation" : "quadratic";
  if (plan.ret.kind == ReturnKind::saturation) {
    metrics["beta"] = plan.ret.beta;
    metrics["weight_scheme"] = weight_scheme_name(plan.ret.scheme);
    metrics["alpha_max"] = plan.ret.alpha_max;
  }
  metrics["best_epoch"] = result.best_epoch;
  metrics["epochs_run"] = result.epochs_run;
  metrics["best_mean_return"] = result.best_mean_return;
  metrics["epoch0_mean_return"] = result.epoch0_mean_return;
  metrics["naae_mean_trajectory"] = result.naae_mean_trajectory;
  metrics["naae_per_state"] = result.naae_per_state_values;
  metrics["naae_episode_mean"] = result.naae_stats.mean;
  metrics["naae_episode_std"] = result.naae_stats.stddev;
  metrics["naae_std_kind"] = "population";
  metrics["nauc"] = result.nauc_value;
  metrics["nauc_epochs"] = result.epochs_run;
  metrics["return_normalization"] = return_normalization_name(return_cfg.kind);
  metrics["checkpoint_best_hash"] = result.checkpoint_best_hash;
  metrics["checkpoint_final_hash"] = result.checkpoint_final_hash;
  std::ofstream mout(dir / "metrics.json");
  mout << metrics.dump(2) << '\n';

  return result;
}

namespace {

json rng_streams_json() {
  return {{"scheme", "splitmix64-keyed-v1"},
          {"key", "(seed, epoch, episode, purpose)"},
          {"purposes",
           {{"policy_init", 1}, {"action_sampling", 2}, {"disturbance", 3}}}};
}

json scenario_manifest_entry(const ScenarioPlan& plan,
                             const ScenarioResult* result,
                             const std::string& status) {
  json s;
  s["name"] = plan.name;
  s["status"] = status;
  s["seed"] = plan.training.seed;
  s["return_kind"] =
      plan.ret.kind == ReturnKind::saturation ? "saturation" : "quadratic";
  if (plan.ret.kind == ReturnKind::saturation) {
    s["beta"] = plan.ret.beta;
    s["weight_scheme"] = weight_scheme_name(plan.ret.scheme);
  }
  if (plan.training.uncertainty) {
    s["disturbance"] = {
        {"relative_std", plan.training.uncertainty->relative_std},
        {"truncation_sigmas", 3},
        {"targets", {"g0", "b1_0", "b2_0", "a1_0", "a2_0", "q_a_max_1",
                     "q_a_max_2"}},
        {"stream", "derive(seed, epoch, episode, purpose=disturbance)"}};
  }
  if (result && !result->failed) {
    s["best_epoch"] = result->best_epoch;
    s["epochs_run"] = result->epochs_run;
    s["best_mean_return"] = result->best_mean_return;
    s["checkpoint_best_hash"] = result->checkpoint_best_hash;
    s["checkpoint_final_hash"] = result->checkpoint_final_hash;
  }
  if (result && result->failed) s["error"] = result->error;
  return s;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<ScenarioPlan> plans = expand_scenarios(cfg);
  const fs::path root(cfg.output_dir);
  fs::create_directories(root);

  ExperimentResult result;
  result.scenarios.resize(plans.size());

  if (options.dry_run) {
    json manifest;
    manifest["schema_version"] = 1;
    manifest["kind"] = "experiment-manifest";
    manifest["dry_run"] = true;
    manifest["case"] = cfg.case_id;
    manifest["seed"] = cfg.training.seed;
    manifest["config"] = config_to_json(cfg);
    manifest["rng_streams"] = rng_streams_json();
    manifest["scenarios"] = json::array();
    for (const auto& plan : plans)
      manifest["scenarios"].push_back(
          scenario_manifest_entry(plan, nullptr, "planned"));
    std::ofstream out(root / "manifest.json");
    out << manifest.dump(2) << '\n';
    for (size_t i = 0; i < plans.size(); ++i)
      result.scenarios[i].name = plans[i].name;
    return result;
  }

  std::atomic<size_t> next{0};
  std::mutex io_mutex;
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= plans.size()) break;
      ScenarioResult sr;
      try {
        sr = run_scenario(plans[i], (root / plans[i].name).string());
      } catch (const std::exception& e) {
        sr.name = plans[i].name;
        sr.failed = true;
        sr.error = e.what();
      }
      if (!options.quiet) {
        std::lock_guard<std::mutex> lock(io_mutex);
        if (sr.failed)
          std::cout << "[scenario] " << sr.name << " FAILED: " << sr.error
                    << '\n';
        else
          std::cout << "[scenario] " << sr.name << " best epoch "
                    << sr.best_epoch << " mean return "
                    << format_double(sr.best_mean_return) << " NAAE "
                    << format_double(sr.naae_stats.mean) << '\n';
      }
      result.scenarios[i] = std::move(sr);
    }
  };

  const int workers =
      std::max(1, std::min<int>(options.workers, static_cast<int>(plans.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<ScenarioScore> scores;
  for (const auto& sr : result.scenarios)
    if (!sr.failed)
      scores.push_back(
          {sr.name, sr.naae_mean_trajectory, sr.nauc_value, 0, 0, 0});
  if (!scores.empty()) {
    result.rank_table = rank_scenarios(std::move(scores));
    write_rank_table_csv((root / "rank_table.csv").string(), result.rank_table);
  }

  json manifest;
  manifest["schema_version"] = 1;
  manifest["kind"] = "experiment-manifest";
  manifest["dry_run"] = false;
  manifest["case"] = cfg.case_id;
  manifest["seed"] = cfg.training.seed;
  manifest["config"] = config_to_json(cfg);
  manifest["rng_streams"] = rng_streams_json();
  manifest["scenarios"] = json::array();
  for (size_t i = 0; i < plans.size(); ++i)
    manifest["scenarios"].push_back(scenario_manifest_entry(
        plans[i], &result.scenarios[i],
        result.scenarios[i].failed ? "failed" : "completed"));
  manifest["elapsed_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::ofstream out(root / "manifest.json");
  out << manifest.dump(2) << '\n';
  return result;
}

std::vector<ScenarioScore> rank_from_directory(const std::string& experiment_dir,
                                               const std::string& out_csv) {
  std::vector<fs::path> metric_files;
  for (const auto& entry : fs::directory_iterator(experiment_dir)) {
    if (!entry.is_directory()) continue;
    const fs::path m = entry.path() / "metrics.json";
    if (fs::exists(m)) metric_files.push_back(m);
  }
  std::sort(metric_files.begin(), metric_files.end());
  if (metric_files.empty())
    throw std::runtime_error("no scenario metrics.json found under " +
                             experiment_dir);

  std::vector<ScenarioScore> scores;
  for (const auto& path : metric_files) {
    std::ifstream in(path);
    json j;
    in >> j;
    scores.push_back({j.at("scenario").get<std::string>(),
                      j.at("naae_mean_trajectory").get<double>(),
                      j.at("nauc").get<double>(), 0, 0, 0});
  }
  auto ranked = rank_scenarios(std::move(scores));
  if (!out_csv.empty()) write_rank_table_csv(out_csv, ranked);
  return ranked;
}

}  // namespace chemorl
