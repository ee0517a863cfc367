// Acceptance suite: one callable criterion per published requirement, each
// printing a single [PASS]/[FAIL] line. Run with --criteria N[,M...] to
// select a subset; default runs everything.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chemorl/config.hpp"
#include "chemorl/harness.hpp"
#include "chemorl/metrics.hpp"

using namespace chemorl;
namespace fs = std::filesystem;

namespace {

struct CriterionFailure {
  std::string message;
};

#define ACCEPT(cond, msg)                                       \
  do {                                                          \
    if (!(cond)) {                                              \
      std::ostringstream oss;                                   \
      oss << msg;                                               \
      throw CriterionFailure{oss.str()};                        \
    }                                                           \
  } while (0)

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("chemorl_accept_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CriterionFailure{"missing file " + path.string()};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Environment nominal_env(bool trajectory_case) {
  Environment env;
  env.params = nominal_parameters();
  env.op = nominal_operating_conditions();
  env.x0 = trajectory_case ? trajectory_initial_state() : setpoint_initial_state();
  env.bounds = {10.0 * env.params.strain[0].k_I, 10.0 * env.params.strain[1].k_I};
  return env;
}

// ---------------------------------------------------------------------------
// 1. analytic score gradient vs central finite differences

// Smallest |pre-activation| across all hidden units; a finite difference is
// only a valid derivative probe when no rectifier kink lies within the
// perturbation radius, so observations are redrawn until this clears a
// safety margin.
double min_abs_preactivation(const GaussianPolicy& policy,
                             const Observation& obs) {
  const Eigen::VectorXd flat = policy.to_flat();
  const int widths[5] = {15, 20, 20, 20, 20};
  size_t pos = 0;
  std::vector<double> input(obs.v.begin(), obs.v.end());
  double min_abs = std::numeric_limits<double>::infinity();
  for (int layer = 0; layer < 4; ++layer) {
    const int in = widths[layer], out = widths[layer + 1];
    std::vector<double> z(out, 0.0);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) z[r] += flat[pos + r * in + c] * input[c];
    pos += static_cast<size_t>(out) * in;
    for (int r = 0; r < out; ++r) {
      z[r] += flat[pos + r];
      min_abs = std::min(min_abs, std::abs(z[r]));
      if (z[r] < 0.0) z[r] *= 0.1;
    }
    pos += out;
    input = z;
  }
  return min_abs;
}

void criterion_gradient_correctness() {
  RandomStream rng(2026);
  const int pairs = 24;
  double worst = 0.0;
  for (int pair = 0; pair < pairs; ++pair) {
    RandomStream init(9000 + pair);
    GaussianPolicy policy = GaussianPolicy::initialize(
        PolicyLayout{}, 1e-3, InputBounds{10.52, 13.4}, init);

    const int steps = 2 + static_cast<int>(rng.next_double() * 4.0);
    std::vector<Observation> obs(steps);
    std::vector<std::array<double, 2>> raw(steps);
    for (int t = 0; t < steps; ++t) {
      do {
        for (double& x : obs[t].v) x = 3.0 * (2.0 * rng.next_double() - 1.0);
      } while (min_abs_preactivation(policy, obs[t]) < 1e-3);
      const ActionDistribution dist = policy.forward(obs[t]);
      for (int c = 0; c < 2; ++c)
        raw[t][c] = dist.mean[c] + dist.stddev[c] * rng.next_gaussian();
    }

    const Eigen::VectorXd analytic = policy.grad_log_prob_sum(obs, raw);
    Eigen::VectorXd theta = policy.to_flat();
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(theta[i]));
      const double saved = theta[i];
      auto eval = [&](double value) {
        theta[i] = value;
        policy.from_flat(theta);
        double total = 0.0;
        for (int t = 0; t < steps; ++t)
          total += log_prob(policy.forward(obs[t]), raw[t]);
        return total;
      };
      const double fd = (eval(saved + h) - eval(saved - h)) / (2.0 * h);
      theta[i] = saved;
      policy.from_flat(theta);
      const double rel = std::abs(analytic[i] - fd) /
                         std::max({std::abs(analytic[i]), std::abs(fd), 1e-5});
      worst = std::max(worst, rel);
    }
  }
  ACCEPT(worst < 1e-4, "max relative FD error " << worst << " >= 1e-4 over "
                                                << pairs << " pairs");
}

// ---------------------------------------------------------------------------
// 2. RK4 order on the nominal model + analytic washout

void criterion_integrator_order() {
  const KineticParameters p = nominal_parameters();
  const OperatingConditions op = nominal_operating_conditions();
  const SystemState x0 = setpoint_initial_state();
  const ControlInput u{1.052, 1.34};

  auto error_at = [&](int n_substeps) {
    const SystemState coarse = integrate_interval(x0, u, p, op, 1.0, n_substeps);
    const SystemState fine =
        integrate_interval(x0, u, p, op, 1.0, 40 * n_substeps);
    const auto c = coarse.to_array();
    const auto f = fine.to_array();
    double err = 0.0;
    for (int i = 0; i < 5; ++i) err = std::max(err, std::abs(c[i] - f[i]));
    return err;
  };
  // Substep pairs inside the asymptotic regime (the early amino-acid
  // transient dominates the error at coarser grids).
  const double e1 = error_at(16);
  const double e2 = error_at(32);
  const double order = std::log2(e1 / e2);
  ACCEPT(order > 3.7 && order < 4.3,
         "observed RK4 order " << order << " outside [3.7, 4.3]");

  const OperatingConditions empty_feed{0.15, 1e-300};
  SystemState washout{0.0, 1.25, 0.4, 0.0, 0.0};
  for (double t_total : {1.0, 5.0}) {
    SystemState x = washout;
    for (int hour = 0; hour < static_cast<int>(t_total); ++hour)
      x = integrate_interval(x, {0.0, 0.0}, p, empty_feed, 1.0, 20);
    const double expect1 = washout.b1 * std::exp(-0.15 * t_total);
    const double expect2 = washout.b2 * std::exp(-0.15 * t_total);
    ACCEPT(std::abs(x.b1 - expect1) <= 1e-8 * expect1,
           "washout b1 off by " << std::abs(x.b1 - expect1) / expect1);
    ACCEPT(std::abs(x.b2 - expect2) <= 1e-8 * expect2,
           "washout b2 off by " << std::abs(x.b2 - expect2) / expect2);
  }
}

// ---------------------------------------------------------------------------
// 3. kinetics anchors and the Monod bound over random states

void criterion_kinetics_anchors() {
  const KineticParameters p = nominal_parameters();
  SystemState x{1.0, 0.1, 0.1, 0.01, 0.01};
  const KineticRates half =
      kinetic_rates(x, {p.strain[0].k_I, p.strain[1].k_I}, p);
  ACCEPT(std::abs(half.qa1 - p.strain[0].q_a_max / 2) <=
             1e-12 * p.strain[0].q_a_max,
         "qa1 at I=k_I not half-saturated: " << half.qa1);
  ACCEPT(std::abs(half.qa2 - p.strain[1].q_a_max / 2) <=
             1e-12 * p.strain[1].q_a_max,
         "qa2 at I=k_I not half-saturated: " << half.qa2);

  SystemState starved = x;
  starved.g = 0.0;
  const KineticRates none = kinetic_rates(starved, {5.0, 5.0}, p);
  ACCEPT(none.mu1 == 0.0 && none.mu2 == 0.0, "mu nonzero at g=0");

  RandomStream rng(31337);
  for (int i = 0; i < 100000; ++i) {
    SystemState s{200.0 * rng.next_double(), 10.0 * rng.next_double(),
                  10.0 * rng.next_double(), 0.1 * rng.next_double(),
                  0.1 * rng.next_double()};
    const ControlInput input{21.0 * rng.next_double(), 27.0 * rng.next_double()};
    const KineticRates r = kinetic_rates(s, input, p);
    ACCEPT(r.mu1 >= 0.0 && r.mu1 <= p.strain[0].mu_max,
           "mu1 bound violated: " << r.mu1);
    ACCEPT(r.mu2 >= 0.0 && r.mu2 <= p.strain[1].mu_max,
           "mu2 bound violated: " << r.mu2);
    ACCEPT(r.qa1 <= p.strain[0].q_a_max && r.qa2 <= p.strain[1].q_a_max,
           "qa bound violated");
  }
}

// ---------------------------------------------------------------------------
// 4. return-function properties over random trajectories

void criterion_return_properties() {
  RandomStream rng(4242);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_double() * 17.0);
    const double beta = 1.0 + 30.0 * rng.next_double();
    const auto scheme =
        static_cast<WeightScheme>(static_cast<int>(rng.next_double() * 4.0));

    ReturnConfig sat;
    sat.kind = ReturnKind::saturation;
    sat.alpha_max = 0.5 + 2.0 * rng.next_double();
    sat.beta_b1 = beta;
    sat.beta_b2 = beta;
    sat.weights = weight_scheme(scheme, n);

    ReturnConfig quad;
    quad.kind = ReturnKind::quadratic;

    std::vector<SystemState> states(n + 1);
    std::vector<ReferencePoint> refs(n);
    const bool perfect = trial % 10 == 0;
    for (int t = 0; t < n; ++t) {
      refs[t] = {1.0 + 4.0 * rng.next_double(), 1.0 + 4.0 * rng.next_double()};
      states[t + 1].b1 = perfect ? refs[t].b1_star : 8.0 * rng.next_double();
      states[t + 1].b2 = perfect ? refs[t].b2_star : 8.0 * rng.next_double();
    }

    const EpisodeReturn rs = saturation_return(states, refs, sat);
    const EpisodeReturn rq = quadratic_return(states, refs, quad);

    for (int t = 0; t < n; ++t) {
      const double w = sat.weights[t];
      const double cap = w * sat.alpha_max;
      ACCEPT(rs.rewards[t] >= 0.0 && rs.rewards[t] <= cap,
             "saturation reward outside (0, w*alpha]: " << rs.rewards[t]);
      if (w > 0.0) ACCEPT(rs.rewards[t] > 0.0, "saturation reward not positive");
      const bool zero_error = states[t + 1].b1 == refs[t].b1_star &&
                              states[t + 1].b2 == refs[t].b2_star;
      if (w > 0.0) {
        if (zero_error)
          ACCEPT(rs.rewards[t] == cap, "zero error did not reach w*alpha_max");
        else
          ACCEPT(rs.rewards[t] < cap, "nonzero error reached w*alpha_max");
      }
      ACCEPT(rq.rewards[t] <= 0.0, "quadratic reward positive");
      if (zero_error)
        ACCEPT(rq.rewards[t] == 0.0, "quadratic reward nonzero at zero error");
    }
    ACCEPT(rq.total <= 0.0, "quadratic total positive");
    if (perfect) ACCEPT(rq.total == 0.0, "perfect tracking total nonzero");

    // multiplicative coupling, exact: equal references force bitwise-equal
    // stored errors, so the product must equal the squared factor
    const double e = 3.0 * rng.next_double();
    const ReferencePoint shared{3.5, 3.5};
    std::vector<SystemState> pair(2);
    pair[1].b1 = shared.b1_star + e;
    pair[1].b2 = shared.b2_star + e;
    ReturnConfig one_step = sat;
    one_step.weights = weight_scheme(WeightScheme::equal_stage_terminal, 1);
    const EpisodeReturn coupled =
        saturation_return({pair[0], pair[1]}, {shared}, one_step);
    const double stored = (shared.b1_star + e) - shared.b1_star;
    const double factor = beta / (beta + stored * stored);
    ACCEPT(coupled.total == one_step.alpha_max * (factor * factor),
           "coupling identity violated");
  }
}

// ---------------------------------------------------------------------------
// 5. estimator sanity: zero-variance batches and standardized advantages

void criterion_estimator_sanity() {
  Environment env = nominal_env(false);
  ReturnConfig rc;
  rc.kind = ReturnKind::saturation;
  rc.beta_b1 = rc.beta_b2 = 27.0;
  rc.weights = weight_scheme(WeightScheme::equal_stage_terminal, env.n_steps);
  for (double& w : rc.weights) w = 0.0;  // constant zero return

  ReferenceSpec ref;
  ref.b1_setpoint = 3.0;
  ref.b2_setpoint = 4.0;
  ref.horizon_hours = 18.0;

  TrainingConfig cfg;
  cfg.n_episodes = 8;
  cfg.max_epochs = 3;
  cfg.seed = 5;

  RandomStream init = episode_stream(cfg.seed, 0, 0, StreamPurpose::policy_init);
  const GaussianPolicy start = GaussianPolicy::initialize(
      PolicyLayout{}, cfg.sigma_floor, env.bounds, init);
  const TrainResult result = train(cfg, env, rc, ref);
  const Eigen::VectorXd before = start.to_flat();
  const Eigen::VectorXd after = result.final_policy.to_flat();
  for (Eigen::Index i = 0; i < before.size(); ++i)
    ACCEPT(before[i] == after[i],
           "parameter " << i << " moved under a zero-variance batch");

  RandomStream rng(606);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> totals;
    for (int k = 0; k < 50; ++k) totals.push_back(5.0 * rng.next_gaussian());
    const auto adv = normalize_returns(totals);
    double mean = 0.0;
    for (double a : adv) mean += a;
    mean /= static_cast<double>(adv.size());
    ACCEPT(std::abs(mean) <= 1e-10, "advantage mean " << mean);
  }
}

// ---------------------------------------------------------------------------
// 6. truncated disturbance sampler statistics

void criterion_uncertainty_sampler() {
  const UncertaintySpec spec{0.07};
  const SystemState x0 = setpoint_initial_state();
  const KineticParameters p = nominal_parameters();
  RandomStream rng(777);
  const int n = 10000;
  double sum = 0.0, sumsq = 0.0;
  int outside = 0;
  for (int i = 0; i < n; ++i) {
    const Disturbed d = sample_disturbance(spec, x0, p, rng);
    const double rel = d.x0.g / x0.g - 1.0;
    sum += rel;
    sumsq += rel * rel;
    if (std::abs(rel) > 0.21) ++outside;
    const double rel_q = d.params.strain[0].q_a_max / 0.337 - 1.0;
    if (std::abs(rel_q) > 0.21) ++outside;
  }
  const double mean = sum / n;
  const double stddev = std::sqrt(sumsq / n - mean * mean);
  ACCEPT(outside == 0, outside << " draws beyond 3 sigma");
  ACCEPT(stddev >= 0.063 && stddev <= 0.077,
         "empirical relative std " << stddev << " outside [0.063, 0.077]");
}

// ---------------------------------------------------------------------------
// 7. metric oracles

void criterion_metric_oracles() {
  RandomStream rng(88);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_double() * 20.0);
    std::vector<double> values, refs;
    for (int t = 0; t < n; ++t) {
      values.push_back(6.0 * rng.next_double());
      refs.push_back(0.5 + 4.0 * rng.next_double());
    }
    double naive = 0.0;
    for (int t = 0; t < n; ++t) naive += std::abs((refs[t] - values[t]) / refs[t]);
    naive /= n;
    const double got = naae_per_state(values, refs);
    ACCEPT(std::abs(got - naive) <= 1e-12 * std::max(1.0, naive),
           "NAAE mismatch " << got << " vs " << naive);

    std::vector<double> curve;
    for (int i = 0; i < n; ++i) curve.push_back(rng.next_double());
    double trap = 0.0;
    for (int i = 0; i + 1 < n; ++i) trap += 0.5 * (curve[i] + curve[i + 1]);
    trap /= (n - 1);
    ACCEPT(std::abs(nauc(curve) - trap) <= 1e-12, "NAUC mismatch");
  }

  const std::vector<double> ones(25, 1.0);
  ACCEPT(std::abs(nauc(ones) - 1.0) <= 1e-14, "NAUC(1) != 1");
  std::vector<double> ramp;
  for (int i = 0; i <= 100; ++i) ramp.push_back(i / 100.0);
  ACCEPT(std::abs(nauc(ramp) - 0.5) <= 1e-12, "NAUC(ramp) != 0.5");

  // rank-sum winner vs brute-force enumeration
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_double() * 8.0);
    std::vector<ScenarioScore> scores;
    for (int i = 0; i < n; ++i)
      scores.push_back({"s" + std::to_string(i), rng.next_double(),
                        rng.next_double(), 0, 0, 0});
    const auto ranked = rank_scenarios(scores);

    for (const auto& s : scores) {
      int rank_naae = 1, rank_nauc = 1;
      for (const auto& o : scores) {
        if (o.naae < s.naae ||
            (o.naae == s.naae && o.scenario < s.scenario && &o != &s))
          ++rank_naae;
        if (o.nauc > s.nauc ||
            (o.nauc == s.nauc && o.scenario < s.scenario && &o != &s))
          ++rank_nauc;
      }
      bool found = false;
      for (const auto& r : ranked)
        if (r.scenario == s.scenario) {
          found = true;
          ACCEPT(r.rank_naae == rank_naae,
                 "rank_naae mismatch for " << s.scenario);
          ACCEPT(r.rank_nauc == rank_nauc,
                 "rank_nauc mismatch for " << s.scenario);
          ACCEPT(r.rank_sum == rank_naae + rank_nauc, "rank_sum mismatch");
        }
      ACCEPT(found, "scenario lost during ranking");
    }
    for (size_t i = 0; i + 1 < ranked.size(); ++i)
      ACCEPT(ranked[i].rank_sum <= ranked[i + 1].rank_sum,
             "rank table not sorted");
  }
}

// ---------------------------------------------------------------------------
// 8. desk-scale learning on the (3,4) setpoint

ScenarioResult train_scenario(int case_id, ReturnKind kind, double phi,
                              int max_epochs, const fs::path& dir,
                              const std::string& name) {
  ScenarioPlan plan;
  plan.name = name;
  plan.env = nominal_env(case_id == 2);
  ReferenceSpec ref;
  ref.horizon_hours = plan.env.n_steps * plan.env.dt_hours;
  if (case_id == 2) {
    ref.kind = ReferenceKind::sinusoid;
    ref.frequency = phi;
  } else {
    ref.kind = ReferenceKind::constant;
    ref.b1_setpoint = 3.0;
    ref.b2_setpoint = 4.0;
  }
  plan.reference = ref;
  plan.ret.kind = kind;
  plan.ret.beta = 27.0;
  plan.ret.scheme = WeightScheme::equal_stage_terminal;
  plan.training.n_episodes = 100;
  plan.training.max_epochs = max_epochs;
  plan.training.patience = 100;
  plan.training.seed = 6;
  plan.training.learning_rate = 2e-2;
  return run_scenario(plan, (dir / name).string());
}

void criterion_desk_scale_setpoint() {
  const fs::path dir = fresh_dir("criterion8");
  const ScenarioResult sat =
      train_scenario(1, ReturnKind::saturation, 0.0, 150, dir, "sat");
  const ScenarioResult qc =
      train_scenario(1, ReturnKind::quadratic, 0.0, 150, dir, "qc");

  ACCEPT(sat.best_mean_return >= 1.5 * sat.epoch0_mean_return,
         "learning progress " << sat.best_mean_return << " < 1.5 * "
                              << sat.epoch0_mean_return);
  ACCEPT(sat.naae_stats.mean < qc.naae_stats.mean,
         "saturation NAAE " << sat.naae_stats.mean
                            << " not below qc NAAE " << qc.naae_stats.mean);
  ACCEPT(sat.nauc_value > qc.nauc_value,
         "saturation NAUC " << sat.nauc_value << " not above qc NAUC "
                            << qc.nauc_value);
  std::cout << "    [detail] sat: return " << sat.epoch0_mean_return << " -> "
            << sat.best_mean_return << ", NAAE " << sat.naae_stats.mean
            << ", NAUC " << sat.nauc_value << "\n    [detail] qc:  NAAE "
            << qc.naae_stats.mean << ", NAUC " << qc.nauc_value << "\n";
  fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// 9. desk-scale trajectory tracking at phi = 0.7

void criterion_desk_scale_trajectory() {
  const fs::path dir = fresh_dir("criterion9");
  const ScenarioResult sat =
      train_scenario(2, ReturnKind::saturation, 0.7, 250, dir, "sat");
  const ScenarioResult qc =
      train_scenario(2, ReturnKind::quadratic, 0.7, 250, dir, "qc");

  ACCEPT(sat.naae_stats.mean < 0.5,
         "saturation NAAE " << sat.naae_stats.mean << " >= 0.5");
  ACCEPT(qc.naae_stats.mean > 1.0,
         "qc NAAE " << qc.naae_stats.mean << " <= 1.0");
  std::cout << "    [detail] sat NAAE " << sat.naae_stats.mean << ", qc NAAE "
            << qc.naae_stats.mean << "\n";
  fs::remove_all(dir);
}

// ---------------------------------------------------------------------------
// 10. byte-identical reruns from an identical manifest

void criterion_reproducibility() {
  const fs::path dir_a = fresh_dir("repro_a");
  const fs::path dir_b = fresh_dir("repro_b");
  auto config_for = [](const std::string& out) {
    ExperimentConfig cfg = default_case_config(1);
    cfg.grid.schemes = {WeightScheme::equal_stage_terminal};
    cfg.grid.betas = {27.0};
    cfg.training.n_episodes = 50;
    cfg.training.max_epochs = 40;
    cfg.output_dir = out;
    return cfg;
  };
  RunOptions serial;
  serial.quiet = true;
  RunOptions parallel;
  parallel.quiet = true;
  parallel.workers = 2;
  run_experiment(config_for(dir_a.string()), serial);
  run_experiment(config_for(dir_b.string()), parallel);

  ACCEPT(slurp(dir_a / "rank_table.csv") == slurp(dir_b / "rank_table.csv"),
         "rank_table.csv differs between reruns");
  for (const char* name : {"1_sr_1_tr_beta_27", "qc"}) {
    ACCEPT(slurp(dir_a / name / "returns.csv") ==
               slurp(dir_b / name / "returns.csv"),
           "returns.csv differs for " << name);
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

struct Criterion {
  int id;
  const char* label;
  std::function<void()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criteria" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string item;
      while (std::getline(ss, item, ',')) selected.insert(std::stoi(item));
    } else {
      std::cerr << "usage: acceptance [--criteria 1,2,...]\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "gradient correctness (FD check, 24 pairs, <1e-4)",
       criterion_gradient_correctness},
      {2, "RK4 order in [3.7,4.3] and washout decay to 1e-8",
       criterion_integrator_order},
      {3, "kinetics anchors and Monod/Hill bounds over 1e5 states",
       criterion_kinetics_anchors},
      {4, "return-function properties over 1e4 random trajectories",
       criterion_return_properties},
      {5, "estimator sanity: zero-variance update, standardized advantages",
       criterion_estimator_sanity},
      {6, "uncertainty sampler: 7% relative std, 3-sigma truncation",
       criterion_uncertainty_sampler},
      {7, "metric oracles: NAAE, NAUC, rank-sum vs brute force",
       criterion_metric_oracles},
      {8, "desk-scale setpoint learning beats qc (slow)",
       criterion_desk_scale_setpoint},
      {9, "desk-scale trajectory tracking beats qc (slow)",
       criterion_desk_scale_trajectory},
      {10, "bit-identical reruns of a desk-scale experiment",
       criterion_reproducibility},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run();
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      std::cout << "[PASS] criterion " << c.id << ": " << c.label << " ("
                << secs << " s)\n";
    } catch (const CriterionFailure& f) {
      std::cout << "[FAIL] criterion " << c.id << ": " << c.label << " -- "
                << f.message << "\n";
      ++failures;
    } catch (const std::exception& e) {
      std::cout << "[FAIL] criterion " << c.id << ": " << c.label
                << " -- unexpected error: " << e.what() << "\n";
      ++failures;
    }
  }
  if (failures) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all selected criteria passed\n";
  return 0;
}
