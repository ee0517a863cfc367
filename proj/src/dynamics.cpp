#include "chemorl/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace chemorl {

bool SystemState::finite() const {
  return std::isfinite(g) && std::isfinite(b1) && std::isfinite(b2) &&
         std::isfinite(a1) && std::isfinite(a2);
}

void KineticParameters::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("kinetic parameter ") + name +
                                  " must be strictly positive");
  };
  positive(f_c, "f_c");
  for (int i = 0; i < 2; ++i) {
    const StrainKinetics& s = strain[i];
    positive(s.mu_max, "mu_max");
    positive(s.k_g, "k_g");
    positive(s.k_a, "k_a");
    positive(s.yield_gb, "Y_gb");
    positive(s.q_a_max, "q_a_max");
    positive(s.hill_n, "n");
    positive(s.k_I, "k_I");
    if (s.d_a < 0.0 || !std::isfinite(s.d_a))
      throw std::invalid_argument("d_a must be >= 0");
  }
}

void OperatingConditions::validate() const {
  if (!(d_l > 0.0) || !std::isfinite(d_l))
    throw std::invalid_argument("d_l must be strictly positive");
  if (!(g_in > 0.0) || !std::isfinite(g_in))
    throw std::invalid_argument("g_in must be strictly positive");
}

namespace {

double hill(double x, double k, double n) {
  if (x <= 0.0) return 0.0;
  const double xn = std::pow(x, n);
  return xn / (xn + std::pow(k, n));
}

}  // namespace

KineticRates kinetic_rates(const SystemState& state, const ControlInput& input,
                           const KineticParameters& params) {
  if (!state.finite() || !std::isfinite(input.I1) || !std::isfinite(input.I2))
    throw std::invalid_argument("kinetic_rates: non-finite state or input");

  KineticRates r;
  const double monod_g1 = state.g / (state.g + params.strain[0].k_g);
  const double monod_g2 = state.g / (state.g + params.strain[1].k_g);
  const double fa1 = params.f_c * state.a1;
  const double fa2 = params.f_c * state.a2;
  r.mu1 = params.strain[0].mu_max * monod_g1 * (fa1 / (fa1 + params.strain[0].k_a));
  r.mu2 = params.strain[1].mu_max * monod_g2 * (fa2 / (fa2 + params.strain[1].k_a));
  r.qg1 = params.strain[0].yield_gb * r.mu1;
  r.qg2 = params.strain[1].yield_gb * r.mu2;
  r.qa1 = params.strain[0].q_a_max *
          hill(input.I1, params.strain[0].k_I, params.strain[0].hill_n);
  r.qa2 = params.strain[1].q_a_max *
          hill(input.I2, params.strain[1].k_I, params.strain[1].hill_n);
  return r;
}

SystemState rhs(const SystemState& state, const ControlInput& input,
                const KineticParameters& params, const OperatingConditions& op) {
  const KineticRates r = kinetic_rates(state, input, params);
  SystemState d;
  d.g = -r.qg1 * state.b1 - r.qg2 * state.b2 + (op.g_in - state.g) * op.d_l;
  d.b1 = (r.mu1 - op.d_l) * state.b1;
  d.b2 = (r.mu2 - op.d_l) * state.b2;
  d.a1 = r.qa1 - (params.strain[0].d_a + r.mu1) * state.a1;
  d.a2 = r.qa2 - (params.strain[1].d_a + r.mu2) * state.a2;
  return d;
}

namespace {

// Stage states are clamped to the non-negative orthant before evaluating
// the rates: the kinetics are meaningless below zero (a negative glucose
// level would push the Monod factor above one).
std::array<double, 5> stage_state(const std::array<double, 5>& x, double h,
                                  const std::array<double, 5>& d) {
  std::array<double, 5> y;
  for (int i = 0; i < 5; ++i) y[i] = std::max(x[i] + h * d[i], 0.0);
  return y;
}

// Feed-limited substep for the glucose floor. The Monod half-saturation
// k_g ~ 3e-4 mmol/L makes the glucose factor a near-step function, so when
// consumption overdraws the pool an explicit stage scheme alternates between
// "substrate present" and "substrate absent" and synthesizes biomass the
// feed cannot supply. Here growth is rescaled by a common factor so the
// substep consumes exactly the available glucose (stock plus feed), which is
// what the exact solution does once glucose is enslaved to the supply.
SystemState feed_limited_substep(const SystemState& x, const ControlInput& input,
                                 const KineticParameters& params,
                                 const OperatingConditions& op, double h) {
  const double fa1 = params.f_c * x.a1;
  const double fa2 = params.f_c * x.a2;
  const double mu1_cap = params.strain[0].mu_max * (fa1 / (fa1 + params.strain[0].k_a));
  const double mu2_cap = params.strain[1].mu_max * (fa2 / (fa2 + params.strain[1].k_a));
  const double demand = params.strain[0].yield_gb * mu1_cap * x.b1 +
                        params.strain[1].yield_gb * mu2_cap * x.b2;
  const double supply = x.g + op.g_in * op.d_l * h;
  const double scale =
      demand * h > supply && demand > 0.0 ? supply / (demand * h) : 1.0;
  const double mu1 = scale * mu1_cap;
  const double mu2 = scale * mu2_cap;

  const KineticRates hill = kinetic_rates(
      SystemState{0.0, x.b1, x.b2, x.a1, x.a2}, input, params);
  SystemState next;
  next.g = std::max(supply - scale * demand * h, 0.0);
  next.b1 = x.b1 * (1.0 + h * (mu1 - op.d_l));
  next.b2 = x.b2 * (1.0 + h * (mu2 - op.d_l));
  next.a1 = x.a1 + h * (hill.qa1 - (params.strain[0].d_a + mu1) * x.a1);
  next.a2 = x.a2 + h * (hill.qa2 - (params.strain[1].d_a + mu2) * x.a2);
  return next;
}

}  // namespace

SystemState integrate_interval(const SystemState& state,
                               const ControlInput& input,
                               const KineticParameters& params,
                               const OperatingConditions& op, double dt,
                               int n_substeps, IntegrationDiagnostics* diag) {
  if (n_substeps < 1) throw std::invalid_argument("n_substeps must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");

  const double h = dt / n_substeps;
  SystemState x = state;
  for (int step = 0; step < n_substeps; ++step) {
    const auto xa = x.to_array();
    const auto k1 = rhs(x, input, params, op).to_array();
    const auto k2 = rhs(SystemState::from_array(stage_state(xa, 0.5 * h, k1)),
                        input, params, op)
                        .to_array();
    const auto k3 = rhs(SystemState::from_array(stage_state(xa, 0.5 * h, k2)),
                        input, params, op)
                        .to_array();
    const auto k4 =
        rhs(SystemState::from_array(stage_state(xa, h, k3)), input, params, op)
            .to_array();

    std::array<double, 5> next;
    for (int i = 0; i < 5; ++i)
      next[i] = xa[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    if (next[0] < 0.0) {
      // Glucose overdrawn: growth outran the pool within one substep. Redo
      // the substep feed-limited; counted as a clamped glucose component.
      next = feed_limited_substep(x, input, params, op, h).to_array();
      if (diag) ++diag->clamped_components;
    }
    for (int i = 0; i < 5; ++i) {
      if (!std::isfinite(next[i]))
        throw integration_error("non-finite value during RK4 substep " +
                                    std::to_string(step),
                                step);
      if (next[i] < 0.0) {
        next[i] = 0.0;
        if (diag) ++diag->clamped_components;
      }
    }
    x = SystemState::from_array(next);
  }
  return x;
}

std::vector<SystemState> simulate_episode(const SystemState& x0,
                                          const std::vector<ControlInput>& actions,
                                          const KineticParameters& params,
                                          const OperatingConditions& op,
                                          double dt, int n_substeps,
                                          IntegrationDiagnostics* diag) {
  std::vector<SystemState> states;
  states.reserve(actions.size() + 1);
  states.push_back(x0);
  for (size_t t = 0; t < actions.size(); ++t) {
    try {
      states.push_back(integrate_interval(states.back(), actions[t], params, op,
                                          dt, n_substeps, diag));
    } catch (const integration_error& e) {
      throw integration_error(std::string(e.what()) + " (episode step " +
                                  std::to_string(t) + ")",
                              e.substep());
    }
  }
  return states;
}

KineticParameters nominal_parameters() {
  KineticParameters p;
  p.f_c = 1100.0;
  StrainKinetics common;
  common.mu_max = 0.982;
  common.k_g = 2.964e-4;
  common.yield_gb = 10.18;
  common.d_a = 0.0;

  p.strain[0] = common;
  p.strain[0].k_a = 1.7;
  p.strain[0].q_a_max = 0.337;
  p.strain[0].hill_n = 2.0;
  p.strain[0].k_I = 1.052;

  p.strain[1] = common;
  p.strain[1].k_a = 0.182;
  p.strain[1].q_a_max = 0.036;
  p.strain[1].hill_n = 4.865;
  p.strain[1].k_I = 1.34;
  return p;
}

OperatingConditions nominal_operating_conditions() { return {0.15, 200.0}; }

SystemState setpoint_initial_state() {
  return {1.0, 0.005, 0.005, 1.545e-2, 1.655e-3};
}

SystemState trajectory_initial_state() {
  return {50.0, 3.0, 4.0, 1.075e-4, 2.998e-5};
}

}  // namespace chemorl
