#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemorl {

/// Chemostat state at one instant. Units are conventions, not enforced:
/// g in mmol/L, b1/b2 in g/L, a1/a2 in mmol/g (intracellular, per biomass).
struct SystemState {
  double g = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;

  std::array<double, 5> to_array() const { return {g, b1, b2, a1, a2}; }
  static SystemState from_array(const std::array<double, 5>& v) {
    return {v[0], v[1], v[2], v[3], v[4]};
  }
  bool finite() const;
};

/// Per-strain kinetic constants.
/// mu_max 1/h, k_g mmol/L, k_a mmol/L, yield_gb mmol/g, q_a_max mmol/(g h),
/// hill_n dimensionless, k_I in the units of the strain's light input,
/// d_a 1/h (amino acid degradation; zero by default).
struct StrainKinetics {
  double mu_max = 0.0;
  double k_g = 0.0;
  double k_a = 0.0;
  double yield_gb = 0.0;
  double q_a_max = 0.0;
  double hill_n = 0.0;
  double k_I = 0.0;
  double d_a = 0.0;
};

struct KineticParameters {
  double f_c = 0.0;  // biomass-to-volume conversion, g/L
  std::array<StrainKinetics, 2> strain;

  /// Throws std::invalid_argument unless all constants are strictly
  /// positive (d_a may be zero).
  void validate() const;
};

struct OperatingConditions {
  double d_l = 0.0;   // dilution rate, 1/h
  double g_in = 0.0;  // feed glucose, mmol/L
  void validate() const;
};

/// Light intensities applied over one control interval.
/// I1: blue, W/m^2. I2: red, uW/cm^2.
struct ControlInput {
  double I1 = 0.0;
  double I2 = 0.0;
  std::array<double, 2> to_array() const { return {I1, I2}; }
};

struct InputBounds {
  double i_max_1 = 0.0;
  double i_max_2 = 0.0;
  double max(int i) const { return i == 0 ? i_max_1 : i_max_2; }
};

struct KineticRates {
  double mu1 = 0.0, mu2 = 0.0;  // growth, 1/h
  double qg1 = 0.0, qg2 = 0.0;  // glucose uptake, mmol/(g h)
  double qa1 = 0.0, qa2 = 0.0;  // amino acid synthesis, mmol/(g h)
};

/// Raised when an integration step produces a non-finite value.
class integration_error : public std::runtime_error {
public:
  integration_error(const std::string& what, int substep)
      : std::runtime_error(what), substep_(substep) {}
  int substep() const { return substep_; }

private:
  int substep_;
};

/// Monod growth coupled to the intracellular amino acid pool, plus the
/// Hill-type optogenetic dose response for amino acid synthesis.
KineticRates kinetic_rates(const SystemState& state, const ControlInput& input,
                           const KineticParameters& params);

/// Chemostat balances: glucose fed and diluted, biomass grown and washed
/// out, amino acids synthesized and diluted by growth/degradation.
SystemState rhs(const SystemState& state, const ControlInput& input,
                const KineticParameters& params, const OperatingConditions& op);

struct IntegrationDiagnostics {
  long clamped_components = 0;  // negative values zeroed after RK4 steps
};

/// Classical RK4 with fixed substep dt/n_substeps; the input is held
/// constant over the interval. Components that undershoot zero are clamped
/// and counted (the model is only physical on the non-negative orthant).
SystemState integrate_interval(const SystemState& state,
                               const ControlInput& input,
                               const KineticParameters& params,
                               const OperatingConditions& op, double dt,
                               int n_substeps,
                               IntegrationDiagnostics* diag = nullptr);

/// Open-loop rollout: applies actions[t] over [t*dt, (t+1)*dt).
/// Returns actions.size()+1 states, the initial one first.
std::vector<SystemState> simulate_episode(const SystemState& x0,
                                          const std::vector<ControlInput>& actions,
                                          const KineticParameters& params,
                                          const OperatingConditions& op,
                                          double dt, int n_substeps,
                                          IntegrationDiagnostics* diag = nullptr);

/// Table-of-nominals used across the experiments (chemostat at d_l = 0.15/h,
/// g_in = 200 mmol/L; strains symmetric except the amino acid module).
KineticParameters nominal_parameters();
OperatingConditions nominal_operating_conditions();
SystemState setpoint_initial_state();    // low-inoculum startup
SystemState trajectory_initial_state();  // populations already balanced

}  // namespace chemorl
