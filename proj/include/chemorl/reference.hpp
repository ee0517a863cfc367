#pragma once

#include <array>
#include <vector>

namespace chemorl {

enum class ReferenceKind { constant, sinusoid };

/// Reference signals for the two tracked biomass states.
///
/// Sinusoids start at (mean - amplitude, mean + amplitude) with the default
/// phases, matching initial conditions where the populations already sit at
/// those levels; "frequency" counts cycles over the horizon.
struct ReferenceSpec {
  ReferenceKind kind = ReferenceKind::constant;
  double horizon_hours = 18.0;

  // constant kind
  double b1_setpoint = 3.0;
  double b2_setpoint = 4.0;

  // sinusoid kind
  double mean = 3.5;
  double amplitude = 0.5;
  double frequency = 0.5;  // cycles per horizon
  double phase1 = -1.5707963267948966;  // -pi/2
  double phase2 = 1.5707963267948966;   // +pi/2

  void validate() const;
};

struct ReferencePoint {
  double b1_star = 0.0;
  double b2_star = 0.0;
};

/// Reference pair at continuous time t in [0, horizon].
ReferencePoint reference_at(const ReferenceSpec& spec, double t);

/// References on the control grid {dt, 2*dt, ..., n_steps*dt}, the instants
/// at which rewards are assigned. series[k] corresponds to step k+1.
std::vector<ReferencePoint> reference_series(const ReferenceSpec& spec,
                                             int n_steps, double dt);

}  // namespace chemorl
