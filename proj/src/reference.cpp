#include "chemorl/reference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chemorl {

void ReferenceSpec::validate() const {
  if (!(horizon_hours > 0.0))
    throw std::invalid_argument("reference horizon must be positive");
  if (kind == ReferenceKind::constant) {
    if (!(b1_setpoint > 0.0) || !(b2_setpoint > 0.0))
      throw std::invalid_argument("constant setpoints must be strictly positive");
  } else {
    if (!(amplitude >= 0.0) || !(mean - amplitude > 0.0))
      throw std::invalid_argument("sinusoid must stay strictly positive");
    if (!(frequency > 0.0))
      throw std::invalid_argument("sinusoid frequency must be positive");
  }
}

ReferencePoint reference_at(const ReferenceSpec& spec, double t) {
  if (t < 0.0 || t > spec.horizon_hours)
    throw std::invalid_argument("reference time outside [0, horizon]");
  if (spec.kind == ReferenceKind::constant)
    return {spec.b1_setpoint, spec.b2_setpoint};

  const double omega =
      2.0 * std::numbers::pi * spec.frequency / spec.horizon_hours;
  return {spec.mean + spec.amplitude * std::sin(omega * t + spec.phase1),
          spec.mean + spec.amplitude * std::sin(omega * t + spec.phase2)};
}

std::vector<ReferencePoint> reference_series(const ReferenceSpec& spec,
                                             int n_steps, double dt) {
  if (n_steps < 0) throw std::invalid_argument("n_steps must be >= 0");
  std::vector<ReferencePoint> series;
  series.reserve(n_steps);
  for (int k = 1; k <= n_steps; ++k)
    series.push_back(reference_at(spec, k * dt));
  return series;
}

}  // namespace chemorl
