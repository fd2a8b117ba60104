#include "cpf/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cpf/detail.hpp"

namespace cpf {

using detail::pi;

void validate_params(const PhysicalParams& p) {
  if (!(p.g >= 0.0) || !std::isfinite(p.g))
    throw std::invalid_argument("coupling rate g must be finite and >= 0");
  if (!(p.kappa >= 0.0) || !std::isfinite(p.kappa))
    throw std::invalid_argument("cavity decay kappa must be finite and >= 0");
  if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma))
    throw std::invalid_argument("spontaneous rate gamma must be finite and >= 0");
  if (!std::isfinite(p.delta))
    throw std::invalid_argument("detuning delta must be finite");
}

PhysicalParams make_params(double g, double kappa, double gamma, double delta) {
  PhysicalParams p{g, kappa, gamma, delta};
  validate_params(p);
  return p;
}

PulseSpec make_pulse(double T) {
  if (!(T > 0.0) || !std::isfinite(T))
    throw std::invalid_argument("pulse duration must be finite and > 0");
  // 1/alpha^2 = integral_0^T exp[-48 (t - T/2)^2 / T^2] dt
  const double integral = detail::simpson(
      [T](double t) {
        const double u = (t - 0.5 * T) / T;
        return std::exp(-48.0 * u * u);
      },
      0.0, T, 8001);
  return PulseSpec{T, 1.0 / std::sqrt(integral)};
}

double pulse_sigma_omega(const PulseSpec& pulse) {
  if (!(pulse.duration > 0.0))
    throw std::invalid_argument("pulse duration must be > 0");
  return std::sqrt(48.0) / pulse.duration;
}

ModeGrid make_grid(double omega_b, int n_modes) {
  if (!(omega_b > 0.0) || !std::isfinite(omega_b))
    throw std::invalid_argument("grid bandwidth omega_b must be finite and > 0");
  if (n_modes < 2)
    throw std::invalid_argument("grid needs at least 2 modes, got " +
                                std::to_string(n_modes));
  ModeGrid grid;
  grid.omega_b = omega_b;
  grid.n_modes = n_modes;
  grid.delta_omega = 2.0 * omega_b / n_modes;
  grid.omegas.resize(n_modes);
  // omega_k = [k - (N+1)/2]*delta, k = 1..N; exactly antisymmetric in fp
  // because (k - (N+1)/2) negates exactly under k -> N+1-k.
  for (int k = 0; k < n_modes; ++k) {
    grid.omegas[k] =
        (static_cast<double>(k + 1) - 0.5 * (n_modes + 1)) * grid.delta_omega;
  }
  return grid;
}

namespace {

// Common construction once the spacing rule and a bandwidth target are known:
// round the mode count up to even and let omega_b absorb the rounding.
ModeGrid grid_from_target(double omega_b_target, double delta_omega) {
  const int n = detail::ceil_even(2.0 * omega_b_target / delta_omega);
  return make_grid(0.5 * n * delta_omega, n);
}

}  // namespace

ModeGrid default_grid(const PhysicalParams& params, const PulseSpec& pulse) {
  validate_params(params);
  const double sigma = pulse_sigma_omega(pulse);
  const double delta_omega = 2.0 * pi / (10.0 * pulse.duration);
  const double target = std::max(params.kappa / pi, 4.0 * sigma);
  return grid_from_target(target, delta_omega);
}

ModeGrid coverage_grid(const PulseSpec& pulse) {
  const double sigma = pulse_sigma_omega(pulse);
  const double delta_omega = 2.0 * pi / (10.0 * pulse.duration);
  return grid_from_target(8.0 * sigma, delta_omega);
}

}  // namespace cpf
