#pragma once

// Shared parameter and grid types consumed by every other module.
//
// Unit discipline: every rate in this library is an angular frequency in
// rad/s (SI prefixes on rad/s), times are in seconds. Every constructor
// documents this.

#include <vector>

namespace cpf {

// Fixed CODATA-2018 constants (SI). Never user-set; the single instance is
// `codata` below. Only the derived-quantity module consumes these — the
// dynamics works in units where hbar = 1.
struct PhysicalConstants {
  double hbar = 1.054571817e-34;     // reduced Planck constant, J*s
  double eps0 = 8.8541878128e-12;    // vacuum permittivity, F/m
  double c_light = 2.99792458e8;     // speed of light in vacuum, m/s
};
inline constexpr PhysicalConstants codata{};

// Coupling/decay/detuning rates of one ion-cavity system, all rad/s.
// g >= 0, kappa >= 0, gamma >= 0; delta may have either sign. (kappa = 0 is
// admitted so free propagation can be exercised; operations that genuinely
// need kappa > 0 enforce it themselves.)
struct PhysicalParams {
  double g = 0.0;      // ion-cavity coupling rate
  double kappa = 0.0;  // cavity decay rate
  double gamma = 0.0;  // ion spontaneous-emission rate
  double delta = 0.0;  // ion detuning from the cavity line
};

// Validates and returns the parameter set; throws std::invalid_argument.
PhysicalParams make_params(double g, double kappa, double gamma,
                           double delta = 0.0);
void validate_params(const PhysicalParams& p);

// Gaussian single-photon pulse envelope f(t) = alpha * exp[-24 (t-T/2)^2/T^2]
// on t in [0, T], zero outside. alpha is fixed by unit squared integral:
// integral_0^T f(t)^2 dt = 1.
struct PulseSpec {
  double duration = 0.0;       // T, seconds
  double normalization = 0.0;  // alpha, s^(-1/2)
};

// Builds a PulseSpec for duration T (seconds), computing alpha by quadrature.
// Throws std::invalid_argument for non-positive T.
PulseSpec make_pulse(double T);

// Standard deviation of the pulse's spectral *amplitude*, sqrt(48)/T (rad/s).
double pulse_sigma_omega(const PulseSpec& pulse);

// Discretized free-space continuum: N modes spaced delta_omega covering
// [-omega_b, omega_b], with omega_k = [k - (N+1)/2] * delta_omega, k = 1..N
// (symmetric about zero).
struct ModeGrid {
  double omega_b = 0.0;      // half-bandwidth, rad/s
  int n_modes = 0;           // N
  double delta_omega = 0.0;  // mode spacing, rad/s
  std::vector<double> omegas;
};

// Grid from explicit bandwidth and mode count; delta_omega = 2*omega_b/N.
// Throws std::invalid_argument for omega_b <= 0 or n_modes < 2.
ModeGrid make_grid(double omega_b, int n_modes);

// Default simulation grid. Spacing delta_omega = 2*pi/(10*T) (discrete-mode
// recurrence time ten pulse durations); bandwidth target
// max(kappa/pi, 4*sigma_omega), rounded up to an even mode count. The
// kappa/pi floor pins the band edge where the discretized continuum's
// dispersion cancels the cavity ringdown delay — the regime in which the
// empty-cavity reflection is flattest across the pulse band and gate
// fidelities peak.
ModeGrid default_grid(const PhysicalParams& params, const PulseSpec& pulse);

// Spectrum-coverage grid: bandwidth 8*sigma_omega (captures all but ~1e-14 of
// the spectral weight), same spacing rule as default_grid.
ModeGrid coverage_grid(const PulseSpec& pulse);

}  // namespace cpf
