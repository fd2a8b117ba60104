#pragma once

// Derived experimental quantities: coupling rate from dipole and mode data,
// cavity decay from the quality factor, and the coherence-limited operation
// count.

#include "cpf/core.hpp"

namespace cpf {

// Whispering-gallery (or other single-mode) cavity data. All strictly
// positive; validated by the consuming operations.
struct CavitySpec {
  double wavelength = 0.0;   // lambda_0, m
  double quality = 0.0;      // Q, dimensionless
  double mode_volume = 0.0;  // V_m, m^3
};

// Single-ion data.
struct IonSpec {
  double dipole = 0.0;          // mu, C*m
  double coherence_time = 0.0;  // tau_coh, s
};

// Convenience constructor for the dipole moment quoted in C*nm.
IonSpec make_ion_spec_dipole_C_nm(double dipole_C_nm, double coherence_time);

void validate_cavity_spec(const CavitySpec& cavity);
void validate_ion_spec(const IonSpec& ion);

// Maximum coherent coupling rate g0 = sqrt(mu^2 omega_c / (2 hbar eps0 V_m)),
// rad/s, with omega_c = 2 pi c / lambda_0. Throws std::invalid_argument on
// invalid specs.
double coupling_rate(const IonSpec& ion, const CavitySpec& cavity,
                     const PhysicalConstants& constants = codata);

// Cavity field decay rate kappa = omega_0 / (2 Q), rad/s.
double cavity_decay(const CavitySpec& cavity,
                    const PhysicalConstants& constants = codata);

// Number of gate operations within one coherence time, n_op = tau_coh/(2 T).
double operation_count(const IonSpec& ion, const PulseSpec& pulse);

}  // namespace cpf
