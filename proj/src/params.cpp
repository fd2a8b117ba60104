#include "cpf/params.hpp"

#include <cmath>
#include <stdexcept>

#include "cpf/detail.hpp"

namespace cpf {

using detail::pi;

IonSpec make_ion_spec_dipole_C_nm(double dipole_C_nm, double coherence_time) {
  return IonSpec{dipole_C_nm * 1e-9, coherence_time};
}

void validate_cavity_spec(const CavitySpec& cavity) {
  if (!(cavity.wavelength > 0.0) || !std::isfinite(cavity.wavelength))
    throw std::invalid_argument("cavity wavelength must be finite and > 0");
  if (!(cavity.quality > 0.0) || !std::isfinite(cavity.quality))
    throw std::invalid_argument("cavity quality factor must be finite and > 0");
  if (!(cavity.mode_volume > 0.0) || !std::isfinite(cavity.mode_volume))
    throw std::invalid_argument("cavity mode volume must be finite and > 0");
}

void validate_ion_spec(const IonSpec& ion) {
  if (!(ion.dipole > 0.0) || !std::isfinite(ion.dipole))
    throw std::invalid_argument("ion dipole moment must be finite and > 0");
  if (!(ion.coherence_time > 0.0) || !std::isfinite(ion.coherence_time))
    throw std::invalid_argument("ion coherence time must be finite and > 0");
}

double coupling_rate(const IonSpec& ion, const CavitySpec& cavity,
                     const PhysicalConstants& constants) {
  validate_ion_spec(ion);
  validate_cavity_spec(cavity);
  const double omega_c = 2.0 * pi * constants.c_light / cavity.wavelength;
  return std::sqrt(ion.dipole * ion.dipole * omega_c /
                   (2.0 * constants.hbar * constants.eps0 *
                    cavity.mode_volume));
}

double cavity_decay(const CavitySpec& cavity,
                    const PhysicalConstants& constants) {
  validate_cavity_spec(cavity);
  const double omega_0 = 2.0 * pi * constants.c_light / cavity.wavelength;
  return omega_0 / (2.0 * cavity.quality);
}

double operation_count(const IonSpec& ion, const PulseSpec& pulse) {
  validate_ion_spec(ion);
  if (!(pulse.duration > 0.0))
    throw std::invalid_argument("pulse duration must be > 0");
  return ion.coherence_time / (2.0 * pulse.duration);
}

}  // namespace cpf
