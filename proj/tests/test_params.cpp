#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cpf/core.hpp"
#include "cpf/params.hpp"

using namespace cpf;

namespace {
const CavitySpec kCavity{579.879e-9, 5.0e7, 3.0e-16};
const IonSpec kIon{7.5e-28, 82.0e-3};
}  // namespace

TEST_CASE("coupling rate: closed form at the reference inputs") {
  const double g0 = coupling_rate(kIon, kCavity);
  // Independent evaluation: omega_c = 2 pi c / lambda = 3.2484e15 rad/s,
  // g0 = sqrt(mu^2 omega_c / (2 hbar eps0 V_m)) = 5.711e10 rad/s.
  const double omega_c = 2.0 * M_PI * codata.c_light / kCavity.wavelength;
  const double expect = std::sqrt(kIon.dipole * kIon.dipole * omega_c /
                                  (2.0 * codata.hbar * codata.eps0 *
                                   kCavity.mode_volume));
  CHECK(g0 == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(g0 / 5.711e10 - 1.0) <= 1e-3);
  // The formula lands ~57x above the quoted 1.0e9 rad/s operating point;
  // the ratio itself is what downstream reports surface.
  CHECK(std::abs(g0 / 1.0e9 / 57.11 - 1.0) <= 1e-3);
}

TEST_CASE("coupling rate: scaling laws") {
  const double base = coupling_rate(kIon, kCavity);

  CavitySpec big = kCavity;
  big.mode_volume *= 4.0;
  CHECK(coupling_rate(kIon, big) == doctest::Approx(0.5 * base).epsilon(1e-12));

  IonSpec strong = kIon;
  strong.dipole *= 2.0;
  CHECK(coupling_rate(strong, kCavity) ==
        doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("cavity decay: value, scaling, regime product") {
  const double kappa = cavity_decay(kCavity);
  CHECK(std::abs(kappa / 3.2484e7 - 1.0) <= 1e-4);
  // Within 2% of the nominal 3.2e7 rad/s operating point.
  CHECK(std::abs(kappa / 3.2e7 - 1.0) <= 0.02);

  CavitySpec hq = kCavity;
  hq.quality *= 2.0;
  CHECK(cavity_decay(hq) == doctest::Approx(0.5 * kappa).epsilon(1e-12));

  // kappa T ~ 97 at T = 3 us: deep in the kappa T >> 1 regime.
  CHECK(kappa * 3.0e-6 == doctest::Approx(97.45).epsilon(1e-3));
}

TEST_CASE("operation count: value and scaling") {
  auto pulse = make_pulse(3.0e-6);
  const double n_op = operation_count(kIon, pulse);
  CHECK(n_op == doctest::Approx(13666.6667).epsilon(1e-6));
  CHECK(std::abs(n_op / 1.37e4 - 1.0) <= 0.01);

  IonSpec brief = kIon;
  brief.coherence_time = 2.0 * pulse.duration;
  CHECK(operation_count(brief, pulse) == doctest::Approx(1.0).epsilon(1e-12));

  auto half = make_pulse(1.5e-6);
  CHECK(operation_count(kIon, half) ==
        doctest::Approx(2.0 * n_op).epsilon(1e-12));
}

TEST_CASE("C*nm dipole constructor") {
  auto ion = make_ion_spec_dipole_C_nm(7.5e-19, 82.0e-3);
  CHECK(ion.dipole == doctest::Approx(7.5e-28).epsilon(1e-12));
  CHECK(ion.coherence_time == 82.0e-3);
}

TEST_CASE("validation: specs must be strictly positive and finite") {
  CHECK_NOTHROW(validate_cavity_spec(kCavity));
  CHECK_NOTHROW(validate_ion_spec(kIon));

  CavitySpec bad = kCavity;
  bad.wavelength = 0.0;
  CHECK_THROWS_AS(validate_cavity_spec(bad), std::invalid_argument);
  bad = kCavity;
  bad.quality = -1.0;
  CHECK_THROWS_AS(validate_cavity_spec(bad), std::invalid_argument);
  bad = kCavity;
  bad.mode_volume = std::nan("");
  CHECK_THROWS_AS(validate_cavity_spec(bad), std::invalid_argument);

  IonSpec bion = kIon;
  bion.dipole = 0.0;
  CHECK_THROWS_AS(validate_ion_spec(bion), std::invalid_argument);
  CHECK_THROWS_AS(coupling_rate(bion, kCavity), std::invalid_argument);
  bion = kIon;
  bion.coherence_time = -2.0;
  CHECK_THROWS_AS(validate_ion_spec(bion), std::invalid_argument);
  CHECK_THROWS_AS(operation_count(bion, make_pulse(3.0e-6)),
                  std::invalid_argument);

  CavitySpec bcav = kCavity;
  bcav.quality = 0.0;
  CHECK_THROWS_AS(cavity_decay(bcav), std::invalid_argument);
}
