#pragma once

// Per-mode reflection extraction from time-domain evolution output, plus an
// independent frequency-domain (input-output theory) oracle.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "cpf/core.hpp"
#include "cpf/dynamics.hpp"
#include "cpf/pulse.hpp"

namespace cpf {

// Reflection phase shifts relative to free propagation, per mode, for the two
// atomic branches. Angles are reduced to (-pi, pi]; weights are the input
// spectral weights |c_k(0)|^2 (summing to 1 for a normalized input).
struct PhaseProfile {
  std::vector<double> omegas;
  std::vector<double> dtheta0;  // atom in |0> (cavity decoupled)
  std::vector<double> dtheta1;  // atom in |1> (cavity coupled)
  std::vector<double> weights;
};

// Raw per-mode reflection coefficients r(omega_k) = c_k(T) e^{+i omega_k T} /
// c_k(0). `valid[k]` is false where the input weight is too small for the
// quotient to be meaningful.
struct ReflectionExtract {
  Eigen::VectorXcd values;
  std::vector<bool> valid;
};

// Frequency-diagonal summary of one ion-cavity system's reflection for both
// atomic branches, consumed by the two-atom gate composition. On valid modes
// |r0| = 1 exactly (the decoupled branch is lossless; the extracted phase is
// kept) and |r1| <= 1 (extracted, capped). Masked modes carry r = 0.
struct ScatteringProfile {
  std::vector<double> omegas;
  Eigen::VectorXcd r0;  // atom in |0>
  Eigen::VectorXcd r1;  // atom in |1>
  std::vector<bool> valid_mask;
};

// Reflection phase shifts of both branches relative to free propagation:
// dtheta = arg[c_k(T)] - arg[e^{-i omega_k T} c_k(0)], reduced to (-pi, pi].
// `report0` must be the cavity-decoupled run and `report1` the coupled run of
// the same input c0 on the same grid over the same window T.
// Throws std::invalid_argument on mismatched sizes or a non-normalized c0.
PhaseProfile phase_profile(const EvolutionReport& report0,
                           const EvolutionReport& report1,
                           const SpectralAmplitudes& c0, const ModeGrid& grid,
                           double T);

// Raw per-mode reflection coefficients for one evolution run (no clamping).
// Modes with |c_k(0)|^2 < 1e-6 * max weight are masked. Throws
// std::invalid_argument on size mismatches, std::runtime_error if every mode
// is masked.
ReflectionExtract extract_reflection(const EvolutionReport& report,
                                     const SpectralAmplitudes& c0,
                                     const ModeGrid& grid, double T);

// Builds the clamped two-branch profile from the two evolution runs.
ScatteringProfile scattering_profile(const EvolutionReport& report0,
                                     const EvolutionReport& report1,
                                     const SpectralAmplitudes& c0,
                                     const ModeGrid& grid, double T);

// Steady-state reflection coefficient of a single-sided cavity from
// input-output theory:
//   r(omega) = 1 - kappa / [kappa/2 - i omega + g_eff^2/(gamma/2 - i(omega -
//   delta))]
// with g_eff = g when `coupled` (atom in |1>), 0 otherwise. Independent of
// the discretized time-domain model; serves as its correctness oracle.
std::complex<double> analytic_reflection(double omega,
                                         const PhysicalParams& params,
                                         bool coupled);

}  // namespace cpf
