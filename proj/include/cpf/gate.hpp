#pragma once

// Two-atom controlled-phase-flip gate built from sequential photon
// reflections: exact composition in the 8-dimensional
// atom1 x atom2 x polarization algebra, and a mode-resolved composition that
// consumes simulated per-mode reflection coefficients.

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "cpf/core.hpp"
#include "cpf/pulse.hpp"
#include "cpf/scattering.hpp"

namespace cpf {

// Joint state over atom1{|0>,|1>} x atom2{|0>,|1>} x polarization{H,V}.
// Index layout: amplitudes[4*i + 2*j + p] with i = atom1, j = atom2,
// p = 0 for H, 1 for V.
struct IdealJointState {
  std::array<std::complex<double>, 8> amplitudes{};
};

// Mode-resolved joint state: row 4*i + 2*j + p as above, column k the mode
// amplitude on the stored frequency grid.
struct MultimodeJointState {
  std::vector<double> omegas;
  Eigen::MatrixXcd amplitudes;  // 8 x N
};

// Product state (beta10|0> + beta11|1>)_1 (beta20|0> + beta21|1>)_2
// (|H> + |V>)/sqrt(2). Each atomic pair must be normalized within 1e-9;
// throws std::invalid_argument otherwise.
IdealJointState make_ideal_state(std::complex<double> beta10,
                                 std::complex<double> beta11,
                                 std::complex<double> beta20,
                                 std::complex<double> beta21);

// Same product state with the photon in spectral state c0 on `grid`.
MultimodeJointState make_multimode_state(std::complex<double> beta10,
                                         std::complex<double> beta11,
                                         std::complex<double> beta20,
                                         std::complex<double> beta21,
                                         const SpectralAmplitudes& c0,
                                         const ModeGrid& grid);

// Single-reflection controlled phase flip on the selected atom (1 or 2):
// negates every amplitude whose selected atom is |0> AND polarization is H.
// Throws std::invalid_argument for atom not in {1, 2}.
IdealJointState ideal_cpf_atom_photon(const IdealJointState& state, int atom);

// Half-wave-plate polarization rotation:
//   |H> -> (-|H> + |V>)/sqrt(2),  |V> -> (|H> + |V>)/sqrt(2).
IdealJointState hwp_rotation(const IdealJointState& state);
MultimodeJointState hwp_rotation(const MultimodeJointState& state);

// Full five-step sequence U_1p R_p U_2p R_p U_1p. Requires the photon factor
// to be (|H> + |V>)/sqrt(2) (H and V amplitudes equal for every atomic
// configuration, within 1e-9); throws std::invalid_argument otherwise. The
// result acts on the atoms as the two-qubit phase flip
// e^{i pi |00><00|} with the photon restored.
IdealJointState compose_ideal_cpf(const IdealJointState& state);

// One realistic reflection off the selected atom's cavity: H amplitudes pick
// up r0(omega_k) e^{-i omega_k T} (atom |0>) or r1(omega_k) e^{-i omega_k T}
// (atom |1>); V amplitudes pick up the propagation phase e^{-i omega_k T}
// only. Masked modes carry r = 0 (the H component there is lost). Throws
// std::invalid_argument on grid mismatch or atom not in {1, 2}.
MultimodeJointState realistic_reflection(const MultimodeJointState& state,
                                         int atom,
                                         const ScatteringProfile& profile,
                                         double T);

struct CompositeResult {
  MultimodeJointState state;
  double f12 = 0.0;  // squared overlap with the ideal composite outcome
};

// Realistic five-step composition reflection(1), R_p, reflection(2), R_p,
// reflection(1). Requires the input photon to factor as c(0) x
// (|H> + |V>)/sqrt(2) (within 1e-9); throws std::invalid_argument otherwise.
// f12 compares against the ideal outcome: the input with its |00> atomic
// amplitudes negated and every mode carrying the three-leg propagation phase
// e^{-3 i omega_k T}.
CompositeResult compose_realistic_cpf(const MultimodeJointState& state,
                                      const ScatteringProfile& profile1,
                                      const ScatteringProfile& profile2,
                                      double T);

}  // namespace cpf
