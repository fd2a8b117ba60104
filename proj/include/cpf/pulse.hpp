#pragma once

// Gaussian pulse envelope and its initial spectral amplitudes on a mode grid.

#include <Eigen/Dense>

#include "cpf/core.hpp"

namespace cpf {

// Initial single-photon spectral amplitudes c_k(0), unit norm.
struct SpectralAmplitudes {
  Eigen::VectorXcd values;  // length N, sum |c_k|^2 = 1
};

// Time-domain envelope f(t) = alpha * exp[-24 (t - T/2)^2 / T^2].
// Throws std::domain_error for t outside [0, T].
double envelope(double t, const PulseSpec& pulse);

// Finite-window Fourier transform of the envelope at the grid frequencies,
// c_k(0) proportional to integral_0^T f(t) e^{+i omega_k t} dt, renormalized
// to unit total weight. The transform keeps the physical arrival time: the
// wavepacket peaks at t = T/2, so arg c_k(0) carries e^{i omega_k T/2}.
// Throws std::invalid_argument when the grid is too narrow for the spectrum
// (omega_b < 4*sigma_omega), naming the captured spectral fraction.
SpectralAmplitudes spectral_amplitudes(const PulseSpec& pulse,
                                       const ModeGrid& grid);

}  // namespace cpf
