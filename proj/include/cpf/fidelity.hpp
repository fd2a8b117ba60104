#pragma once

// Atom-photon controlled-phase-flip gate fidelity: overlap coefficients,
// the closed-form quadratic in the input weight, its worst-case minimum,
// a brute-force state-overlap oracle, and the spontaneous-emission loss
// estimate.

#include <complex>
#include <utility>

#include "cpf/core.hpp"
#include "cpf/dynamics.hpp"
#include "cpf/pulse.hpp"

namespace cpf {

// Branch overlap coefficients against the ideal reflected pulse:
//   xi1 = -sum_k [e^{-i omega_k T} c_k(0)]^* c_k(T)   (atom |0>, sign folded
//                                                      in so ideal -> +1)
//   xi2 = +sum_k [e^{-i omega_k T} c'_k(0)]^* c'_k(T) (atom |1>)
struct XiPair {
  std::complex<double> xi1;
  std::complex<double> xi2;
};

// Gate fidelity as a quadratic in x = |beta_0|^2:
//   F(x) = (s2 x^2 + s1 x + s0)/4
// with s2 = |xi1-xi2|^2, s1 = 2 Re[(xi2^* + 1)(xi1 - xi2)], s0 = |xi2 + 1|^2,
// together with its minimum over x in [0, 1].
struct FidelityCurve {
  double s0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double x_min = 0.0;
  double f_min = 0.0;

  double f_of(double x) const {
    return 0.25 * ((s2 * x + s1) * x + s0);
  }
};

// Computes the XiPair from the two branch evolutions of the same input.
// `report0` is the cavity-decoupled branch, `report1` the coupled branch.
// Throws std::invalid_argument on mismatched sizes or non-normalized c0.
XiPair xi_coefficients(const EvolutionReport& report0,
                       const EvolutionReport& report1,
                       const SpectralAmplitudes& c0, const ModeGrid& grid,
                       double T);

// F(x) = |xi1 x + xi2 (1-x) + 1|^2 / 4 in expanded (s-coefficient) form.
// Throws std::domain_error for x outside [0, 1].
double fidelity_quadratic(const XiPair& xi, double x);

// Full curve with its minimizer. The quadratic opens upward (s2 >= 0), so the
// minimum is at the stationary point -s1/(2 s2) when that lies inside [0, 1]
// and at the nearer endpoint otherwise; for s2 = 0 the curve is linear and
// the smaller endpoint wins.
FidelityCurve fidelity_curve(const XiPair& xi);

// (x_min, F_min) of the curve above.
std::pair<double, double> fidelity_min(const XiPair& xi);

// Brute-force oracle: builds the full final atom+photon state (both
// polarization branches, both atomic branches) and the ideal reflected
// target, returns their squared overlap directly. beta0 is the |0> atomic
// amplitude; |beta1| = sqrt(1 - |beta0|^2). Residual cavity/excited
// amplitude counts as infidelity. Throws std::domain_error for |beta0| > 1,
// std::invalid_argument on mismatched inputs.
double overlap_fidelity(const EvolutionReport& report0,
                        const EvolutionReport& report1,
                        const SpectralAmplitudes& c0, const ModeGrid& grid,
                        double T, std::complex<double> beta0);

// Spontaneous-emission loss probability per gate,
//   eta = 1 / [2 (1 + 2 g^2 / (kappa gamma))].
// Throws std::domain_error when kappa * gamma = 0 (the estimate divides by
// it).
double spontaneous_loss(const PhysicalParams& params);

}  // namespace cpf
