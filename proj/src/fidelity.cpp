#include "cpf/fidelity.hpp"

#include <cmath>
#include <stdexcept>

#include "cpf/detail.hpp"

namespace cpf {

using cd = std::complex<double>;
using detail::cis;

namespace {

void check_run_shapes(const EvolutionReport& report,
                      const SpectralAmplitudes& c0, const ModeGrid& grid) {
  const int n = grid.n_modes;
  if (c0.values.size() != n || report.final.modes.size() != n)
    throw std::invalid_argument(
        "evolution output, input amplitudes, and grid disagree on the mode "
        "count");
}

void check_pair(const EvolutionReport& report0, const EvolutionReport& report1,
                const SpectralAmplitudes& c0, const ModeGrid& grid, double T) {
  check_run_shapes(report0, c0, grid);
  check_run_shapes(report1, c0, grid);
  if (!(T > 0.0))
    throw std::invalid_argument("evolution window T must be > 0");
  if (std::abs(c0.values.squaredNorm() - 1.0) > 1e-6)
    throw std::invalid_argument("input amplitudes are not normalized");
}

}  // namespace

XiPair xi_coefficients(const EvolutionReport& report0,
                       const EvolutionReport& report1,
                       const SpectralAmplitudes& c0, const ModeGrid& grid,
                       double T) {
  check_pair(report0, report1, c0, grid, T);
  const int n = grid.n_modes;
  cd acc0(0.0, 0.0), acc1(0.0, 0.0);
  for (int k = 0; k < n; ++k) {
    const cd ref = cis(-grid.omegas[k] * T) * c0.values[k];
    acc0 += std::conj(ref) * report0.final.modes[k];
    acc1 += std::conj(ref) * report1.final.modes[k];
  }
  return XiPair{-acc0, acc1};
}

double fidelity_quadratic(const XiPair& xi, double x) {
  if (!(x >= 0.0 && x <= 1.0))  // NaN fails this too
    throw std::domain_error("input weight x must lie in [0, 1]");
  const cd diff = xi.xi1 - xi.xi2;
  const double s2 = std::norm(diff);
  const double s1 = 2.0 * std::real((std::conj(xi.xi2) + 1.0) * diff);
  const double s0 = std::norm(xi.xi2 + 1.0);
  return 0.25 * ((s2 * x + s1) * x + s0);
}

FidelityCurve fidelity_curve(const XiPair& xi) {
  FidelityCurve c;
  const cd diff = xi.xi1 - xi.xi2;
  c.s2 = std::norm(diff);
  c.s1 = 2.0 * std::real((std::conj(xi.xi2) + 1.0) * diff);
  c.s0 = std::norm(xi.xi2 + 1.0);
  if (c.s2 > 0.0) {
    const double x_star = -c.s1 / (2.0 * c.s2);
    if (x_star < 0.0) {
      c.x_min = 0.0;
    } else if (x_star > 1.0) {
      c.x_min = 1.0;
    } else {
      c.x_min = x_star;
    }
    c.f_min = c.f_of(c.x_min);
  } else {
    // Linear curve: minimum at the smaller endpoint.
    const double f0 = c.f_of(0.0);
    const double f1 = c.f_of(1.0);
    if (f1 < f0) {
      c.x_min = 1.0;
      c.f_min = f1;
    } else {
      c.x_min = 0.0;
      c.f_min = f0;
    }
  }
  return c;
}

std::pair<double, double> fidelity_min(const XiPair& xi) {
  const FidelityCurve c = fidelity_curve(xi);
  return {c.x_min, c.f_min};
}

double overlap_fidelity(const EvolutionReport& report0,
                        const EvolutionReport& report1,
                        const SpectralAmplitudes& c0, const ModeGrid& grid,
                        double T, std::complex<double> beta0) {
  check_pair(report0, report1, c0, grid, T);
  const double b0_sq = std::norm(beta0);
  if (b0_sq > 1.0 + 1e-12)
    throw std::domain_error("|beta0| must be <= 1");
  const double b1 = std::sqrt(std::max(0.0, 1.0 - b0_sq));
  const int n = grid.n_modes;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  // Final state blocks over atom{0,1} x polarization{H,V} x modes. The H
  // branches carry the evolved amplitudes, the V branches the freely
  // propagated input. Cavity/excited remnants live in components orthogonal
  // to the ideal target, so they enter only through the missing mode norm.
  //
  // Ideal target: atom |0> picks up a sign on H (a perfect pi reflection),
  // atom |1> does not; both ride the freely propagated pulse.
  cd overlap(0.0, 0.0);
  for (int k = 0; k < n; ++k) {
    const cd free = cis(-grid.omegas[k] * T) * c0.values[k];
    const cd ideal_0H = -beta0 * inv_sqrt2 * free;
    const cd ideal_0V = +beta0 * inv_sqrt2 * free;
    const cd ideal_1H = b1 * inv_sqrt2 * free;
    const cd ideal_1V = b1 * inv_sqrt2 * free;
    const cd actual_0H = beta0 * inv_sqrt2 * report0.final.modes[k];
    const cd actual_0V = beta0 * inv_sqrt2 * free;
    const cd actual_1H = b1 * inv_sqrt2 * report1.final.modes[k];
    const cd actual_1V = b1 * inv_sqrt2 * free;
    overlap += std::conj(ideal_0H) * actual_0H + std::conj(ideal_0V) * actual_0V +
               std::conj(ideal_1H) * actual_1H + std::conj(ideal_1V) * actual_1V;
  }
  return std::norm(overlap);
}

double spontaneous_loss(const PhysicalParams& params) {
  validate_params(params);
  if (params.kappa * params.gamma == 0.0)
    throw std::domain_error(
        "spontaneous-loss estimate divides by kappa * gamma, which is zero");
  return 1.0 / (2.0 * (1.0 + 2.0 * params.g * params.g /
                                 (params.kappa * params.gamma)));
}

}  // namespace cpf
