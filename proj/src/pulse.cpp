#include "cpf/pulse.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpf/detail.hpp"

namespace cpf {

double envelope(double t, const PulseSpec& pulse) {
  const double T = pulse.duration;
  if (!(t >= 0.0 && t <= T))
    throw std::domain_error("envelope evaluated outside [0, T]: t = " +
                            std::to_string(t));
  const double u = (t - 0.5 * T) / T;
  return pulse.normalization * std::exp(-24.0 * u * u);
}

SpectralAmplitudes spectral_amplitudes(const PulseSpec& pulse,
                                       const ModeGrid& grid) {
  const double T = pulse.duration;
  const double sigma = pulse_sigma_omega(pulse);
  if (grid.omega_b < 4.0 * sigma) {
    // Spectral amplitude is Gaussian with std sigma, so the captured weight
    // fraction inside [-omega_b, omega_b] is erf(omega_b / sigma).
    const double fraction = std::erf(grid.omega_b / sigma);
    throw std::invalid_argument(
        "mode grid too narrow for the pulse spectrum: omega_b = " +
        std::to_string(grid.omega_b) + " rad/s < 4*sigma_omega = " +
        std::to_string(4.0 * sigma) + " rad/s (band captures fraction " +
        std::to_string(fraction) + " of the spectral weight)");
  }

  // Composite Simpson transform. Node count keeps the per-node phase step of
  // the fastest mode below ~0.1 rad so edge modes are resolved, with a floor
  // for low-bandwidth grids.
  std::size_t nodes = static_cast<std::size_t>(std::ceil(10.0 * grid.omega_b * T));
  if (nodes < 8001) nodes = 8001;
  if (nodes % 2 == 0) ++nodes;

  const double h = T / static_cast<double>(nodes - 1);
  std::vector<double> fw(nodes);  // envelope * Simpson weight
  for (std::size_t j = 0; j < nodes; ++j) {
    const double t = h * static_cast<double>(j);
    const double u = (t - 0.5 * T) / T;
    double w = (j == 0 || j + 1 == nodes) ? 1.0 : ((j % 2 != 0) ? 4.0 : 2.0);
    fw[j] = std::exp(-24.0 * u * u) * w;
  }

  const int n = grid.n_modes;
  Eigen::VectorXcd c(n);
  for (int k = 0; k < n; ++k) {
    const double om = grid.omegas[k];
    // e^{i om t_j} by phase recurrence: one complex multiply per node.
    const std::complex<double> step = std::polar(1.0, om * h);
    std::complex<double> phase(1.0, 0.0);
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t j = 0; j < nodes; ++j) {
      acc += fw[j] * phase;
      phase *= step;
    }
    c[k] = acc;  // constant factors drop out in the renormalization below
  }
  const double norm = c.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw std::runtime_error("spectral transform produced a null amplitude vector");
  c /= norm;
  return SpectralAmplitudes{std::move(c)};
}

}  // namespace cpf
