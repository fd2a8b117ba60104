#include "cpf/dynamics.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpf/detail.hpp"

namespace cpf {

using cd = std::complex<double>;
using detail::pi;

namespace {

using detail::cis;

double continuum_coupling(const PhysicalParams& p, const ModeGrid& grid) {
  return std::sqrt(p.kappa * grid.delta_omega / (2.0 * pi));
}

// Eigendecomposition-based propagator pieces, shared by propagate_exact and
// the evolve_* exact path (which also needs the loss integral).
struct EigenProp {
  Eigen::MatrixXcd V;
  Eigen::VectorXcd eigenvalues;
  Eigen::VectorXcd y0;  // V^{-1} x0

  Eigen::VectorXcd at(double T) const {
    Eigen::VectorXcd scaled =
        ((eigenvalues * T).array().exp() * y0.array()).matrix();
    return V * scaled;
  }

  // integral_0^T |x_row(t)|^2 dt in closed form from the spectral data.
  double row_sq_integral(int row, double T) const {
    const Eigen::Index n = eigenvalues.size();
    Eigen::VectorXcd m(n);
    for (Eigen::Index j = 0; j < n; ++j) m[j] = V(row, j) * y0[j];
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index l = 0; l < n; ++l) {
        const cd s = eigenvalues[j] + std::conj(eigenvalues[l]);
        const cd sT = s * T;
        cd phi;  // (e^{sT} - 1)/s, stable for small |sT|
        if (std::abs(sT) < 1e-6) {
          phi = T * (1.0 + sT / 2.0 + sT * sT / 6.0);
        } else {
          phi = (std::exp(sT) - 1.0) / s;
        }
        acc += std::real(m[j] * std::conj(m[l]) * phi);
      }
    }
    return acc;
  }
};

EigenProp decompose(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& x0) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(A);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("generator eigendecomposition did not converge");
  EigenProp prop;
  prop.V = solver.eigenvectors();
  prop.eigenvalues = solver.eigenvalues();
  prop.y0 = prop.V.partialPivLu().solve(x0);
  // Guard against a defective (non-diagonalizable) generator: the solve must
  // reconstruct x0.
  const double resid = (prop.V * prop.y0 - x0).norm();
  if (!(resid <= 1e-8 * (1.0 + x0.norm())) || !std::isfinite(resid))
    throw std::runtime_error(
        "generator eigenbasis is ill-conditioned (reconstruction residual " +
        std::to_string(resid) + ")");
  return prop;
}

// Matrix-free fixed-step RK4 on the arrowhead system. O(N) per stage.
struct SteppedOutcome {
  Eigen::VectorXcd c;
  cd lambda{0.0, 0.0};
  cd mu{0.0, 0.0};
  long steps = 0;
  double mu_sq_integral = 0.0;  // trapezoid accumulation of |mu(t)|^2 dt
};

SteppedOutcome run_stepped(const Eigen::VectorXcd& c0,
                           const std::vector<double>& om, double K,
                           bool coupled, double g, double gamma, double delta,
                           double T, double dt_request) {
  long n_steps = static_cast<long>(std::ceil(T / dt_request - 1e-9));
  if (n_steps < 1) n_steps = 1;
  const double dt = T / static_cast<double>(n_steps);
  const int n = static_cast<int>(c0.size());

  Eigen::VectorXcd c = c0;
  cd lam(0.0, 0.0), mu(0.0, 0.0);
  Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), ct(n);
  cd l1, l2, l3, l4, m1, m2, m3, m4;

  auto deriv = [&](const Eigen::VectorXcd& cc, cd ll, cd mm,
                   Eigen::VectorXcd& dc, cd& dl, cd& dm) {
    cd sum(0.0, 0.0);
    for (int k = 0; k < n; ++k) {
      const cd v = cc[k];
      dc[k] = cd(om[k] * v.imag(), -om[k] * v.real()) - K * ll;
      sum += v;
    }
    dl = K * sum;
    if (coupled) {
      dl += cd(g * mm.imag(), -g * mm.real());
      dm = cd(g * ll.imag(), -g * ll.real()) - cd(0.5 * gamma, delta) * mm;
    } else {
      dm = cd(0.0, 0.0);
    }
  };

  double mu_int = 0.0;
  for (long s = 0; s < n_steps; ++s) {
    const double mu_sq_before = std::norm(mu);
    deriv(c, lam, mu, k1, l1, m1);
    ct = c + (0.5 * dt) * k1;
    deriv(ct, lam + 0.5 * dt * l1, mu + 0.5 * dt * m1, k2, l2, m2);
    ct = c + (0.5 * dt) * k2;
    deriv(ct, lam + 0.5 * dt * l2, mu + 0.5 * dt * m2, k3, l3, m3);
    ct = c + dt * k3;
    deriv(ct, lam + dt * l3, mu + dt * m3, k4, l4, m4);
    c += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    lam += (dt / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    mu += (dt / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
    mu_int += 0.5 * (mu_sq_before + std::norm(mu)) * dt;
  }
  return SteppedOutcome{std::move(c), lam, mu, n_steps, mu_int};
}

double default_dt(const PhysicalParams& p, double horizon) {
  double dt = horizon / 1e5;
  if (p.g > 0.0) dt = std::min(dt, 0.02 / p.g);
  return dt;
}

// Conservative spectral-radius estimate for the stability check of the
// explicit integrator (imaginary-axis stability bound |rho dt| <= 2*sqrt(2)).
double spectral_bound(const PhysicalParams& p, const ModeGrid& grid,
                      bool coupled) {
  double rho = grid.omega_b + p.kappa;
  if (coupled) rho += p.g + std::abs(p.delta);
  return rho;
}

EvolutionReport assemble_report(Eigen::VectorXcd modes, cd lambda, cd mu,
                                long steps, double gamma, double mu_sq_int) {
  EvolutionReport rep;
  rep.final.modes = std::move(modes);
  rep.final.cavity = lambda;
  rep.final.excited = mu;
  const double norm_sq =
      rep.final.modes.squaredNorm() + std::norm(lambda) + std::norm(mu);
  rep.norm_leak = 1.0 - norm_sq;
  rep.cavity_residual = std::norm(lambda);
  rep.excited_residual = std::norm(mu);
  rep.steps = steps;
  rep.loss_integral = gamma * mu_sq_int;
  if (!std::isfinite(norm_sq))
    throw std::runtime_error("evolution produced non-finite amplitudes");
  return rep;
}

EvolutionReport evolve_impl(Branch branch, const SpectralAmplitudes& c0,
                            const PhysicalParams& params, const ModeGrid& grid,
                            const PulseSpec& pulse, const Integrator& integ,
                            std::optional<double> horizon) {
  validate_params(params);
  const int n = grid.n_modes;
  if (c0.values.size() != n)
    throw std::invalid_argument(
        "initial amplitudes and grid disagree on the mode count");
  const double in_norm = c0.values.squaredNorm();
  if (std::abs(in_norm - 1.0) > 1e-6)
    throw std::invalid_argument("initial amplitudes are not normalized");
  const double T = horizon.value_or(pulse.duration);
  if (!(T > 0.0) || !std::isfinite(T))
    throw std::invalid_argument("evolution horizon must be finite and > 0");
  const bool coupled = (branch == Branch::coupled);

  // kappa = 0: the modes decouple from the cavity; lambda and mu stay zero.
  // Free phases use the same expression as downstream reference phases, so
  // "free propagation" is reproduced bit-for-bit.
  if (params.kappa == 0.0) {
    Eigen::VectorXcd modes(n);
    for (int k = 0; k < n; ++k)
      modes[k] = cis(-grid.omegas[k] * T) * c0.values[k];
    return assemble_report(std::move(modes), cd(0.0, 0.0), cd(0.0, 0.0), 1,
                           params.gamma, 0.0);
  }

  const double K = continuum_coupling(params, grid);

  if (integ.method == Method::exact) {
    const Eigen::MatrixXcd A = build_generator(params, grid, branch);
    const int dim = n + (coupled ? 2 : 1);
    Eigen::VectorXcd x0 = Eigen::VectorXcd::Zero(dim);
    x0.head(n) = c0.values;
    std::optional<EigenProp> prop;
    try {
      prop = decompose(A, x0);
    } catch (const std::runtime_error&) {
      // Diagonalization failed; fall through to the stepped integrator.
    }
    if (prop) {
      Eigen::VectorXcd xT = prop->at(T);
      const double mu_sq_int = coupled ? prop->row_sq_integral(n + 1, T) : 0.0;
      EvolutionReport rep = assemble_report(
          xT.head(n), xT[n], coupled ? xT[n + 1] : cd(0.0, 0.0), 1,
          params.gamma, mu_sq_int);
      if (!coupled && std::abs(rep.norm_leak) > 1e-6)
        throw std::runtime_error("norm drift " + std::to_string(rep.norm_leak) +
                                 " beyond tolerance in exact propagation");
      return rep;
    }
  }

  const double dt = integ.dt.value_or(default_dt(params, T));
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("step size must be finite and > 0");
  const double rho = spectral_bound(params, grid, coupled);
  if (rho * dt > 2.8) {
    throw std::runtime_error(
        "step size dt = " + std::to_string(dt) +
        " s is unstable for this system; requires dt <= " +
        std::to_string(2.8 / rho) + " s");
  }
  SteppedOutcome out = run_stepped(c0.values, grid.omegas, K, coupled,
                                   params.g, params.gamma, params.delta, T, dt);
  EvolutionReport rep =
      assemble_report(std::move(out.c), out.lambda, out.mu, out.steps,
                      params.gamma, out.mu_sq_integral);
  if (!coupled && std::abs(rep.norm_leak) > 1e-6)
    throw std::runtime_error("norm drift " + std::to_string(rep.norm_leak) +
                             " beyond tolerance in stepped propagation");
  if (coupled && rep.norm_leak < -1e-9)
    throw std::runtime_error("norm gained " + std::to_string(-rep.norm_leak) +
                             " in stepped propagation");
  return rep;
}

}  // namespace

Eigen::MatrixXcd build_generator(const PhysicalParams& params,
                                 const ModeGrid& grid, Branch branch) {
  validate_params(params);
  const int n = grid.n_modes;
  const bool coupled = (branch == Branch::coupled);
  const int dim = n + (coupled ? 2 : 1);
  const double K = continuum_coupling(params, grid);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    A(k, k) = cd(0.0, -grid.omegas[k]);
    A(k, n) = cd(-K, 0.0);
    A(n, k) = cd(+K, 0.0);
  }
  if (coupled) {
    A(n, n + 1) = cd(0.0, -params.g);
    A(n + 1, n) = cd(0.0, -params.g);
    A(n + 1, n + 1) = cd(-0.5 * params.gamma, -params.delta);
  }
  return A;
}

Eigen::VectorXcd propagate_exact(const Eigen::MatrixXcd& A, double T,
                                 const Eigen::VectorXcd& x0) {
  if (A.rows() != A.cols() || A.rows() != x0.size())
    throw std::invalid_argument("generator/state dimensions disagree");
  bool diagonal = true;
  for (Eigen::Index i = 0; i < A.rows() && diagonal; ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      if (i != j && A(i, j) != cd(0.0, 0.0)) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    Eigen::VectorXcd out(x0.size());
    for (Eigen::Index i = 0; i < x0.size(); ++i)
      out[i] = std::exp(A(i, i) * T) * x0[i];
    return out;
  }
  return decompose(A, x0).at(T);
}

Eigen::VectorXcd propagate_stepped(const Eigen::MatrixXcd& A, double T,
                                   const Eigen::VectorXcd& x0, long n_steps) {
  if (A.rows() != A.cols() || A.rows() != x0.size())
    throw std::invalid_argument("generator/state dimensions disagree");
  if (n_steps < 1) throw std::invalid_argument("need at least one step");
  const double dt = T / static_cast<double>(n_steps);
  Eigen::VectorXcd x = x0;
  Eigen::VectorXcd k1, k2, k3, k4;
  for (long s = 0; s < n_steps; ++s) {
    k1 = A * x;
    k2 = A * (x + 0.5 * dt * k1);
    k3 = A * (x + 0.5 * dt * k2);
    k4 = A * (x + dt * k3);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

EvolutionReport evolve_uncoupled(const SpectralAmplitudes& c0,
                                 const PhysicalParams& params,
                                 const ModeGrid& grid, const PulseSpec& pulse,
                                 const Integrator& integrator,
                                 std::optional<double> horizon) {
  return evolve_impl(Branch::uncoupled, c0, params, grid, pulse, integrator,
                     horizon);
}

EvolutionReport evolve_coupled(const SpectralAmplitudes& c0,
                               const PhysicalParams& params,
                               const ModeGrid& grid, const PulseSpec& pulse,
                               const Integrator& integrator,
                               std::optional<double> horizon) {
  return evolve_impl(Branch::coupled, c0, params, grid, pulse, integrator,
                     horizon);
}

}  // namespace cpf
