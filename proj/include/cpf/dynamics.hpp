#pragma once

// Single-excitation equations of motion for the two atomic branches:
// uncoupled (atom in |0>, bare cavity) and coupled (atom in |1>).
//
//   dc_k/dt      = -i omega_k c_k - K lambda          K = sqrt(kappa d_omega / 2 pi)
//   dlambda/dt   =  K sum_k c_k            [- i g mu   when coupled]
//   dmu/dt       = -i g lambda' - (gamma/2 + i delta) mu
//
// The system is linear and time-independent; the exact propagator
// (eigendecomposition) is the default method, with a fixed-step classical
// fourth-order integrator retained as an independent oracle.

#include <Eigen/Dense>
#include <complex>
#include <optional>

#include "cpf/core.hpp"
#include "cpf/pulse.hpp"

namespace cpf {

enum class Branch { uncoupled, coupled };
enum class Method { exact, stepped };

// Integrator choice; dt applies to the stepped method only (default
// min(0.02/g, T/1e5), the g term skipped when g = 0).
struct Integrator {
  Method method = Method::exact;
  std::optional<double> dt;
};

// Single-excitation amplitudes at one instant.
struct AmplitudeState {
  Eigen::VectorXcd modes;                    // c_k, length N
  std::complex<double> cavity{0.0, 0.0};     // lambda
  std::complex<double> excited{0.0, 0.0};    // mu (identically 0 uncoupled)
};

// Evolution outcome with the diagnostics the ideal-gate condition cares
// about (vanishing cavity/excited residuals, no norm gain).
struct EvolutionReport {
  AmplitudeState final;
  double norm_leak = 0.0;         // 1 - ||final||^2
  double cavity_residual = 0.0;   // |lambda(T)|^2
  double excited_residual = 0.0;  // |mu(T)|^2
  long steps = 0;                 // integrator steps (1 for exact)
  double loss_integral = 0.0;     // gamma * integral_0^T |mu(t)|^2 dt
};

// Dense generator A with x' = A x; layout [c_1..c_N, lambda (, mu)].
// Uncoupled A is anti-Hermitian; coupled A adds -gamma/2 - i delta on the mu
// diagonal.
Eigen::MatrixXcd build_generator(const PhysicalParams& params,
                                 const ModeGrid& grid, Branch branch);

// exp(A T) x0 via eigendecomposition (with a fast path for exactly diagonal
// A). Deterministic. Throws std::runtime_error if the decomposition fails.
Eigen::VectorXcd propagate_exact(const Eigen::MatrixXcd& A, double T,
                                 const Eigen::VectorXcd& x0);

// Classical fixed-step fourth-order integration of x' = A x over [0, T] with
// n_steps uniform steps. Dense-matrix variant used as an oracle in tests.
Eigen::VectorXcd propagate_stepped(const Eigen::MatrixXcd& A, double T,
                                   const Eigen::VectorXcd& x0, long n_steps);

// Evolve the uncoupled branch from c(0) = c0, lambda(0) = 0 for a time
// `horizon` (default: the pulse duration). The stepped path never
// materializes the dense generator (O(N) per stage).
// Throws std::invalid_argument on size mismatch or unnormalized input,
// std::runtime_error on numerical failure (norm drift, instability).
EvolutionReport evolve_uncoupled(const SpectralAmplitudes& c0,
                                 const PhysicalParams& params,
                                 const ModeGrid& grid, const PulseSpec& pulse,
                                 const Integrator& integrator = {},
                                 std::optional<double> horizon = {});

// Same for the coupled branch, from lambda(0) = mu(0) = 0. Additionally
// throws std::runtime_error when the requested step size violates the
// stability bound, naming the required dt.
EvolutionReport evolve_coupled(const SpectralAmplitudes& c0,
                               const PhysicalParams& params,
                               const ModeGrid& grid, const PulseSpec& pulse,
                               const Integrator& integrator = {},
                               std::optional<double> horizon = {});

}  // namespace cpf
