#include "cpf/gate.hpp"

#include <cmath>
#include <stdexcept>

#include "cpf/detail.hpp"

namespace cpf {

using cd = std::complex<double>;
using detail::cis;

namespace {

constexpr double inv_sqrt2 = 0.7071067811865475244;

void check_atom_pair(cd b0, cd b1, const char* which) {
  const double norm = std::norm(b0) + std::norm(b1);
  if (std::abs(norm - 1.0) > 1e-9)
    throw std::invalid_argument(std::string("the ") + which +
                                " atomic amplitudes are not normalized");
}

int check_atom_index(int atom) {
  if (atom != 1 && atom != 2)
    throw std::invalid_argument("atom index must be 1 or 2");
  return atom;
}

// True when the selected atom of basis row `row` (layout 4i + 2j + p) is in
// state |0>.
bool selected_atom_is_zero(int row, int atom) {
  const int bit = (atom == 1) ? ((row >> 2) & 1) : ((row >> 1) & 1);
  return bit == 0;
}

void check_same_grid(const std::vector<double>& a,
                     const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("frequency grids have different sizes");
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] != b[k])
      throw std::invalid_argument("frequency grids do not match");
}

}  // namespace

IdealJointState make_ideal_state(cd beta10, cd beta11, cd beta20, cd beta21) {
  check_atom_pair(beta10, beta11, "first");
  check_atom_pair(beta20, beta21, "second");
  const cd b1[2] = {beta10, beta11};
  const cd b2[2] = {beta20, beta21};
  IdealJointState s;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        s.amplitudes[static_cast<std::size_t>(4 * i + 2 * j + p)] =
            b1[i] * b2[j] * inv_sqrt2;
  return s;
}

MultimodeJointState make_multimode_state(cd beta10, cd beta11, cd beta20,
                                         cd beta21,
                                         const SpectralAmplitudes& c0,
                                         const ModeGrid& grid) {
  check_atom_pair(beta10, beta11, "first");
  check_atom_pair(beta20, beta21, "second");
  if (c0.values.size() != grid.n_modes)
    throw std::invalid_argument(
        "spectral amplitudes and grid disagree on the mode count");
  const cd b1[2] = {beta10, beta11};
  const cd b2[2] = {beta20, beta21};
  MultimodeJointState s;
  s.omegas = grid.omegas;
  s.amplitudes.resize(8, grid.n_modes);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        s.amplitudes.row(4 * i + 2 * j + p) =
            (b1[i] * b2[j] * inv_sqrt2) * c0.values.transpose();
  return s;
}

IdealJointState ideal_cpf_atom_photon(const IdealJointState& state, int atom) {
  check_atom_index(atom);
  IdealJointState out = state;
  for (int row = 0; row < 8; ++row) {
    const bool is_h = (row & 1) == 0;
    if (is_h && selected_atom_is_zero(row, atom))
      out.amplitudes[static_cast<std::size_t>(row)] =
          -out.amplitudes[static_cast<std::size_t>(row)];
  }
  return out;
}

IdealJointState hwp_rotation(const IdealJointState& state) {
  IdealJointState out;
  for (int b = 0; b < 4; ++b) {
    const cd h = state.amplitudes[static_cast<std::size_t>(2 * b)];
    const cd v = state.amplitudes[static_cast<std::size_t>(2 * b + 1)];
    out.amplitudes[static_cast<std::size_t>(2 * b)] = (-h + v) * inv_sqrt2;
    out.amplitudes[static_cast<std::size_t>(2 * b + 1)] = (h + v) * inv_sqrt2;
  }
  return out;
}

MultimodeJointState hwp_rotation(const MultimodeJointState& state) {
  MultimodeJointState out;
  out.omegas = state.omegas;
  out.amplitudes.resizeLike(state.amplitudes);
  for (int b = 0; b < 4; ++b) {
    out.amplitudes.row(2 * b) =
        inv_sqrt2 * (-state.amplitudes.row(2 * b) +
                     state.amplitudes.row(2 * b + 1));
    out.amplitudes.row(2 * b + 1) =
        inv_sqrt2 * (state.amplitudes.row(2 * b) +
                     state.amplitudes.row(2 * b + 1));
  }
  return out;
}

IdealJointState compose_ideal_cpf(const IdealJointState& state) {
  for (int b = 0; b < 4; ++b) {
    const cd h = state.amplitudes[static_cast<std::size_t>(2 * b)];
    const cd v = state.amplitudes[static_cast<std::size_t>(2 * b + 1)];
    if (std::abs(h - v) > 1e-9)
      throw std::invalid_argument(
          "the composite sequence requires the photon factor (|H>+|V>)/sqrt2");
  }
  IdealJointState s = ideal_cpf_atom_photon(state, 1);
  s = hwp_rotation(s);
  s = ideal_cpf_atom_photon(s, 2);
  s = hwp_rotation(s);
  s = ideal_cpf_atom_photon(s, 1);
  return s;
}

MultimodeJointState realistic_reflection(const MultimodeJointState& state,
                                         int atom,
                                         const ScatteringProfile& profile,
                                         double T) {
  check_atom_index(atom);
  check_same_grid(state.omegas, profile.omegas);
  const Eigen::Index n = state.amplitudes.cols();
  MultimodeJointState out;
  out.omegas = state.omegas;
  out.amplitudes.resizeLike(state.amplitudes);
  for (int row = 0; row < 8; ++row) {
    const bool is_h = (row & 1) == 0;
    const bool zero_branch = selected_atom_is_zero(row, atom);
    for (Eigen::Index k = 0; k < n; ++k) {
      const cd prop = cis(-state.omegas[static_cast<std::size_t>(k)] * T);
      cd factor = prop;
      if (is_h) factor *= zero_branch ? profile.r0[k] : profile.r1[k];
      out.amplitudes(row, k) = factor * state.amplitudes(row, k);
    }
  }
  return out;
}

CompositeResult compose_realistic_cpf(const MultimodeJointState& state,
                                      const ScatteringProfile& profile1,
                                      const ScatteringProfile& profile2,
                                      double T) {
  check_same_grid(state.omegas, profile1.omegas);
  check_same_grid(state.omegas, profile2.omegas);
  const Eigen::Index n = state.amplitudes.cols();

  // Precondition: the photon factors out of the atoms as c(0) x
  // (|H>+|V>)/sqrt2. That means (a) every row is proportional to a common
  // spectral vector and (b) H and V rows agree within each atomic block.
  const double scale = state.amplitudes.cwiseAbs().maxCoeff();
  if (!(scale > 0.0))
    throw std::invalid_argument("joint state is identically zero");
  Eigen::Index ref_row = 0;
  double best = -1.0;
  for (int row = 0; row < 8; ++row) {
    const double norm = state.amplitudes.row(row).norm();
    if (norm > best) {
      best = norm;
      ref_row = row;
    }
  }
  const Eigen::RowVectorXcd ref =
      state.amplitudes.row(ref_row) / state.amplitudes.row(ref_row).norm();
  for (int row = 0; row < 8; ++row) {
    const cd coeff =
        ref.conjugate().cwiseProduct(state.amplitudes.row(row)).sum();
    const double resid = (state.amplitudes.row(row) - coeff * ref).norm();
    if (resid > 1e-9 * scale * std::sqrt(static_cast<double>(n)))
      throw std::invalid_argument(
          "the photon does not factor out of the atomic state");
  }
  for (int b = 0; b < 4; ++b) {
    const double diff =
        (state.amplitudes.row(2 * b) - state.amplitudes.row(2 * b + 1)).norm();
    if (diff > 1e-9 * std::max(1.0, scale))
      throw std::invalid_argument(
          "the composite sequence requires the photon factor (|H>+|V>)/sqrt2");
  }

  MultimodeJointState s = realistic_reflection(state, 1, profile1, T);
  s = hwp_rotation(s);
  s = realistic_reflection(s, 2, profile2, T);
  s = hwp_rotation(s);
  s = realistic_reflection(s, 1, profile1, T);

  // Ideal outcome: the atomic |00> amplitudes change sign and every mode
  // carries the three-leg propagation phase.
  Eigen::MatrixXcd ideal = state.amplitudes;
  ideal.row(0) = -ideal.row(0);
  ideal.row(1) = -ideal.row(1);
  for (Eigen::Index k = 0; k < n; ++k)
    ideal.col(k) *= cis(-3.0 * state.omegas[static_cast<std::size_t>(k)] * T);

  const cd overlap = (ideal.conjugate().cwiseProduct(s.amplitudes)).sum();
  CompositeResult result;
  result.state = std::move(s);
  result.f12 = std::norm(overlap);
  return result;
}

}  // namespace cpf
