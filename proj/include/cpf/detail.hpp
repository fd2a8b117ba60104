#pragma once

// Internal numeric helpers shared across the library. Not part of the public
// surface; subject to change.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>

namespace cpf::detail {

inline constexpr double pi = std::numbers::pi;

// Unit phasor e^{i a}. Every free-propagation phase in the library goes
// through this one function so that equal phases are equal bit-for-bit.
inline std::complex<double> cis(double a) {
  return {std::cos(a), std::sin(a)};
}

// Composite Simpson rule on [a, b] with n uniformly spaced nodes (n odd >= 3).
template <class F>
double simpson(F&& f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n - 1);
  double acc = f(a) + f(b);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    acc += f(a + h * static_cast<double>(j)) * ((j % 2 != 0) ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

// Reduce an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * pi);  // lands in [-pi, pi]
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

// Smallest even integer >= x (minimum 2), tolerating values a hair below an
// integer from floating-point rounding.
inline int ceil_even(double x) {
  int n = static_cast<int>(std::ceil(x - 1e-12));
  if (n % 2 != 0) ++n;
  return n < 2 ? 2 : n;
}

}  // namespace cpf::detail
