#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace delayop {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps an angle into [-pi, pi).
inline double wrap_phase(double theta) noexcept {
  double r = theta - kTwoPi * std::floor((theta + kPi) / kTwoPi);
  if (r >= kPi) r -= kTwoPi;
  if (r < -kPi) r += kTwoPi;
  return r;
}

/// Argument of z in [-pi, pi).
inline double wrapped_arg(std::complex<double> z) noexcept {
  const double a = std::arg(z);
  return a >= kPi ? a - kTwoPi : a;
}

/// Shortest angular separation, in [0, pi].
inline double circular_distance(double a, double b) noexcept {
  return std::abs(wrap_phase(a - b));
}

}  // namespace delayop
