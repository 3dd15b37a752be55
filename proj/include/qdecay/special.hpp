#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qdecay {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kSqrtPi = 1.772453850905516027298167483341145183;
inline constexpr double kSqrt2Pi = 2.506628274631000502415765284811045253;

/// Gamma(j + 1/2) by the exact recurrence Gamma(1/2) = sqrt(pi),
/// Gamma(j+1/2) = (j-1/2) Gamma(j-1/2).  Rational multiples of sqrt(pi)
/// avoid library-gamma rounding drift in the coefficient checks.
inline double gamma_half(int j) {
  if (j < 0) throw std::invalid_argument("gamma_half: j < 0");
  double g = kSqrtPi;
  for (int i = 1; i <= j; ++i) g *= (i - 0.5);
  return g;
}

inline double factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: n < 0");
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Physicists' Hermite polynomial H_n at a complex argument (recurrence).
inline std::complex<double> hermite(int n, std::complex<double> z) {
  if (n == 0) return {1.0, 0.0};
  std::complex<double> hm1{1.0, 0.0};
  std::complex<double> h = 2.0 * z;
  for (int k = 1; k < n; ++k) {
    const std::complex<double> next = 2.0 * z * h - 2.0 * double(k) * hm1;
    hm1 = h;
    h = next;
  }
  return h;
}

/// i^n for integer n (exact, no trig roundoff).
inline std::complex<double> ipow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

/// Principal-branch (i t)^(-j-1/2) for t > 0:
/// t^(-j-1/2) * exp(-i pi (2j+1)/4).
inline std::complex<double> it_inverse_half_power(int j, double t) {
  if (!(t > 0.0))
    throw std::invalid_argument("it_inverse_half_power: t must be > 0");
  const double mag = std::pow(t, -(j + 0.5));
  const double ang = -kPi * (2 * j + 1) / 4.0;
  return {mag * std::cos(ang), mag * std::sin(ang)};
}

}  // namespace qdecay
