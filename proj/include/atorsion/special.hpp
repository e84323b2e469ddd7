#pragma once

#include "atorsion/expansion.hpp"

namespace atorsion::mellin {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Hurwitz zeta sum_{k>=0} (k + a)^-s by Euler-Maclaurin, real s != 1, a > 0.
// Throws PoleAtOne at s = 1.
double hurwitz_zeta(double s, double a);

// d/ds zeta_H(s, a) at s = 0, from Lerch's formula log Gamma(a) - 1/2 log 2 pi.
double hurwitz_zeta_prime0(double a);

// Taylor series of 1/Gamma(s) at 0: s + gamma s^2 + (gamma^2/2 - pi^2/12) s^3 + ...
// `order` counts the tracked orders of the holomorphic factor 1/(s Gamma(s)),
// so the returned series carries orders 1 .. order + 1.
LaurentSeries reciprocal_gamma_series(int order = 4);

// Laurent series of Gamma(s) at 0 (orders -1 .. order - 1).
LaurentSeries gamma_series(int order = 4);

// E_1(x) = int_x^inf e^-u / u du for x > 0, and its logarithm (no underflow).
double exponential_integral_e1(double x);
double log_exponential_integral_e1(double x);

}  // namespace atorsion::mellin
