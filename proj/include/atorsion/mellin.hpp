/*
 * mellin.hpp - meromorphic continuation of Mellin transforms.
 *
 * For f with a small-t expansion  f(t) = sum c t^a (log t)^j + O(t^rho)  and
 * exponential decay at infinity, split at T > 0:
 *
 *   int_0^inf f t^{s-1} dt
 *       = sum c int_0^T t^{s+a-1} (log t)^j dt          (closed form, poles)
 *       + int_0^T (f - expansion) t^{s-1} dt             (holomorphic, Re s > -rho)
 *       + int_T^inf f t^{s-1} dt                         (entire)
 *
 * The closed-form pieces satisfy  I_j = (T^u (log T)^j - j I_{j-1}) / u  with
 * u = s + a, so each term contributes a pole of order j + 1 at s = -a.
 */
#pragma once

#include "atorsion/expansion.hpp"
#include "atorsion/quadrature.hpp"

#include <complex>
#include <optional>

namespace atorsion::mellin {

using Complex = std::complex<double>;

struct MellinInput {
    RealFunction f;
    AsymptoticExpansion expansion;
    std::optional<DecayCertificate> decay;
    // Optional cancellation-free evaluation of f - expansion. When empty the
    // difference is formed directly.
    RealFunction remainder;

    double remainder_at(double t) const;
};

// int_0^T t^{s+alpha-1} (log t)^j dt, continued in s. At s + alpha = 0 the
// finite part (log T)^{j+1} / (j+1) is returned.
Complex mellin_term_closed(double alpha, int j, double T, Complex s);

Complex continue_mellin(const MellinInput& in, double T, Complex s,
                        const quadrature::Options& opts = {});

// Laurent series at s = 0 of the continued Mellin transform, orders
// -(max pole) .. order_max. Needs remainder_exponent > 0.
LaurentSeries mellin_laurent(const MellinInput& in, double T, int order_max = 4,
                             const quadrature::Options& opts = {});

// Order-0 coefficient of F, after optionally multiplying by the holomorphic
// factor 1/(s Gamma(s)) = 1 + gamma s + ... and/or dividing by s.
// Throws PoleTooDeep when F has a pole of order > 2.
double finite_part(const LaurentSeries& F, bool divide_by_s, bool multiply_recip_gamma);

}  // namespace atorsion::mellin
