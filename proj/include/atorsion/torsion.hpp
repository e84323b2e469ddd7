/*
 * torsion.hpp - Ray-Singer analytic torsion of model spectra.
 *
 *     log T = 1/2 sum_p (-1)^p p zeta_p'(0)
 *
 * together with the truncation pieces of the large-time integral:
 *
 *     E0(T) = int_T^inf Tr_reg e^{-t Delta} dt / t,
 *     E2(T) = int_T^inf h(t) dt / t,
 *
 * and the L2-term 1/2 d/ds [ 1/Gamma(s) int_0^inf sum (-1)^p p h_p(t) t^{s-1} dt ]_{s=0}.
 */
#pragma once

#include "atorsion/mellin.hpp"
#include "atorsion/spectra.hpp"
#include "atorsion/zeta.hpp"

#include <map>

namespace atorsion::torsion {

struct TorsionInput {
    int dim = 1;
    double lambda = 0.0;  // declared strong-acyclicity gap
    std::map<int, spectra::Spectrum> per_degree;
    // Accept spectra with kernels (zeta functions use the kernel-free trace).
    bool kernel_removed_override = false;
};

struct TorsionResult {
    double log_t = 0.0;
    std::map<int, double> zeta_prime;          // finite-difference path
    std::map<int, double> zeta_prime_laurent;  // Laurent path
};

// Throws NotAcyclic when a degree has a kernel (without the override) or a
// gap below lambda, or when lambda <= 0.
TorsionResult analytic_torsion(const TorsionInput& input, const mellin::ZetaOptions& opts = {});

// Convenience: both degrees of the circle carry the same spectrum.
TorsionInput circle_input(double length, double twist, int cutoff, bool kernel_removed_override = false);

struct TruncationReport {
    double T = 0.0;
    double value_full = 0.0;       // zeta'(0)
    double value_truncated = 0.0;  // d/ds [1/Gamma(s) int_0^T theta t^{s-1} dt] at 0
    double remainder = 0.0;        // int_T^inf theta dt / t
    double bound = 0.0;            // theta(1) e^{gap} e^{-gap (1-eps) T} / (gap (1-eps) T)
};

// Throws HasKernel, NonpositiveT (T < 1), InputError (eps outside (0, 1)),
// AssertionFailure if |remainder| > bound.
TruncationReport truncation_remainder(const spectra::Spectrum& spec, double T, double epsilon,
                                      const mellin::ZetaOptions& opts = {});

struct BoundedValue {
    double value = 0.0;
    double bound = 0.0;
};

// int_T^inf h(t) dt / t with the certificate |.| <= h(1) e^{gap} / gap * e^{-gap T}.
BoundedValue e2_remainder(const RealFunction& h, double T, double gap);

// t^(2) for the alternating combination sum (-1)^p p h_p of the given
// per-degree inputs. Throws PoleRemains when the combination leaves a pole
// of the zeta-type function at 0.
double l2_term(const std::map<int, mellin::MellinInput>& per_degree, double T = 1.0,
               const quadrature::Options& opts = {});

// h(t) = (4 pi t)^{-1/2} e^{-m^2 t}: heat kernel on the diagonal of the line
// with potential m^2.
mellin::MellinInput massive_line_input(double mass);

}  // namespace atorsion::torsion
