/*
 * zeta.hpp - spectral zeta functions of model spectra.
 *
 *     zeta(s) = sum_{lambda > 0} m lambda^{-s}
 *             = 1/Gamma(s) int_0^inf (Tr e^{-t Delta} - dim ker) t^{s-1} dt
 *
 * The Dirichlet sum converges for Re s > dim/2; the Mellin side continues
 * it to all s using the model's small-t expansion and spectral gap.
 */
#pragma once

#include "atorsion/mellin.hpp"
#include "atorsion/spectra.hpp"

namespace atorsion::mellin {

struct ZetaOptions {
    double split = 1.0;  // T in the Mellin split
    quadrature::Options quadrature;
};

// Regularized heat trace of spec packaged for continue_mellin. Model spectra
// use the untruncated theta functions and their exact small-t leading terms;
// explicit spectra use sum m e^{-lambda t} with the constant term only.
MellinInput regularized_trace_input(const spectra::Spectrum& spec);

struct DirectZeta {
    double value = 0.0;
    double tail_bound = 0.0;  // bound on the omitted modes beyond the cutoff
};

// Dirichlet sum over the stored positive eigenvalues. Model spectra need
// s > dim/2 for the tail bound (otherwise it is +inf).
DirectZeta zeta_direct(const spectra::Spectrum& spec, double s);

// Continued zeta via the Mellin path. Exact at non-positive integers, where
// 1/Gamma vanishes and only the residue of the Mellin transform survives.
double zeta_mellin(const spectra::Spectrum& spec, double s, const ZetaOptions& opts = {});

// Explicit spectra: finite Dirichlet sum (entire). Model spectra: Mellin path.
double zeta_from_spectrum(const spectra::Spectrum& spec, double s, const ZetaOptions& opts = {});

// zeta'(0) by central differences (h = 1e-4, one Richardson step) of the
// Mellin path. Throws PoleAtZero when the expansion has uncancelled
// t^0 (log t)^j terms with j >= 1. Explicit spectra return -sum m log lambda.
double zeta_prime_zero(const spectra::Spectrum& spec, const ZetaOptions& opts = {});

// Same quantity from the Laurent data: FP of (Mellin transform) / (s Gamma(s)).
double zeta_prime_zero_laurent(const spectra::Spectrum& spec, const ZetaOptions& opts = {});

// Throws PoleAtZero when a t^0 (log t)^j term with j >= 1 is present.
void require_regular_at_zero(const AsymptoticExpansion& expansion);

}  // namespace atorsion::mellin
