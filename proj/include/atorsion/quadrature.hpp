#pragma once

#include <complex>
#include <cstddef>
#include <functional>

namespace atorsion::quadrature {

using Complex = std::complex<double>;
using ComplexIntegrand = std::function<Complex(double)>;

struct Options {
    double abs_tol = 1e-13;
    double rel_tol = 1e-13;
    // Results whose error estimate exceeds max(fail_abs, fail_rel |I|) raise
    // QuadratureFailure.
    double fail_abs = 1e-11;
    double fail_rel = 1e-12;
    std::size_t max_intervals = 4000;
};

struct Result {
    Complex value = 0.0;
    double error = 0.0;
    std::size_t intervals = 0;
};

// Globally adaptive 7/15-point Gauss-Kronrod on [a, b], a < b finite.
// Endpoint singularities are tolerated as long as they are integrable; the
// integrand is never evaluated at a or b.
Result integrate(const ComplexIntegrand& f, double a, double b, const Options& opts = {});

double integrate_real(const std::function<double(double)>& f, double a, double b,
                      const Options& opts = {});

}  // namespace atorsion::quadrature
