#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <vector>

namespace atorsion {

using RealFunction = std::function<double(double)>;

// One term c * t^alpha * (log t)^j of a small-t expansion.
struct ExpansionTerm {
    double alpha = 0.0;
    int log_power = 0;
    double coeff = 0.0;
};

// f(t) = sum c t^alpha (log t)^j + O(t^remainder_exponent) as t -> 0+.
// Terms are kept sorted by (alpha, j) with no duplicates; an infinite
// remainder exponent marks an exponentially small remainder.
class AsymptoticExpansion {
public:
    AsymptoticExpansion() = default;
    // Throws InputError on duplicate (alpha, j), negative j, or a remainder
    // exponent not above every alpha.
    AsymptoticExpansion(std::vector<ExpansionTerm> terms, double remainder_exponent);

    const std::vector<ExpansionTerm>& terms() const noexcept { return terms_; }
    double remainder_exponent() const noexcept { return remainder_exponent_; }
    bool empty() const noexcept { return terms_.empty(); }

    double evaluate(double t) const;

    // Linear combination; like (alpha, j) pairs are merged and exact or
    // near-exact cancellations (relative 1e-14) dropped. The remainder
    // exponent is the minimum of the two.
    AsymptoticExpansion combined(const AsymptoticExpansion& other, double weight_self,
                                 double weight_other) const;
    AsymptoticExpansion scaled(double weight) const;

private:
    std::vector<ExpansionTerm> terms_;
    double remainder_exponent_ = std::numeric_limits<double>::infinity();
};

// Laurent series at s = 0 with coefficients for orders [min_order, order_max].
class LaurentSeries {
public:
    using Complex = std::complex<double>;

    LaurentSeries() = default;
    LaurentSeries(int min_order, int order_max);
    LaurentSeries(int min_order, std::vector<Complex> coeffs);

    static LaurentSeries constant(Complex c, int order_max);
    // The monomial s^m.
    static LaurentSeries monomial(int m, int order_max);

    int min_order() const noexcept { return min_order_; }
    int order_max() const noexcept { return min_order_ + static_cast<int>(coeffs_.size()) - 1; }

    // Zero outside the tracked range.
    Complex operator[](int order) const;
    Complex& at(int order);

    // Smallest order with |coeff| > tol; order_max() + 1 when all vanish.
    int leading_order(double tol = 0.0) const;
    // Order of the pole at 0 (0 when holomorphic), ignoring |coeff| <= tol.
    int pole_order(double tol = 0.0) const;

    // Truncates to the smaller of the two order_max values.
    LaurentSeries operator+(const LaurentSeries& o) const;
    LaurentSeries operator-(const LaurentSeries& o) const;
    LaurentSeries operator*(const LaurentSeries& o) const;
    LaurentSeries operator*(Complex c) const;
    LaurentSeries divided_by_s() const;
    LaurentSeries times_s() const;
    // 1 / F, requires a nonzero leading coefficient.
    LaurentSeries reciprocal() const;
    LaurentSeries truncated(int order_max) const;

    Complex evaluate(Complex s) const;

private:
    int min_order_ = 0;
    std::vector<Complex> coeffs_;
};

// |f(t)| <= constant * exp(-rate t) for t >= valid_from.
struct DecayCertificate {
    double rate = 0.0;
    double constant = 0.0;
    double valid_from = 0.0;

    double bound(double t) const;

    // Validates the claim on a grid covering valid_from .. valid_from + 60/rate
    // and throws AssertionFailure when violated.
    static DecayCertificate make(const RealFunction& f, double rate, double constant,
                                 double valid_from);
};

}  // namespace atorsion
