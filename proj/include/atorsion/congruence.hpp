/*
 * congruence.hpp - exact arithmetic for principal congruence subgroups.
 *
 * For gamma congruent to I mod N (at every prime p | N) the coefficients
 * a_k of det(x I - (gamma - I)) = x^n + a_{n-1} x^{n-1} + ... + a_0 are sums
 * of products of n-k entries of gamma - I, hence
 *
 *     nu_p(a_k) >= (n - k) nu_p(N).
 *
 * For integral non-unipotent gamma some a_k is a nonzero integer, so
 * |a_k| >= N^(n-k), which forces an entry of gamma - I of size >= c_n N with
 * c_n = 1 / (2^n n!). The same holds for every real conjugate, giving the
 * exclusion radius
 *
 *     r(x^-1 gamma x) >= log(c_n N - sqrt n) - 1/2 log n.
 */
#pragma once

#include "atorsion/linalg.hpp"

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace atorsion::congruence {

using Rational = mpq_class;
using Integer = mpz_class;

class ExactMatrix {
public:
    explicit ExactMatrix(std::size_t n);
    ExactMatrix(std::size_t n, std::vector<Rational> row_major);

    static ExactMatrix identity(std::size_t n);
    static ExactMatrix from_integers(const std::vector<std::vector<long>>& rows);
    // Rows of "num" or "num/den" strings.
    static ExactMatrix from_strings(const std::vector<std::vector<std::string>>& rows);

    std::size_t dim() const noexcept { return n_; }
    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    ExactMatrix operator+(const ExactMatrix& o) const;
    ExactMatrix operator-(const ExactMatrix& o) const;
    ExactMatrix operator*(const ExactMatrix& o) const;
    bool operator==(const ExactMatrix& o) const;

    Rational trace() const;
    Rational determinant() const;
    bool is_zero() const;
    bool is_integral() const;
    Rational max_abs_entry() const;

    linalg::Matrix to_double() const;
    std::vector<std::vector<std::string>> to_strings() const;

private:
    std::size_t n_;
    std::vector<Rational> data_;
};

// p-adic valuation, +infinity for zero.
class Valuation {
public:
    static Valuation infinity() { return Valuation(); }
    explicit Valuation(long v) : finite_(true), value_(v) {}

    bool is_infinite() const noexcept { return !finite_; }
    long value() const noexcept { return value_; }
    bool at_least(long bound) const noexcept { return !finite_ || value_ >= bound; }
    bool operator==(const Valuation& o) const noexcept {
        return finite_ == o.finite_ && (!finite_ || value_ == o.value_);
    }
    std::string to_string() const { return finite_ ? std::to_string(value_) : "inf"; }

private:
    Valuation() = default;
    bool finite_ = false;
    long value_ = 0;
};

bool is_prime(std::uint64_t p);
// Prime factorization by trial division, ascending primes.
std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n);

Valuation valuation(const Rational& q, std::uint64_t p);
Valuation valuation(const Integer& z, std::uint64_t p);

bool in_principal_congruence(const ExactMatrix& gamma, std::uint64_t level);

// [a_0, ..., a_{n-1}] of the monic det(x I - (gamma - I)).
std::vector<Rational> char_poly_shifted(const ExactMatrix& gamma);

bool is_unipotent(const ExactMatrix& gamma);

struct CertificateRow {
    std::uint64_t p = 0;
    int k = 0;
    Valuation val = Valuation::infinity();
    long required = 0;
};

struct ValuationCertificate {
    std::size_t n = 0;
    std::uint64_t level = 0;
    ExactMatrix gamma{2};
    std::vector<CertificateRow> rows;
    bool passed = false;
};

ValuationCertificate valuation_certificate(const ExactMatrix& gamma, std::uint64_t level);

struct ExclusionBound {
    int n = 0;
    std::uint64_t level = 0;
    Rational c_n;
    double radius = 0.0;
    double C_n = 0.25;
    std::uint64_t N_0 = 0;
};

inline constexpr double kReportingConstant = 0.25;

Rational exclusion_constant(int n);
// The radius formula on its own, for real-valued N (asymptotic checks).
double exclusion_radius_value(int n, double level);
// Least N >= 3 with radius(n, N) >= C log N; the predicate is monotone.
std::uint64_t exclusion_threshold(int n, double C = kReportingConstant);
ExclusionBound exclusion_radius(int n, std::uint64_t level);

struct ExclusionReport {
    double min_distance = 0.0;
    double bound = 0.0;
    std::size_t trials = 0;
    bool passed = false;
};

// Trial 0 uses the identity conjugator; the rest are random real matrices
// drawn from per-trial streams of `seed`.
ExclusionReport verify_exclusion(const ExactMatrix& gamma, std::uint64_t level,
                                 std::size_t trials, std::uint64_t seed);

std::uint64_t euler_phi(std::uint64_t n);

inline constexpr std::uint64_t kDefaultEnumerationBudget = 50'000'000;

struct SlCount {
    Integer formula;
    std::optional<Integer> enumerated;  // absent when over budget
};

Integer sl_count_formula(int n, std::uint64_t level);
// Brute force over all n x n matrices mod N. Throws BudgetExceeded when
// N^(n^2) exceeds the budget.
Integer sl_count_enumerate(int n, std::uint64_t level,
                           std::uint64_t budget = kDefaultEnumerationBudget);
// Formula value, cross-checked by enumeration when within budget. A mismatch
// throws AssertionFailure.
SlCount sl_count(int n, std::uint64_t level, std::uint64_t budget = kDefaultEnumerationBudget);

double gl_sl_torsion_scale(std::uint64_t level, double log_torsion_sl);

// gamma = I + N B with B uniform in [-spread, spread]^{n x n}; when
// coprime_denominators > 1 the entries of B get random denominators in
// [1, coprime_denominators] coprime to N.
ExactMatrix random_congruent(std::size_t n, std::uint64_t level, long spread,
                             long coprime_denominators, std::mt19937_64& rng);

// Non-unipotent element of the principal congruence subgroup of SL(n, Z):
// a product of elementary matrices I + N c E_ij, resampled until the product
// is not unipotent.
ExactMatrix random_congruent_sl(std::size_t n, std::uint64_t level, long spread,
                                std::mt19937_64& rng);

}  // namespace atorsion::congruence
