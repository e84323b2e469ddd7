// Independent oracles and a small property-test harness for the unit tests.
#pragma once

#include "atorsion/congruence.hpp"
#include "atorsion/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

// Runs `trials` cases. gen(rng) draws an input; prop(input) returns an error
// description on failure. The first failure is reported with its seed and
// trial index so it can be replayed.
template <typename Gen, typename Prop>
void for_all(const char* name, std::uint64_t seed, std::size_t trials, Gen gen, Prop prop) {
    for (std::size_t i = 0; i < trials; ++i) {
        auto rng = atorsion::task_rng(seed, i);
        auto input = gen(rng);
        const std::optional<std::string> failure = prop(input);
        if (failure) {
            std::ostringstream msg;
            msg << name << " failed (seed " << seed << ", trial " << i << "): " << *failure;
            FAIL_CHECK(msg.str());
            return;
        }
    }
}

inline std::string describe(double got, double want) {
    std::ostringstream out;
    out.precision(17);
    out << "got " << got << ", want " << want;
    return out.str();
}

// Determinant by the Leibniz permutation sum over the index subset `idx`.
inline mpq_class leibniz_minor(const atorsion::congruence::ExactMatrix& a, const std::vector<std::size_t>& idx) {
    std::vector<std::size_t> perm(idx.size());
    std::iota(perm.begin(), perm.end(), 0);
    mpq_class det = 0;
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < perm.size(); ++i)
            for (std::size_t j = i + 1; j < perm.size(); ++j) inversions += perm[i] > perm[j];
        mpq_class term = inversions % 2 ? -1 : 1;
        for (std::size_t i = 0; i < perm.size(); ++i) term *= a(idx[i], idx[perm[i]]);
        det += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return det;
}

// Coefficients of det(x I - A), A = gamma - I: a_k = (-1)^(n-k) * (sum of
// principal minors of size n-k).
inline std::vector<mpq_class> char_poly_by_minors(const atorsion::congruence::ExactMatrix& gamma) {
    using atorsion::congruence::ExactMatrix;
    const std::size_t n = gamma.dim();
    const ExactMatrix a = gamma - ExactMatrix::identity(n);
    std::vector<mpq_class> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t m = n - k;
        mpq_class sum = 0;
        std::vector<bool> pick(n, false);
        std::fill(pick.begin(), pick.begin() + static_cast<long>(m), true);
        do {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < n; ++i)
                if (pick[i]) idx.push_back(i);
            sum += leibniz_minor(a, idx);
        } while (std::prev_permutation(pick.begin(), pick.end()));
        out[k] = (m % 2 ? -1 : 1) * sum;
    }
    return out;
}

// E_1(x) = int_{log x}^inf exp(-e^w) dw by composite Simpson in w.
inline double e1_by_quadrature(double x) {
    const double a = std::log(x);
    const double b = std::max(a, 0.0) + 5.0;  // exp(-e^5) ~ 1e-65
    const int steps = 200000;
    const double h = (b - a) / steps;
    double sum = std::exp(-std::exp(a)) + std::exp(-std::exp(b));
    for (int i = 1; i < steps; ++i) sum += (i % 2 ? 4.0 : 2.0) * std::exp(-std::exp(a + i * h));
    return sum * h / 3.0;
}

// Bernoulli polynomial B_m(a) from the explicit double sum; gives
// zeta_H(-m, a) = -B_{m+1}(a) / (m + 1).
inline double bernoulli_polynomial(int m, double a) {
    double total = 0.0;
    for (int k = 0; k <= m; ++k) {
        double inner = 0.0;
        double binom = 1.0;
        for (int j = 0; j <= k; ++j) {
            inner += (j % 2 ? -1.0 : 1.0) * binom * std::pow(a + j, m);
            binom = binom * (k - j) / (j + 1);
        }
        total += inner / (k + 1);
    }
    return total;
}

// Singular values of a 2x2 matrix from the invariants of A^T A.
inline std::pair<double, double> singular_values_2x2(double a, double b, double c, double d) {
    const double s = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    const double disc = std::sqrt(std::max(0.0, s * s - 4.0 * det * det));
    const double big = std::sqrt((s + disc) / 2.0);
    return {big, std::abs(det) / big};
}

}  // namespace testing
