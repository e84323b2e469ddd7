#include "atorsion/special.hpp"

#include "atorsion/error.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace atorsion::mellin {

namespace {

// B_2, B_4, ..., B_30
constexpr std::array<double, 15> kBernoulli = {
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
};

}  // namespace

namespace {

// B_n(a) = sum_k C(n, k) B_k a^(n-k), with B_1 = -1/2 and odd B_k = 0 beyond.
double bernoulli_polynomial(int n, double a) {
    double total = std::pow(a, n) - 0.5 * n * std::pow(a, n - 1);
    double binom = n;
    for (int k = 2; k <= n; ++k) {
        binom = binom * (n - k + 1) / k;
        if (k % 2 == 0) total += binom * kBernoulli[static_cast<std::size_t>(k / 2 - 1)] * std::pow(a, n - k);
    }
    return total;
}

}  // namespace

double hurwitz_zeta(double s, double a) {
    if (s == 1.0) throw Error(ErrorCode::PoleAtOne, "Hurwitz zeta has a pole at s = 1");
    if (!(a > 0.0)) throw Error(ErrorCode::InputError, "Hurwitz zeta requires a > 0");
    if (s <= 0.0 && s == std::round(s) && s > -2.0 * static_cast<double>(kBernoulli.size())) {
        const int n = 1 - static_cast<int>(s);
        return -bernoulli_polynomial(n, a) / n;
    }
    constexpr int kDirect = 24;
    double sum = 0.0;
    for (int k = 0; k < kDirect; ++k) sum += std::pow(k + a, -s);
    const double x = kDirect + a;
    sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
    // sum_j B_2j / (2j)! * s (s+1) ... (s+2j-2) * x^(-s-2j+1)
    double rising = s;          // s (s+1) ... (s+2j-2)
    double factorial = 2.0;     // (2j)!
    double power = std::pow(x, -s - 1.0);
    for (std::size_t j = 1; j <= kBernoulli.size(); ++j) {
        const double term = kBernoulli[j - 1] / factorial * rising * power;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum) || rising == 0.0) break;
        const double jj = static_cast<double>(j);
        rising *= (s + 2.0 * jj - 1.0) * (s + 2.0 * jj);
        factorial *= (2.0 * jj + 1.0) * (2.0 * jj + 2.0);
        power /= x * x;
    }
    return sum;
}

double hurwitz_zeta_prime0(double a) {
    if (!(a > 0.0)) throw Error(ErrorCode::InputError, "Hurwitz zeta requires a > 0");
    return std::lgamma(a) - 0.5 * std::log(2.0 * std::numbers::pi);
}

LaurentSeries reciprocal_gamma_series(int order) {
    if (order < 0 || order > 12) throw Error(ErrorCode::InputError, "reciprocal_gamma_series order must be in [0, 12]");
    // 1/Gamma(s) = s exp(g(s)), g(s) = gamma s - sum_{k>=2} (-1)^k zeta(k) s^k / k
    const int len = order + 1;
    std::vector<double> g(static_cast<std::size_t>(len), 0.0);
    if (len > 1) g[1] = kEulerGamma;
    for (int k = 2; k < len; ++k) {
        const double sign = (k % 2 == 0) ? -1.0 : 1.0;
        g[static_cast<std::size_t>(k)] = sign * hurwitz_zeta(k, 1.0) / k;
    }
    // e = exp(g) as a power series: e' = g' e  =>  m e_m = sum_{k=1}^m k g_k e_{m-k}
    std::vector<double> e(static_cast<std::size_t>(len), 0.0);
    e[0] = 1.0;
    for (int m = 1; m < len; ++m) {
        double acc = 0.0;
        for (int k = 1; k <= m; ++k) acc += k * g[static_cast<std::size_t>(k)] * e[static_cast<std::size_t>(m - k)];
        e[static_cast<std::size_t>(m)] = acc / m;
    }
    std::vector<LaurentSeries::Complex> coeffs(e.begin(), e.end());
    return LaurentSeries(1, std::move(coeffs));
}

LaurentSeries gamma_series(int order) { return reciprocal_gamma_series(order).reciprocal(); }

namespace {

// E_1(x) e^x via the continued fraction 1/(x+1- 1/(x+3- 4/(x+5- ...))),
// modified Lentz; accurate for x >= 1.
double scaled_e1_continued_fraction(double x) {
    constexpr double kTiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h;
}

double e1_series(double x) {
    // -gamma - log x - sum_{k>=1} (-x)^k / (k k!)
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= -x / k;
        const double add = term / k;
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return -kEulerGamma - std::log(x) - sum;
}

}  // namespace

double exponential_integral_e1(double x) {
    if (!(x > 0.0)) throw Error(ErrorCode::InputError, "E1 requires x > 0");
    if (x <= 1.0) return e1_series(x);
    return std::exp(-x) * scaled_e1_continued_fraction(x);
}

double log_exponential_integral_e1(double x) {
    if (!(x > 0.0)) throw Error(ErrorCode::InputError, "E1 requires x > 0");
    if (x <= 1.0) return std::log(e1_series(x));
    return -x + std::log(scaled_e1_continued_fraction(x));
}

}  // namespace atorsion::mellin
