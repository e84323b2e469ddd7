#include "atorsion/mellin.hpp"

#include "atorsion/error.hpp"
#include "atorsion/special.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace atorsion::mellin {

namespace {

constexpr double kTailTolerance = 1e-16;

// t^(s-1) * value, formed in log space so tiny t never overflows.
Complex weighted(double value, double t, Complex s) {
    if (value == 0.0) return 0.0;
    const double log_t = std::log(t);
    const Complex w = std::exp((s - 1.0) * log_t + std::log(std::abs(value)));
    return value < 0.0 ? -w : w;
}

// Smallest B >= max(T, T0) such that int_B^inf C e^{-rate t} t^{sigma-1} dt
// is below kTailTolerance.
double tail_cutoff(const DecayCertificate& decay, double T, double sigma) {
    const double rate = decay.rate;
    double B = std::max(T, decay.valid_from);
    if (sigma > 1.0) B = std::max(B, 2.0 * (sigma - 1.0) / rate);
    B = std::max(B, 1e-3);
    const double factor = sigma > 1.0 ? 2.0 : 1.0;
    for (int i = 0; i < 100000; ++i) {
        const double log_bound = std::log(factor * decay.constant / rate) + (sigma - 1.0) * std::log(B) - rate * B;
        if (log_bound < std::log(kTailTolerance)) return B;
        B += std::max(0.25 / rate, 0.05 * B);
    }
    throw Error(ErrorCode::DivergentTail, "could not bound the Mellin tail");
}

void check_head_convergence(const AsymptoticExpansion& e, double sigma) {
    if (!(sigma + e.remainder_exponent() > 0.0)) {
        std::ostringstream msg;
        msg << "Re s = " << sigma << " outside the strip covered by the expansion (remainder exponent "
            << e.remainder_exponent() << ")";
        throw Error(ErrorCode::InputError, msg.str());
    }
}

// int_0^b g(t) dt for g ~ t^{e-1} at 0. With t = b u^m the integrand
// becomes ~ u^{m e - 1}, smooth enough for Gauss-Kronrod once m e >= 3.
Complex head_integral(const quadrature::ComplexIntegrand& g, double b, double e, const quadrature::Options& opts) {
    const int m = (std::isfinite(e) && e < 3.0) ? static_cast<int>(std::min(64.0, std::ceil(3.0 / e))) : 1;
    if (m == 1) return quadrature::integrate(g, 0.0, b, opts).value;
    auto h = [&](double u) {
        const double t = b * std::pow(u, m);
        if (t == 0.0) return Complex(0.0);
        return g(t) * (m * t / u);
    };
    return quadrature::integrate(h, 0.0, 1.0, opts).value;
}

double falling_factorial(double x, int j) {
    double r = 1.0;
    for (int i = 0; i < j; ++i) r *= x - i;
    return r;
}

double factorial(int m) {
    double r = 1.0;
    for (int i = 2; i <= m; ++i) r *= i;
    return r;
}

}  // namespace

double MellinInput::remainder_at(double t) const {
    if (remainder) return remainder(t);
    return f(t) - expansion.evaluate(t);
}

Complex mellin_term_closed(double alpha, int j, double T, Complex s) {
    if (!(T > 0.0)) throw Error(ErrorCode::NonpositiveT, "split point T must be positive");
    if (j < 0) throw Error(ErrorCode::InputError, "log power must be nonnegative");
    const Complex u = s + alpha;
    const double log_t = std::log(T);
    if (u == 0.0) return std::pow(log_t, j + 1) / static_cast<double>(j + 1);
    const Complex t_u = std::exp(u * log_t);
    Complex acc = t_u / u;
    double log_pow = 1.0;
    for (int k = 1; k <= j; ++k) {
        log_pow *= log_t;
        acc = (t_u * log_pow - static_cast<double>(k) * acc) / u;
    }
    return acc;
}

Complex continue_mellin(const MellinInput& in, double T, Complex s, const quadrature::Options& opts) {
    if (!(T > 0.0)) throw Error(ErrorCode::NonpositiveT, "split point T must be positive");
    if (!in.decay) throw Error(ErrorCode::DivergentTail, "no decay certificate for the Mellin tail");
    check_head_convergence(in.expansion, s.real());

    Complex total = 0.0;
    for (const auto& term : in.expansion.terms()) {
        total += term.coeff * mellin_term_closed(term.alpha, term.log_power, T, s);
    }

    auto head = [&](double t) { return weighted(in.remainder_at(t), t, s); };
    const double split = std::min(T, 1.0);
    total += head_integral(head, split, in.expansion.remainder_exponent() + s.real(), opts);
    if (split < T) total += quadrature::integrate(head, split, T, opts).value;

    const double B = tail_cutoff(*in.decay, T, s.real());
    auto tail = [&](double t) { return weighted(in.f(t), t, s); };
    if (B > T) total += quadrature::integrate(tail, T, B, opts).value;
    return total;
}

LaurentSeries mellin_laurent(const MellinInput& in, double T, int order_max, const quadrature::Options& opts) {
    if (!(T > 0.0)) throw Error(ErrorCode::NonpositiveT, "split point T must be positive");
    if (!in.decay) throw Error(ErrorCode::DivergentTail, "no decay certificate for the Mellin tail");
    if (order_max < 0) throw Error(ErrorCode::InputError, "order_max must be >= 0");
    check_head_convergence(in.expansion, 0.0);

    int lowest = 0;
    for (const auto& term : in.expansion.terms()) {
        if (term.alpha == 0.0) lowest = std::min(lowest, -(term.log_power + 1));
    }
    LaurentSeries out(lowest, order_max);
    const double log_t = std::log(T);

    for (const auto& term : in.expansion.terms()) {
        const int j = term.log_power;
        if (term.alpha != 0.0) {
            // Holomorphic at 0: d^m/ds^m of int t^{s+a-1} (log t)^j is the same
            // integral with (log t)^{j+m}.
            for (int m = 0; m <= order_max; ++m) {
                out.at(m) += term.coeff * mellin_term_closed(term.alpha, j + m, T, 0.0) / factorial(m);
            }
        } else {
            // d^j/ds^j (T^s / s) = sum_m (log T)^m / m! (m-1)_j s^{m-1-j}
            for (int q = -(j + 1); q <= order_max; ++q) {
                const int m = q + 1 + j;
                out.at(q) += term.coeff * std::pow(log_t, m) / factorial(m) *
                             falling_factorial(static_cast<double>(m - 1), j);
            }
        }
    }

    const double split = std::min(T, 1.0);
    for (int m = 0; m <= order_max; ++m) {
        const double norm = factorial(m);
        auto head = [&](double t) {
            const double r = in.remainder_at(t);
            if (r == 0.0) return Complex(0.0);
            return Complex(r * std::pow(std::log(t), m) / t / norm);
        };
        auto tail = [&](double t) { return Complex(in.f(t) * std::pow(std::log(t), m) / t / norm); };
        Complex h = head_integral(head, split, in.expansion.remainder_exponent(), opts);
        if (split < T) h += quadrature::integrate(head, split, T, opts).value;
        const double B = tail_cutoff(*in.decay, T, static_cast<double>(m));
        if (B > T) h += quadrature::integrate(tail, T, B, opts).value;
        out.at(m) += h;
    }
    return out;
}

double finite_part(const LaurentSeries& F, bool divide_by_s, bool multiply_recip_gamma) {
    if (F.pole_order() > 2) {
        throw Error(ErrorCode::PoleTooDeep, "pole of order " + std::to_string(F.pole_order()) + " at s = 0");
    }
    LaurentSeries g = F;
    if (multiply_recip_gamma) g = g * reciprocal_gamma_series(4).divided_by_s();
    if (divide_by_s) g = g.divided_by_s();
    if (g.order_max() < 0) throw Error(ErrorCode::InputError, "series truncated below order 0");
    return g[0].real();
}

}  // namespace atorsion::mellin
