#include "atorsion/zeta.hpp"

#include "atorsion/error.hpp"
#include "atorsion/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace atorsion::mellin {

namespace {

using spectra::Spectrum;

constexpr double kInf = std::numeric_limits<double>::infinity();

double positive_multiplicity(const Spectrum& spec) {
    double total = 0.0;
    for (const auto& e : spec.entries()) {
        if (e.eigenvalue > 0.0) total += static_cast<double>(e.multiplicity);
    }
    return total;
}

// Bound on sum over omitted modes of lambda^{-s} for one model component.
double component_zeta_tail(const spectra::ModelComponent& c, double s) {
    constexpr double kPi = std::numbers::pi;
    const int K = c.cutoff;
    if (const auto* circle = std::get_if<spectra::CircleModel>(&c.shape)) {
        if (!(2.0 * s > 1.0)) return kInf;
        const double freq = 2.0 * kPi / circle->length;
        const double u0 = K + 1.0 - circle->twist;
        const double sum = std::pow(u0, -2.0 * s) + std::pow(u0, 1.0 - 2.0 * s) / (2.0 * s - 1.0);
        return 2.0 * std::pow(freq, -2.0 * s) * sum;
    }
    const auto& torus = std::get<spectra::TorusModel>(c.shape);
    const int d = static_cast<int>(torus.lengths.size());
    const double q = 2.0 * s - d + 1.0;
    if (!(q > 1.0) || K < 3) return kInf;
    double freq_min = kInf;
    for (double l : torus.lengths) freq_min = std::min(freq_min, 2.0 * kPi / l);
    // Shell n <= |k + a|_inf < n + 1 holds at most 2d (2n+3)^{d-1} <= 2d (3n)^{d-1}
    // points and every omitted point lies in a shell with n >= K.
    const double shells = std::pow(static_cast<double>(K), -q) + std::pow(static_cast<double>(K), 1.0 - q) / (q - 1.0);
    const double mult = static_cast<double>(spectra::binomial(d, torus.degree));
    return mult * 2.0 * d * std::pow(3.0, d - 1) * std::pow(freq_min, -2.0 * s) * shells;
}

bool is_nonpositive_integer(double s) { return s <= 0.0 && s == std::floor(s); }

}  // namespace

void require_regular_at_zero(const AsymptoticExpansion& expansion) {
    for (const auto& term : expansion.terms()) {
        if (term.alpha == 0.0 && term.log_power >= 1 && term.coeff != 0.0) {
            throw Error(ErrorCode::PoleAtZero, "uncancelled t^0 log t term gives zeta a pole at s = 0");
        }
    }
}

MellinInput regularized_trace_input(const Spectrum& spec) {
    MellinInput in;
    if (spec.cutoff().has_model()) {
        const double kernel = static_cast<double>(spec.kernel_dim());
        in.f = [spec](double t) { return spectra::regularized_trace(spec, t); };
        in.expansion = spectra::small_t_expansion(spec);
        if (kernel > 0.0) {
            in.expansion = in.expansion.combined(AsymptoticExpansion({{0.0, 0, -kernel}}, kInf), 1.0, 1.0);
        }
        in.remainder = [spec](double t) { return spectra::regularized_remainder(spec, t); };
        const double gap = spectra::model_gap(spec);
        const double c = in.f(1.0) * std::exp(gap);
        in.decay = DecayCertificate::make(in.f, gap, c, 1.0);
        return in;
    }

    std::vector<std::pair<double, double>> modes;
    for (const auto& e : spec.entries()) {
        if (e.eigenvalue > 0.0) modes.emplace_back(e.eigenvalue, static_cast<double>(e.multiplicity));
    }
    const double total = positive_multiplicity(spec);
    in.f = [modes](double t) {
        double sum = 0.0;
        for (const auto& [lambda, m] : modes) sum += m * std::exp(-lambda * t);
        return sum;
    };
    in.remainder = [modes](double t) {
        double sum = 0.0;
        for (const auto& [lambda, m] : modes) sum += m * std::expm1(-lambda * t);
        return sum;
    };
    if (total > 0.0) {
        in.expansion = AsymptoticExpansion({{0.0, 0, total}}, 1.0);
        in.decay = DecayCertificate{spec.gap(), total, 0.0};
    } else {
        in.expansion = AsymptoticExpansion({}, 1.0);
        in.decay = DecayCertificate{1.0, 1.0, 0.0};
    }
    return in;
}

DirectZeta zeta_direct(const Spectrum& spec, double s) {
    DirectZeta z;
    const auto& entries = spec.entries();
    for (auto e = entries.rbegin(); e != entries.rend(); ++e) {
        if (e->eigenvalue > 0.0) z.value += static_cast<double>(e->multiplicity) * std::pow(e->eigenvalue, -s);
    }
    for (const auto& c : spec.cutoff().components) z.tail_bound += component_zeta_tail(c, s);
    return z;
}

double zeta_mellin(const Spectrum& spec, double s, const ZetaOptions& opts) {
    if (!spec.cutoff().has_model() && positive_multiplicity(spec) == 0.0) return 0.0;
    const MellinInput in = regularized_trace_input(spec);
    if (is_nonpositive_integer(s)) {
        // Near s = -m: M(s) ~ c / (s + m) from the t^m term, 1/Gamma(s) ~ (-1)^m m! (s + m).
        const int m = static_cast<int>(-s);
        double residue = 0.0;
        for (const auto& term : in.expansion.terms()) {
            if (term.alpha != static_cast<double>(m)) continue;
            if (term.log_power >= 1 && term.coeff != 0.0) {
                throw Error(ErrorCode::PoleAtZero, "zeta has a pole at this non-positive integer");
            }
            residue += term.coeff;
        }
        if (!(in.expansion.remainder_exponent() > m)) {
            throw Error(ErrorCode::InputError, "expansion too short to resolve zeta at this point");
        }
        double factorial = 1.0;
        for (int i = 2; i <= m; ++i) factorial *= i;
        return ((m % 2 == 0) ? 1.0 : -1.0) * factorial * residue;
    }
    const Complex value = continue_mellin(in, opts.split, Complex(s, 0.0), opts.quadrature);
    return value.real() / std::tgamma(s);
}

double zeta_from_spectrum(const Spectrum& spec, double s, const ZetaOptions& opts) {
    if (!spec.cutoff().has_model()) return zeta_direct(spec, s).value;
    return zeta_mellin(spec, s, opts);
}

double zeta_prime_zero(const Spectrum& spec, const ZetaOptions& opts) {
    if (!spec.cutoff().has_model()) {
        double sum = 0.0;
        for (const auto& e : spec.entries()) {
            if (e.eigenvalue > 0.0) sum -= static_cast<double>(e.multiplicity) * std::log(e.eigenvalue);
        }
        return sum;
    }
    const MellinInput in = regularized_trace_input(spec);
    require_regular_at_zero(in.expansion);
    auto central = [&](double h) {
        const Complex plus = continue_mellin(in, opts.split, Complex(h, 0.0), opts.quadrature);
        const Complex minus = continue_mellin(in, opts.split, Complex(-h, 0.0), opts.quadrature);
        return (plus.real() / std::tgamma(h) - minus.real() / std::tgamma(-h)) / (2.0 * h);
    };
    constexpr double kStep = 1e-4;
    const double coarse = central(kStep);
    const double fine = central(kStep / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

double zeta_prime_zero_laurent(const Spectrum& spec, const ZetaOptions& opts) {
    if (!spec.cutoff().has_model()) return zeta_prime_zero(spec, opts);
    const MellinInput in = regularized_trace_input(spec);
    require_regular_at_zero(in.expansion);
    // zeta = s M(s) / (s Gamma(s)), so zeta'(0) is the order-0 coefficient of M / (s Gamma(s)).
    return finite_part(mellin_laurent(in, opts.split, 4, opts.quadrature), false, true);
}

}  // namespace atorsion::mellin
