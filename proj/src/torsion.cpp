#include "atorsion/torsion.hpp"

#include "atorsion/error.hpp"
#include "atorsion/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace atorsion::torsion {

namespace {

constexpr double kTailTolerance = 1e-17;

// log of C e^{-gap B} / (gap B), the bound on int_B^inf.
double log_tail(double constant, double gap, double B) { return std::log(constant / (gap * B)) - gap * B; }

// Smallest B >= T whose tail bound is below the tolerance relative to the
// bound at T (capped at 1).
double tail_end(double constant, double gap, double T) {
    const double target = std::log(kTailTolerance) + std::min(0.0, log_tail(constant, gap, T));
    double B = T;
    while (log_tail(constant, gap, B) >= target) B += std::max(0.5 / gap, 0.05 * B);
    return B;
}

// int_a^b f(t) dt / t; scale (<= 1) shrinks the absolute tolerances for tiny integrals.
double integrate_over_t(const RealFunction& f, double a, double b, double scale = 1.0) {
    if (!(b > a)) return 0.0;
    quadrature::Options opts;
    opts.abs_tol *= scale;
    opts.fail_abs *= scale;
    return quadrature::integrate_real([&](double t) { return f(t) / t; }, a, b, opts);
}

}  // namespace

TorsionResult analytic_torsion(const TorsionInput& input, const mellin::ZetaOptions& opts) {
    if (input.dim < 1) throw Error(ErrorCode::InputError, "dimension must be >= 1");
    TorsionResult result;
    bool any_nonempty = false;
    for (const auto& [p, spec] : input.per_degree) {
        if (p < 0 || p > input.dim) throw Error(ErrorCode::InputError, "form degree outside [0, dim]");
        if (!spec.empty() && spec.dim() != input.dim) {
            throw Error(ErrorCode::InputError, "spectrum dimension does not match the torsion input");
        }
        any_nonempty = any_nonempty || !spec.empty();
    }
    if (!any_nonempty) return result;
    if (!(input.lambda > 0.0)) throw Error(ErrorCode::NotAcyclic, "strong acyclicity needs a declared lambda > 0");

    for (const auto& [p, spec] : input.per_degree) {
        if (spec.empty()) {
            result.zeta_prime[p] = 0.0;
            result.zeta_prime_laurent[p] = 0.0;
            continue;
        }
        if (spec.kernel_dim() > 0 && !input.kernel_removed_override) {
            throw Error(ErrorCode::NotAcyclic, "degree " + std::to_string(p) + " has a kernel");
        }
        const double gap = spectra::model_gap(spec);
        if (gap < input.lambda * (1.0 - 1e-12)) {
            std::ostringstream msg;
            msg << "degree " << p << " has gap " << gap << " below lambda = " << input.lambda;
            throw Error(ErrorCode::NotAcyclic, msg.str());
        }
        result.zeta_prime[p] = mellin::zeta_prime_zero(spec, opts);
        result.zeta_prime_laurent[p] = mellin::zeta_prime_zero_laurent(spec, opts);
    }
    double sum = 0.0;
    for (const auto& [p, value] : result.zeta_prime) sum += ((p % 2 == 0) ? 1.0 : -1.0) * p * value;
    result.log_t = 0.5 * sum;
    return result;
}

TorsionInput circle_input(double length, double twist, int cutoff, bool kernel_removed_override) {
    const auto spec = spectra::circle_spectrum(length, twist, cutoff);
    TorsionInput in;
    in.dim = 1;
    in.per_degree = {{0, spec}, {1, spec}};
    in.lambda = spectra::model_gap(spec);
    in.kernel_removed_override = kernel_removed_override;
    return in;
}

TruncationReport truncation_remainder(const spectra::Spectrum& spec, double T, double epsilon,
                                      const mellin::ZetaOptions& opts) {
    if (!(T >= 1.0)) throw Error(ErrorCode::NonpositiveT, "truncation time must satisfy T >= 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InputError, "epsilon must lie in (0, 1)");
    if (spec.kernel_dim() > 0) throw Error(ErrorCode::HasKernel, "truncation remainder needs a kernel-free spectrum");
    TruncationReport r;
    r.T = T;
    if (spec.empty()) return r;

    const mellin::MellinInput in = mellin::regularized_trace_input(spec);
    mellin::require_regular_at_zero(in.expansion);
    const double gap = in.decay->rate;
    const double theta1 = in.f(1.0);
    const double constant = theta1 * std::exp(gap);

    const double scale = std::min(1.0, std::exp(log_tail(constant, gap, T)));
    r.remainder = integrate_over_t(in.f, T, tail_end(constant, gap, T), scale);

    // d/ds [s (1 + gamma s + ...) (closed terms + head)] at s = 0.
    double truncated = 0.0;
    for (const auto& term : in.expansion.terms()) {
        if (term.alpha == 0.0) {
            truncated += term.coeff * (std::log(T) + mellin::kEulerGamma);
        } else {
            truncated += term.coeff * mellin::mellin_term_closed(term.alpha, term.log_power, T, 0.0).real();
        }
    }
    auto remainder_fn = [&](double t) { return in.remainder_at(t); };
    const double split = std::min(T, 1.0);
    truncated += integrate_over_t(remainder_fn, 0.0, split) + integrate_over_t(remainder_fn, split, T);
    r.value_truncated = truncated;
    r.value_full = mellin::zeta_prime_zero(spec, opts);

    const double rate = gap * (1.0 - epsilon);
    r.bound = std::exp(std::log(theta1) + gap - rate * T - std::log(rate * T));
    if (std::abs(r.remainder) > r.bound) {
        std::ostringstream msg;
        msg << "E0 remainder " << r.remainder << " exceeds bound " << r.bound;
        throw Error(ErrorCode::AssertionFailure, msg.str());
    }
    return r;
}

BoundedValue e2_remainder(const RealFunction& h, double T, double gap) {
    if (!(T >= 1.0)) throw Error(ErrorCode::NonpositiveT, "truncation time must satisfy T >= 1");
    if (!(gap > 0.0)) throw Error(ErrorCode::InputError, "gap must be positive");
    const double constant = std::abs(h(1.0)) * std::exp(gap);
    BoundedValue out;
    if (constant == 0.0) return out;
    DecayCertificate::make(h, gap, constant, 1.0);
    out.value = integrate_over_t(h, T, tail_end(constant, gap, T), std::min(1.0, std::exp(log_tail(constant, gap, T))));
    out.bound = constant / gap * std::exp(-gap * T);
    return out;
}

double l2_term(const std::map<int, mellin::MellinInput>& per_degree, double T, const quadrature::Options& opts) {
    std::vector<std::pair<double, const mellin::MellinInput*>> parts;
    for (const auto& [p, in] : per_degree) {
        if (p < 0) throw Error(ErrorCode::InputError, "form degree must be >= 0");
        if (p == 0) continue;
        if (!in.decay) throw Error(ErrorCode::DivergentTail, "degree " + std::to_string(p) + " has no decay data");
        parts.emplace_back(((p % 2 == 0) ? 1.0 : -1.0) * p, &in);
    }
    if (parts.empty()) return 0.0;

    mellin::MellinInput h;
    h.expansion = AsymptoticExpansion();
    double rate = std::numeric_limits<double>::infinity();
    double constant = 0.0;
    double valid_from = 0.0;
    for (const auto& [w, in] : parts) {
        h.expansion = h.expansion.combined(in->expansion, 1.0, w);
        rate = std::min(rate, in->decay->rate);
        constant += std::abs(w) * in->decay->constant;
        valid_from = std::max(valid_from, in->decay->valid_from);
    }
    h.f = [parts](double t) {
        double sum = 0.0;
        for (const auto& [w, in] : parts) sum += w * in->f(t);
        return sum;
    };
    h.remainder = [parts](double t) {
        double sum = 0.0;
        for (const auto& [w, in] : parts) sum += w * in->remainder_at(t);
        return sum;
    };
    h.decay = DecayCertificate{rate, constant, valid_from};

    for (const auto& term : h.expansion.terms()) {
        if (term.alpha == 0.0 && term.log_power >= 1) {
            throw Error(ErrorCode::PoleRemains, "alternating sum leaves a t^0 log t term: pole at s = 0");
        }
    }
    const LaurentSeries m = mellin::mellin_laurent(h, T, 4, opts);
    // d/ds [M(s) / Gamma(s)] at 0 is the order-0 coefficient of M / (s Gamma(s)).
    return 0.5 * mellin::finite_part(m, false, true);
}

mellin::MellinInput massive_line_input(double mass) {
    if (!(mass > 0.0)) throw Error(ErrorCode::InputError, "mass must be positive");
    const double a = 1.0 / std::sqrt(4.0 * std::numbers::pi);
    const double m2 = mass * mass;
    mellin::MellinInput in;
    in.f = [a, m2](double t) { return a / std::sqrt(t) * std::exp(-m2 * t); };
    in.expansion = AsymptoticExpansion({{-0.5, 0, a}, {0.5, 0, -a * m2}}, 1.5);
    in.remainder = [a, m2](double t) {
        // e^{-x} - 1 + x without cancellation
        const double x = m2 * t;
        double r = 0.0;
        if (x < 0.1) {
            double term = -x;
            for (int k = 2; k < 20; ++k) {
                term *= -x / k;
                r += term;
            }
        } else {
            r = std::expm1(-x) + x;
        }
        return a / std::sqrt(t) * r;
    };
    in.decay = DecayCertificate::make(in.f, m2, a, 1.0);
    return in;
}

}  // namespace atorsion::torsion
