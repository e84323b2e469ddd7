#include "atorsion/spectra.hpp"

#include "atorsion/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace atorsion::spectra {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_circle(double length, double twist, int cutoff) {
    if (!(length > 0.0) || !std::isfinite(length)) throw Error(ErrorCode::InputError, "circle length must be positive");
    if (!(twist >= 0.0 && twist < 1.0)) throw Error(ErrorCode::InputError, "twist must lie in [0, 1)");
    if (cutoff < 0) throw Error(ErrorCode::InputError, "cutoff K must be >= 0");
}

double frequency_sq(double length) { return (2.0 * kPi / length) * (2.0 * kPi / length); }

// Sum over all k in Z of e^{-a (k + twist)^2}, optionally without k = 0 when
// twist = 0. Terms are added outward from the minimum.
double circle_direct(double length, double twist, double t, bool drop_zero_mode) {
    const double a = t * frequency_sq(length);
    double sum = 0.0;
    for (int side = 0; side < 2; ++side) {
        for (long k = (side == 0 ? 0 : -1);; k += (side == 0 ? 1 : -1)) {
            if (k == 0 && twist == 0.0 && drop_zero_mode) continue;
            const double u = static_cast<double>(k) + twist;
            const double term = std::exp(-a * u * u);
            sum += term;
            if (term <= 1e-18 * sum || term == 0.0) break;
        }
    }
    return sum;
}

// rho with theta = L / sqrt(4 pi t) (1 + rho), from the Poisson side.
double circle_poisson_rho(double length, double twist, double t) {
    const double b = length * length / (4.0 * t);
    double sum = 0.0;
    for (long m = 1;; ++m) {
        const double md = static_cast<double>(m);
        const double envelope = std::exp(-b * md * md);
        sum += 2.0 * envelope * std::cos(2.0 * kPi * md * twist);
        if (envelope <= 1e-18 * std::max(1.0, std::abs(sum)) || envelope == 0.0) break;
    }
    return sum;
}

double circle_leading(double length, double t) { return length / std::sqrt(4.0 * kPi * t); }

bool use_poisson(double length, double t) { return t < length * length / (4.0 * kPi); }

double circle_full(const CircleModel& c, double t) {
    if (use_poisson(c.length, t)) return circle_leading(c.length, t) * (1.0 + circle_poisson_rho(c.length, c.twist, t));
    return circle_direct(c.length, c.twist, t, false);
}

// theta minus its zero mode (only present when twist = 0).
double circle_regularized(const CircleModel& c, double t) {
    if (use_poisson(c.length, t)) {
        const double full = circle_leading(c.length, t) * (1.0 + circle_poisson_rho(c.length, c.twist, t));
        return c.twist == 0.0 ? full - 1.0 : full;
    }
    return circle_direct(c.length, c.twist, t, true);
}

double circle_rho(const CircleModel& c, double t) {
    if (use_poisson(c.length, t)) return circle_poisson_rho(c.length, c.twist, t);
    return circle_direct(c.length, c.twist, t, false) / circle_leading(c.length, t) - 1.0;
}

double circle_box(double length, double twist, int cutoff, double t) {
    const double a = t * frequency_sq(length);
    double sum = 0.0;
    for (int k = -cutoff; k <= cutoff; ++k) {
        const double u = k + twist;
        sum += std::exp(-a * u * u);
    }
    return sum;
}

double component_multiplicity(const ModelComponent& c) {
    if (const auto* torus = std::get_if<TorusModel>(&c.shape)) {
        return static_cast<double>(binomial(static_cast<int>(torus->lengths.size()), torus->degree));
    }
    return 1.0;
}

bool torus_untwisted(const TorusModel& m) {
    return std::all_of(m.twists.begin(), m.twists.end(), [](double a) { return a == 0.0; });
}

double component_full(const ModelComponent& c, double t) {
    if (const auto* circle = std::get_if<CircleModel>(&c.shape)) return circle_full(*circle, t);
    const auto& torus = std::get<TorusModel>(c.shape);
    double prod = component_multiplicity(c);
    for (std::size_t i = 0; i < torus.lengths.size(); ++i) prod *= circle_full({torus.lengths[i], torus.twists[i]}, t);
    return prod;
}

double component_regularized(const ModelComponent& c, double t) {
    if (const auto* circle = std::get_if<CircleModel>(&c.shape)) return circle_regularized(*circle, t);
    const auto& torus = std::get<TorusModel>(c.shape);
    const double mult = component_multiplicity(c);
    if (!torus_untwisted(torus)) return component_full(c, t);
    // prod (1 + eps_i) - 1 with eps_i the zero-mode-free circle traces
    double log_sum = 0.0;
    for (std::size_t i = 0; i < torus.lengths.size(); ++i) {
        log_sum += std::log1p(circle_regularized({torus.lengths[i], 0.0}, t));
    }
    return mult * std::expm1(log_sum);
}

double component_leading_coeff(const ModelComponent& c) {
    if (const auto* circle = std::get_if<CircleModel>(&c.shape)) return circle->length / std::sqrt(4.0 * kPi);
    const auto& torus = std::get<TorusModel>(c.shape);
    double volume = 1.0;
    for (double l : torus.lengths) volume *= l;
    const double d = static_cast<double>(torus.lengths.size());
    return component_multiplicity(c) * volume / std::pow(4.0 * kPi, d / 2.0);
}

int component_dim(const ModelComponent& c) {
    if (std::holds_alternative<CircleModel>(c.shape)) return 1;
    return static_cast<int>(std::get<TorusModel>(c.shape).lengths.size());
}

double component_remainder(const ModelComponent& c, double t) {
    if (const auto* circle = std::get_if<CircleModel>(&c.shape)) {
        return circle_leading(circle->length, t) * circle_rho(*circle, t);
    }
    const auto& torus = std::get<TorusModel>(c.shape);
    double log_sum = 0.0;
    for (std::size_t i = 0; i < torus.lengths.size(); ++i) {
        log_sum += std::log1p(circle_rho({torus.lengths[i], torus.twists[i]}, t));
    }
    const double d = static_cast<double>(torus.lengths.size());
    return component_leading_coeff(c) * std::pow(t, -d / 2.0) * std::expm1(log_sum);
}

double component_gap(const ModelComponent& c) {
    auto nearest = [](double twist) { return twist == 0.0 ? 0.0 : std::min(twist, 1.0 - twist); };
    if (const auto* circle = std::get_if<CircleModel>(&c.shape)) {
        const double delta = circle->twist == 0.0 ? 1.0 : nearest(circle->twist);
        return frequency_sq(circle->length) * delta * delta;
    }
    const auto& torus = std::get<TorusModel>(c.shape);
    double lowest = 0.0;
    for (std::size_t i = 0; i < torus.lengths.size(); ++i) {
        const double delta = nearest(torus.twists[i]);
        lowest += frequency_sq(torus.lengths[i]) * delta * delta;
    }
    if (lowest > 0.0) return lowest;
    double smallest = kInf;
    for (double l : torus.lengths) smallest = std::min(smallest, frequency_sq(l));
    return smallest;
}

double component_tail(const ModelComponent& c, double t) {
    if (const auto* circle = std::get_if<CircleModel>(&c.shape)) {
        return circle_tail_bound(circle->length, circle->twist, c.cutoff, t);
    }
    const auto& torus = std::get<TorusModel>(c.shape);
    const std::size_t d = torus.lengths.size();
    std::vector<double> box(d), tail(d);
    for (std::size_t i = 0; i < d; ++i) {
        box[i] = circle_box(torus.lengths[i], torus.twists[i], c.cutoff, t);
        tail[i] = circle_tail_bound(torus.lengths[i], torus.twists[i], c.cutoff, t);
    }
    // A lattice point outside the box leaves it in at least one coordinate.
    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double term = tail[i];
        for (std::size_t j = 0; j < d; ++j) {
            if (j != i) term *= box[j] + tail[j];
        }
        total += term;
    }
    return component_multiplicity(c) * total;
}

std::vector<SpectrumEntry> circle_entries(double length, double twist, int cutoff) {
    const double c2 = frequency_sq(length);
    std::vector<SpectrumEntry> entries;
    entries.reserve(static_cast<std::size_t>(2 * cutoff + 1));
    for (int k = -cutoff; k <= cutoff; ++k) {
        const double u = std::abs(k + twist);
        entries.push_back({c2 * u * u, 1});
    }
    return entries;
}

}  // namespace

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

// ---------------------------------------------------------------------------
// Spectrum

Spectrum::Spectrum(std::vector<SpectrumEntry> entries, int dim, Cutoff cutoff)
    : dim_(dim), cutoff_(std::move(cutoff)) {
    if (dim < 1) throw Error(ErrorCode::InputError, "spectrum dimension must be >= 1");
    for (const auto& e : entries) {
        if (!(e.eigenvalue >= 0.0) || !std::isfinite(e.eigenvalue)) {
            throw Error(ErrorCode::InputError, "eigenvalues must be finite and nonnegative");
        }
        if (e.multiplicity == 0) throw Error(ErrorCode::InputError, "multiplicities must be positive");
    }
    std::sort(entries.begin(), entries.end(),
              [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.eigenvalue < b.eigenvalue; });
    for (const auto& e : entries) {
        if (!entries_.empty()) {
            auto& last = entries_.back();
            const bool same = e.eigenvalue == last.eigenvalue ||
                              (last.eigenvalue > 0.0 && e.eigenvalue - last.eigenvalue <= 1e-12 * e.eigenvalue);
            if (same) {
                last.multiplicity += e.multiplicity;
                continue;
            }
        }
        entries_.push_back(e);
    }
    for (const auto& e : entries_) {
        if (e.eigenvalue == 0.0) {
            kernel_dim_ = e.multiplicity;
        } else {
            gap_ = e.eigenvalue;
            break;
        }
    }
}

std::uint64_t Spectrum::total_multiplicity() const {
    std::uint64_t total = 0;
    for (const auto& e : entries_) total += e.multiplicity;
    return total;
}

Spectrum circle_spectrum(double length, double twist, int cutoff) {
    validate_circle(length, twist, cutoff);
    Cutoff meta{"circle", {ModelComponent{CircleModel{length, twist}, cutoff}}};
    return Spectrum(circle_entries(length, twist, cutoff), 1, std::move(meta));
}

Spectrum torus_form_spectrum(const std::vector<double>& lengths, const std::vector<double>& twists,
                             int degree, int cutoff) {
    const int d = static_cast<int>(lengths.size());
    if (d < 1 || twists.size() != lengths.size()) {
        throw Error(ErrorCode::InputError, "torus needs matching, nonempty lengths and twists");
    }
    if (degree < 0 || degree > d) throw Error(ErrorCode::InputError, "form degree must lie in [0, d]");
    for (int i = 0; i < d; ++i) validate_circle(lengths[static_cast<std::size_t>(i)], twists[static_cast<std::size_t>(i)], cutoff);

    const std::uint64_t mult = binomial(d, degree);
    // Each coordinate's circle spectrum, then the Minkowski sum.
    std::vector<SpectrumEntry> acc{{0.0, mult}};
    for (int i = 0; i < d; ++i) {
        const auto axis = circle_entries(lengths[static_cast<std::size_t>(i)], twists[static_cast<std::size_t>(i)], cutoff);
        std::vector<SpectrumEntry> next;
        next.reserve(acc.size() * axis.size());
        for (const auto& a : acc)
            for (const auto& b : axis) next.push_back({a.eigenvalue + b.eigenvalue, a.multiplicity * b.multiplicity});
        // Merge between axes to keep the intermediate lists small.
        acc = Spectrum(std::move(next), 1).entries();
    }
    Cutoff meta{"torus", {ModelComponent{TorusModel{lengths, twists, degree}, cutoff}}};
    return Spectrum(std::move(acc), d, std::move(meta));
}

Spectrum disjoint_union(const Spectrum& a, const Spectrum& b) {
    if (a.dim() != b.dim()) throw Error(ErrorCode::InputError, "disjoint union needs equal dimensions");
    std::vector<SpectrumEntry> entries = a.entries();
    entries.insert(entries.end(), b.entries().begin(), b.entries().end());
    Cutoff meta;
    if (a.cutoff().has_model() && b.cutoff().has_model()) {
        meta.kind = "union";
        meta.components = a.cutoff().components;
        meta.components.insert(meta.components.end(), b.cutoff().components.begin(), b.cutoff().components.end());
    } else if (a.empty() && b.cutoff().has_model()) {
        meta = b.cutoff();
    } else if (b.empty() && a.cutoff().has_model()) {
        meta = a.cutoff();
    }
    return Spectrum(std::move(entries), a.dim(), std::move(meta));
}

// ---------------------------------------------------------------------------
// Traces

double circle_tail_bound(double length, double twist, int cutoff, double t) {
    // Omitted |k + twist| >= u0 = K + 1 - twist on both sides, and
    // sum_{j>=0} e^{-a (u0+j)^2} <= e^{-a u0^2} / (1 - e^{-2 a u0}).
    const double a = t * frequency_sq(length);
    const double u0 = cutoff + 1.0 - twist;
    const double denom = -std::expm1(-2.0 * a * u0);
    if (!(denom > 0.0)) return kInf;
    return 2.0 * std::exp(-a * u0 * u0) / denom;
}

HeatValue heat_trace(const Spectrum& spec, double t) {
    if (!(t > 0.0)) throw Error(ErrorCode::NonpositiveTime, "heat trace needs t > 0");
    HeatValue h;
    h.t = t;
    for (const auto& e : spec.entries()) h.value += static_cast<double>(e.multiplicity) * std::exp(-e.eigenvalue * t);
    for (const auto& c : spec.cutoff().components) h.tail_bound += component_tail(c, t);
    return h;
}

double heat_trace_poisson_circle(double length, double twist, double t) {
    if (!(t > 0.0)) throw Error(ErrorCode::NonpositiveTime, "heat trace needs t > 0");
    validate_circle(length, twist, 0);
    return circle_leading(length, t) * (1.0 + circle_poisson_rho(length, twist, t));
}

double model_trace(const Spectrum& spec, double t) {
    if (!(t > 0.0)) throw Error(ErrorCode::NonpositiveTime, "heat trace needs t > 0");
    if (!spec.cutoff().has_model()) return heat_trace(spec, t).value;
    double sum = 0.0;
    for (const auto& c : spec.cutoff().components) sum += component_full(c, t);
    return sum;
}

double regularized_trace(const Spectrum& spec, double t) {
    if (!(t > 0.0)) throw Error(ErrorCode::NonpositiveTime, "heat trace needs t > 0");
    double sum = 0.0;
    if (!spec.cutoff().has_model()) {
        for (const auto& e : spec.entries()) {
            if (e.eigenvalue > 0.0) sum += static_cast<double>(e.multiplicity) * std::exp(-e.eigenvalue * t);
        }
        return sum;
    }
    for (const auto& c : spec.cutoff().components) sum += component_regularized(c, t);
    return sum;
}

double regularized_remainder(const Spectrum& spec, double t) {
    if (!spec.cutoff().has_model()) throw Error(ErrorCode::UnsupportedModel, "no closed-form model");
    double sum = 0.0;
    for (const auto& c : spec.cutoff().components) sum += component_remainder(c, t);
    return sum;
}

double model_gap(const Spectrum& spec) {
    if (!spec.cutoff().has_model()) return spec.gap();
    double g = kInf;
    for (const auto& c : spec.cutoff().components) g = std::min(g, component_gap(c));
    return g;
}

AsymptoticExpansion small_t_expansion(const Spectrum& spec) {
    if (!spec.cutoff().has_model()) {
        throw Error(ErrorCode::UnsupportedModel, "raw spectra have no closed-form small-t expansion");
    }
    AsymptoticExpansion total;
    for (const auto& c : spec.cutoff().components) {
        const double alpha = -component_dim(c) / 2.0;
        AsymptoticExpansion one({{alpha, 0, component_leading_coeff(c)}}, kInf);
        total = total.combined(one, 1.0, 1.0);
    }
    return total;
}

EnvelopeReport decay_envelope_check(const Spectrum& spec, const std::vector<double>& t_grid) {
    if (spec.kernel_dim() > 0) throw Error(ErrorCode::HasKernel, "decay envelope needs a kernel-free spectrum");
    EnvelopeReport r;
    r.gap = spec.gap();
    r.constant = heat_trace(spec, 1.0).value;
    r.min_margin = kInf;
    for (double t : t_grid) {
        if (!(t >= 1.0)) throw Error(ErrorCode::InputError, "decay envelope grid must lie in [1, inf)");
        const double margin = r.constant * std::exp(-r.gap * (t - 1.0)) - heat_trace(spec, t).value;
        r.t.push_back(t);
        r.margins.push_back(margin);
        r.min_margin = std::min(r.min_margin, margin);
    }
    r.passed = r.margins.empty() || r.min_margin >= -kEnvelopeSlack;
    return r;
}

int choose_circle_cutoff(double length, double twist, double t_min, double tol) {
    validate_circle(length, twist, 0);
    if (!(t_min > 0.0)) throw Error(ErrorCode::NonpositiveTime, "t_min must be positive");
    for (int k = 1; k < 10'000'000; ++k) {
        if (circle_tail_bound(length, twist, k, t_min) < tol) return k;
    }
    throw Error(ErrorCode::InputError, "cutoff would exceed 10^7 modes");
}

int choose_torus_cutoff(const std::vector<double>& lengths, const std::vector<double>& twists,
                        int degree, double t_min, double tol) {
    if (lengths.empty() || lengths.size() != twists.size()) {
        throw Error(ErrorCode::InputError, "torus needs matching, nonempty lengths and twists");
    }
    if (!(t_min > 0.0)) throw Error(ErrorCode::NonpositiveTime, "t_min must be positive");
    for (int k = 1; k < 100'000; ++k) {
        ModelComponent c{TorusModel{lengths, twists, degree}, k};
        if (component_tail(c, t_min) < tol) return k;
    }
    throw Error(ErrorCode::InputError, "torus cutoff would exceed 10^5 modes per axis");
}

}  // namespace atorsion::spectra
