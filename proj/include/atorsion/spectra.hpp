/*
 * spectra.hpp - explicit model spectra and their heat traces.
 *
 * Circle of length L with twist a (flat line bundle with holonomy e^{2 pi i a}):
 *
 *     eigenvalues (2 pi (k + a) / L)^2,  k in Z,
 *     theta(t) = sum_k e^{-t (2 pi (k+a)/L)^2}
 *              = L / sqrt(4 pi t) * sum_m e^{-L^2 m^2 / 4t} cos(2 pi m a)   (Poisson)
 *
 * Flat d-torus, p-forms: eigenvalues sum_i (2 pi (k_i + a_i) / L_i)^2 with
 * every multiplicity scaled by binom(d, p); its trace is binom(d, p) times the
 * product of circle traces. Stored spectra are truncated at |k_i| <= K; the
 * model descriptors kept in the cutoff metadata let traces be evaluated
 * without truncation and give rigorous Gaussian tail bounds.
 */
#pragma once

#include "atorsion/expansion.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace atorsion::spectra {

struct CircleModel {
    double length = 0.0;
    double twist = 0.0;  // in [0, 1)
};

struct TorusModel {
    std::vector<double> lengths;
    std::vector<double> twists;
    int degree = 0;  // form degree p
};

struct ModelComponent {
    std::variant<CircleModel, TorusModel> shape;
    int cutoff = 0;  // K
};

// kind is one of "explicit", "circle", "torus", "union". Explicit spectra
// are complete finite spectra; the others carry their model components.
struct Cutoff {
    std::string kind = "explicit";
    std::vector<ModelComponent> components;

    bool has_model() const { return kind != "explicit"; }
};

struct SpectrumEntry {
    double eigenvalue = 0.0;
    std::uint64_t multiplicity = 0;
};

class Spectrum {
public:
    Spectrum() = default;
    // Sorts, merges eigenvalues equal to relative 1e-12, and validates.
    Spectrum(std::vector<SpectrumEntry> entries, int dim, Cutoff cutoff = {});

    const std::vector<SpectrumEntry>& entries() const noexcept { return entries_; }
    int dim() const noexcept { return dim_; }
    std::uint64_t kernel_dim() const noexcept { return kernel_dim_; }
    // Smallest strictly positive stored eigenvalue (0 when none).
    double gap() const noexcept { return gap_; }
    const Cutoff& cutoff() const noexcept { return cutoff_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::uint64_t total_multiplicity() const;

private:
    std::vector<SpectrumEntry> entries_;
    int dim_ = 1;
    std::uint64_t kernel_dim_ = 0;
    double gap_ = 0.0;
    Cutoff cutoff_;
};

Spectrum circle_spectrum(double length, double twist, int cutoff);
Spectrum torus_form_spectrum(const std::vector<double>& lengths, const std::vector<double>& twists,
                             int degree, int cutoff);
// Concatenation of spectra of equal dimension; model components are kept.
Spectrum disjoint_union(const Spectrum& a, const Spectrum& b);

struct HeatValue {
    double value = 0.0;
    double tail_bound = 0.0;  // +inf when the Gaussian bound is not informative
    double t = 0.0;
};

// Sum over stored entries plus the truncation bound from the cutoff metadata.
HeatValue heat_trace(const Spectrum& spec, double t);

double heat_trace_poisson_circle(double length, double twist, double t);

// Untruncated traces of the model (explicit spectra: the stored finite sum).
double model_trace(const Spectrum& spec, double t);
// Trace with the zero modes removed, evaluated without cancellation.
double regularized_trace(const Spectrum& spec, double t);
// regularized_trace minus the small-t expansion, evaluated without
// cancellation. Model spectra only.
double regularized_remainder(const Spectrum& spec, double t);
// Smallest positive eigenvalue of the untruncated model.
double model_gap(const Spectrum& spec);

// Expansion of the full trace: circle -> L/sqrt(4 pi) t^{-1/2};
// torus -> binom(d,p) prod L_i / (4 pi)^{d/2} t^{-d/2}; sums for unions.
// Remainder is exponentially small. Throws UnsupportedModel for explicit
// spectra.
AsymptoticExpansion small_t_expansion(const Spectrum& spec);

struct EnvelopeReport {
    std::vector<double> t;
    std::vector<double> margins;  // theta(1) e^{-gap (t-1)} - theta(t)
    double gap = 0.0;
    double constant = 0.0;  // theta(1)
    double min_margin = 0.0;
    bool passed = false;
};

inline constexpr double kEnvelopeSlack = 1e-12;

// Throws HasKernel when kernel_dim > 0; grid points must be >= 1.
EnvelopeReport decay_envelope_check(const Spectrum& spec, const std::vector<double>& t_grid);

// Gaussian tail bound of a single circle truncated at |k| <= K.
double circle_tail_bound(double length, double twist, int cutoff, double t);
// Smallest K whose tail bound at t_min is below tol.
int choose_circle_cutoff(double length, double twist, double t_min, double tol = 1e-13);
int choose_torus_cutoff(const std::vector<double>& lengths, const std::vector<double>& twists,
                        int degree, double t_min, double tol = 1e-13);

std::uint64_t binomial(int n, int k);

}  // namespace atorsion::spectra
