#include "atorsion/cli.hpp"

#include "atorsion/congruence.hpp"
#include "atorsion/dance.hpp"
#include "atorsion/error.hpp"
#include "atorsion/io.hpp"
#include "atorsion/linalg.hpp"
#include "atorsion/rng.hpp"
#include "atorsion/special.hpp"
#include "atorsion/spectra.hpp"
#include "atorsion/torsion.hpp"
#include "atorsion/zeta.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <limits>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

namespace atorsion::cli {

namespace {

using io::Json;
constexpr double kPi = std::numbers::pi;

struct Common {
    std::uint64_t seed = 1;
    std::optional<double> tol;
    std::string out;
    std::string format = "json";
    bool selftest = false;
};

struct Report {
    Json json;
    std::string csv;
    bool passed = true;
};

struct SpectrumSource {
    std::string circle;
    std::optional<double> alpha;
    std::string torus;
    std::string file;
    std::optional<int> K;
};

// ---------------------------------------------------------------------------
// Argument helpers

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InputError, "bad number '" + text + "' for " + what);
    }
}

// "L=6.28,alpha=0.25" -> {L: 6.28, alpha: 0.25}
std::map<std::string, std::string> parse_pairs(const std::string& text) {
    std::map<std::string, std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::InputError, "expected key=value, got '" + item + "'");
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) out.push_back(parse_number(item, what));
    return out;
}

// "1,2;3,4" -> rows of entry strings (entries may be num/den)
congruence::ExactMatrix parse_exact_matrix(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) {
        std::vector<std::string> r;
        std::stringstream rs(row);
        std::string v;
        while (std::getline(rs, v, ',')) r.push_back(v);
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw Error(ErrorCode::InputError, "empty matrix");
    return congruence::ExactMatrix::from_strings(rows);
}

linalg::Matrix parse_real_matrix(const std::string& text) {
    const auto exact = parse_exact_matrix(text);
    return exact.to_double();
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

std::string csv_line(const std::vector<double>& values) {
    std::ostringstream out;
    char buf[64];
    for (std::size_t i = 0; i < values.size(); ++i) {
        // NaN marks a missing value and leaves the field empty.
        if (std::isnan(values[i])) buf[0] = '\0';
        else std::snprintf(buf, sizeof buf, "%.17g", values[i]);
        out << (i ? "," : "") << buf;
    }
    out << "\n";
    return out.str();
}

bool has_source(const SpectrumSource& src) { return !src.circle.empty() || !src.torus.empty() || !src.file.empty(); }

spectra::Spectrum load_spectrum(const SpectrumSource& src, double t_min) {
    const int chosen = (!src.circle.empty()) + (!src.torus.empty()) + (!src.file.empty());
    if (chosen != 1) throw Error(ErrorCode::InputError, "give exactly one of --circle, --torus, --spectrum");
    if (!src.file.empty()) return io::spectrum_from_json(io::read_json_file(src.file));
    if (!src.circle.empty()) {
        auto kv = parse_pairs(src.circle);
        if (!kv.count("L")) throw Error(ErrorCode::InputError, "--circle needs L=<length>");
        const double L = parse_number(kv["L"], "L");
        double alpha = kv.count("alpha") ? parse_number(kv["alpha"], "alpha") : 0.0;
        if (src.alpha) alpha = *src.alpha;
        const int K = src.K ? *src.K : spectra::choose_circle_cutoff(L, alpha, t_min);
        return spectra::circle_spectrum(L, alpha, K);
    }
    auto kv = parse_pairs(src.torus);
    if (!kv.count("L")) throw Error(ErrorCode::InputError, "--torus needs L=<l1:l2:...>");
    const auto lengths = parse_list(kv["L"], "L");
    const auto alphas = kv.count("alpha") ? parse_list(kv["alpha"], "alpha") : std::vector<double>(lengths.size(), 0.0);
    const int p = kv.count("p") ? static_cast<int>(parse_number(kv["p"], "p")) : 0;
    const int K = src.K ? *src.K : spectra::choose_torus_cutoff(lengths, alphas, p, t_min);
    return spectra::torus_form_spectrum(lengths, alphas, p, K);
}

Json spectrum_summary(const spectra::Spectrum& spec) {
    Json j = io::to_json(spec);
    j.erase("entries");
    j["distinct_eigenvalues"] = spec.entries().size();
    j["total_multiplicity"] = spec.total_multiplicity();
    j["gap"] = spec.gap();
    j["model_gap"] = spectra::model_gap(spec);
    return j;
}

// Closed-form zeta of a single circle (Hurwitz), or nullopt.
std::optional<double> circle_zeta_oracle(const spectra::Spectrum& spec, double s) {
    const auto& c = spec.cutoff();
    if (c.kind != "circle" || s == 0.5) return std::nullopt;
    const auto& m = std::get<spectra::CircleModel>(c.components.front().shape);
    const double scale = std::pow(2.0 * kPi / m.length, -2.0 * s);
    if (m.twist == 0.0) return scale * 2.0 * mellin::hurwitz_zeta(2.0 * s, 1.0);
    return scale * (mellin::hurwitz_zeta(2.0 * s, m.twist) + mellin::hurwitz_zeta(2.0 * s, 1.0 - m.twist));
}

std::optional<double> circle_zeta_prime_oracle(const spectra::Spectrum& spec) {
    const auto& c = spec.cutoff();
    if (c.kind != "circle") return std::nullopt;
    const auto& m = std::get<spectra::CircleModel>(c.components.front().shape);
    if (m.twist == 0.0) return -2.0 * std::log(m.length);
    const double sine = std::sin(kPi * m.twist);
    return -std::log(4.0 * sine * sine);
}

// ---------------------------------------------------------------------------
// Self-tests

struct Checks {
    Json list = Json::array();
    bool passed = true;

    void add(const std::string& name, bool ok, double detail) {
        list.push_back({{"name", name}, {"passed", ok}, {"value", detail}});
        passed = passed && ok;
    }
};

Report finish_selftest(const std::string& command, Checks& checks) {
    Report r;
    r.json = {{"command", command}, {"selftest", true}, {"checks", checks.list}, {"passed", checks.passed}};
    r.passed = checks.passed;
    return r;
}

Report selftest_distance(std::uint64_t seed) {
    Checks checks;
    double worst_op = INFINITY, worst_frob = INFINITY, worst_sym = 0.0, worst_k = 0.0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        auto rng = task_rng(seed, i);
        const std::size_t n = 2 + i % 4;
        const auto g = linalg::random_group_point(n, 2.0, rng);
        const auto c = linalg::check_distance_lemma(g);
        worst_op = std::min(worst_op, c.margin_op);
        worst_frob = std::min(worst_frob, c.margin_frob);
        const double inv = linalg::cartan_distance(linalg::GroupPoint::normalized(g.entries().inverse()));
        const double tr = linalg::cartan_distance(linalg::GroupPoint(g.entries().transpose()));
        worst_sym = std::max({worst_sym, std::abs(inv - c.r), std::abs(tr - c.r)});
        const auto k1 = linalg::polar_log(linalg::random_group_point(n, 1.0, rng)).orthogonal_factor;
        const auto k2 = linalg::polar_log(linalg::random_group_point(n, 1.0, rng)).orthogonal_factor;
        worst_k = std::max(worst_k, std::abs(linalg::cartan_distance_normalized(k1 * g.entries() * k2) - c.r));
    }
    checks.add("operator_norm_margin", worst_op >= -1e-9, worst_op);
    checks.add("frobenius_margin", worst_frob >= -1e-9, worst_frob);
    checks.add("inverse_transpose_symmetry", worst_sym <= 1e-9, worst_sym);
    checks.add("bi_k_invariance", worst_k <= 1e-8, worst_k);
    return finish_selftest("distance", checks);
}

Report selftest_exclusion(std::uint64_t seed) {
    Checks checks;
    bool certs = true;
    for (std::uint64_t i = 0; i < 200; ++i) {
        auto rng = task_rng(seed, i);
        const std::size_t n = 2 + i % 3;
        const std::uint64_t N = 3 + (rng() % 200);
        certs = certs && congruence::valuation_certificate(congruence::random_congruent(n, N, 5, 7, rng), N).passed;
    }
    checks.add("certificates_pass", certs, 200);
    checks.add("sl_count_2_4", congruence::sl_count(2, 4).formula == 48, 48);
    checks.add("sl_count_2_3", congruence::sl_count(2, 3).formula == 24, 24);
    bool monotone = true;
    for (std::uint64_t N = 3; N < 5000; N += 7) {
        const double r1 = congruence::exclusion_radius(2, N).radius;
        const double r2 = congruence::exclusion_radius(2, 2 * N).radius;
        monotone = monotone && (r1 == 0.0 || r2 > r1);
    }
    checks.add("radius_monotone", monotone, 0);
    auto rng = task_rng(seed, 1000);
    const auto gamma = congruence::random_congruent_sl(2, 10, 3, rng);
    const auto rep = congruence::verify_exclusion(gamma, 10, 200, seed);
    checks.add("exclusion_n2_N10", rep.passed, rep.min_distance - rep.bound);
    return finish_selftest("exclusion", checks);
}

Report selftest_heat() {
    Checks checks;
    double worst = 0.0;
    for (double t = 1e-3; t <= 10.0; t *= 1.5) {
        const auto spec = spectra::circle_spectrum(2.0 * kPi, 0.3, 500);
        const double direct = spectra::heat_trace(spec, t).value;
        const double poisson = spectra::heat_trace_poisson_circle(2.0 * kPi, 0.3, t);
        worst = std::max(worst, std::abs(direct - poisson) / poisson);
    }
    checks.add("poisson_vs_direct", worst <= 1e-10, worst);
    const auto gapped = spectra::circle_spectrum(2.0 * kPi, 0.5, 100);
    const auto env = spectra::decay_envelope_check(gapped, {1, 2, 5, 10, 50});
    checks.add("decay_envelope", env.passed, env.min_margin);
    const auto exp = spectra::small_t_expansion(spectra::circle_spectrum(2.0 * kPi, 0.0, 0));
    checks.add("circle_a0", std::abs(exp.terms().front().coeff - std::sqrt(kPi)) < 1e-14, exp.terms().front().coeff);
    return finish_selftest("heat", checks);
}

Report selftest_zeta() {
    Checks checks;
    double worst = 0.0;
    for (double a : {0.1, 0.25, 0.5}) {
        const auto spec = spectra::circle_spectrum(2.0 * kPi, a, 50);
        worst = std::max(worst, std::abs(mellin::zeta_prime_zero(spec) - *circle_zeta_prime_oracle(spec)));
    }
    checks.add("circle_zeta_prime", worst <= 1e-6, worst);
    const auto spec = spectra::circle_spectrum(2.0 * kPi, 0.3, 50);
    const double diff = std::abs(mellin::zeta_mellin(spec, 2.0) - *circle_zeta_oracle(spec, 2.0));
    checks.add("mellin_vs_hurwitz_s2", diff <= 1e-8, diff);
    const double rg = std::abs(mellin::reciprocal_gamma_series(4).evaluate(0.1).real() - 1.0 / std::tgamma(0.1));
    checks.add("reciprocal_gamma", rg <= 1e-6, rg);
    return finish_selftest("zeta", checks);
}

Report selftest_torsion() {
    Checks checks;
    double worst = 0.0;
    for (double a : {0.1, 0.3, 0.5}) {
        const double v = torsion::analytic_torsion(torsion::circle_input(2.0 * kPi, a, 50)).log_t;
        worst = std::max(worst, std::abs(v - std::log(2.0 * std::sin(kPi * a))));
    }
    checks.add("twisted_circle", worst <= 1e-6, worst);
    const double lv = torsion::analytic_torsion(torsion::circle_input(10.0, 0.0, 50, true)).log_t;
    checks.add("kernel_removed_circle", std::abs(lv - std::log(10.0)) <= 1e-6, lv);
    const double l2 = torsion::l2_term({{1, torsion::massive_line_input(1.0)}});
    checks.add("massive_line", std::abs(l2 - 0.5) <= 1e-6, l2);
    const spectra::Spectrum one({{2.0, 1}}, 1);
    const auto rep = torsion::truncation_remainder(one, 1.5, 0.01);
    const double e1 = mellin::exponential_integral_e1(3.0);
    checks.add("single_mode_E0", std::abs(rep.remainder - e1) <= 1e-8, rep.remainder);
    return finish_selftest("torsion", checks);
}

Report selftest_dance() {
    Checks checks;
    dance::ErrorBudget b;
    b.n = 2;
    b.lambda = 4.0;
    b.epsilon = 0.0;
    b.C4 = 4.0;
    b.C2 = 1.0;
    const auto choice = dance::optimize_beta_unchecked(b);
    checks.add("beta_star_vs_grid", std::abs(choice.beta_star - choice.beta_grid) <= 1e-3, choice.beta_star);
    const auto req = dance::required_lambda(b, 0.0);
    dance::ErrorBudget edge = b;
    edge.lambda = req.lambda_min;
    edge.beta = req.beta_max;
    const double m = dance::exponents(edge).min_exponent;
    checks.add("boundary_min_exponent", std::abs(m - 1.0) <= 1e-9, m);
    dance::ErrorBudget other = b;
    other.C1 = 17.0;
    other.C3 = 0.001;
    checks.add("lambda_min_independent_of_C1_C3", dance::required_lambda(other, 0.0).lambda_min == req.lambda_min,
               req.lambda_min);
    return finish_selftest("dance", checks);
}

// ---------------------------------------------------------------------------
// Commands

struct DistanceArgs {
    std::string matrix;
    int n = 3;
    std::size_t trials = 1000;
    double spread = 2.0;
};

Report cmd_distance(const DistanceArgs& a, const Common& c) {
    if (c.selftest) return selftest_distance(c.seed);
    const double tol = c.tol.value_or(1e-9);
    Report r;
    if (!a.matrix.empty()) {
        const linalg::GroupPoint g(parse_real_matrix(a.matrix));
        const auto check = linalg::check_distance_lemma(g);
        const auto polar = linalg::polar_log(g);
        std::vector<double> sv(polar.singular_values.data(), polar.singular_values.data() + polar.singular_values.size());
        r.passed = check.margin_op >= -tol && check.margin_frob >= -tol;
        r.json = {{"mode", "single"}, {"r", check.r}, {"log_opnorm", check.log_opnorm},
                  {"log_frobnorm", check.log_frobnorm}, {"margin_op", check.margin_op},
                  {"margin_frob", check.margin_frob}, {"singular_values", sv}, {"passed", r.passed}};
        return r;
    }
    if (a.n < 2) throw Error(ErrorCode::InputError, "--n must be >= 2");
    double min_op = INFINITY, min_frob = INFINITY, max_r = 0.0;
    for (std::size_t i = 0; i < a.trials; ++i) {
        auto rng = task_rng(c.seed, i);
        const auto check = linalg::check_distance_lemma(linalg::random_group_point(static_cast<std::size_t>(a.n), a.spread, rng));
        min_op = std::min(min_op, check.margin_op);
        min_frob = std::min(min_frob, check.margin_frob);
        max_r = std::max(max_r, check.r);
    }
    r.passed = a.trials == 0 || (min_op >= -tol && min_frob >= -tol);
    r.json = {{"mode", "random"}, {"n", a.n}, {"trials", a.trials}, {"seed", c.seed},
              {"min_margin_op", a.trials ? Json(min_op) : Json(nullptr)},
              {"min_margin_frob", a.trials ? Json(min_frob) : Json(nullptr)}, {"max_r", max_r}, {"tol", tol},
              {"passed", r.passed}};
    return r;
}

struct ExclusionArgs {
    int n = 2;
    std::uint64_t N = 10;
    std::size_t trials = 1000;
    std::string gamma;
    long spread = 3;
};

Report cmd_exclusion(const ExclusionArgs& a, const Common& c) {
    if (c.selftest) return selftest_exclusion(c.seed);
    if (a.n < 2) throw Error(ErrorCode::InputError, "--n must be >= 2");
    if (a.N < 3) throw Error(ErrorCode::InputError, "--N must be >= 3");
    congruence::ExactMatrix gamma(static_cast<std::size_t>(a.n));
    if (!a.gamma.empty()) {
        gamma = parse_exact_matrix(a.gamma);
    } else {
        auto rng = task_rng(c.seed, ~std::uint64_t{0});
        gamma = congruence::random_congruent_sl(static_cast<std::size_t>(a.n), a.N, a.spread, rng);
    }
    const auto cert = congruence::valuation_certificate(gamma, a.N);
    const auto rep = congruence::verify_exclusion(gamma, a.N, a.trials, c.seed);
    const auto bound = congruence::exclusion_radius(static_cast<int>(gamma.dim()), a.N);
    Report r;
    r.passed = cert.passed && rep.passed;
    r.json = {{"n", gamma.dim()}, {"N", a.N}, {"seed", c.seed}, {"gamma", gamma.to_strings()},
              {"certificate", io::to_json(cert)},
              {"bound", {{"c_n", bound.c_n.get_str()}, {"radius", bound.radius}, {"C_n", bound.C_n}, {"N_0", bound.N_0}}},
              {"min_distance", rep.min_distance}, {"trials", rep.trials}, {"passed", r.passed}};
    return r;
}

struct GridArgs {
    std::vector<double> t;
    double tmin = 1e-3;
    double tmax = 10.0;
    int points = 25;
};

std::vector<double> time_grid(const GridArgs& g) {
    if (!g.t.empty()) return g.t;
    if (!(g.tmin > 0.0 && g.tmax >= g.tmin) || g.points < 1) throw Error(ErrorCode::InputError, "bad time grid");
    std::vector<double> out;
    for (int i = 0; i < g.points; ++i) {
        const double f = g.points == 1 ? 0.0 : static_cast<double>(i) / (g.points - 1);
        out.push_back(g.tmin * std::pow(g.tmax / g.tmin, f));
    }
    return out;
}

Report cmd_heat(const SpectrumSource& src, const GridArgs& grid, const Common& c) {
    if (c.selftest) return selftest_heat();
    const auto ts = time_grid(grid);
    double t_min = INFINITY;
    for (double t : ts) {
        if (!(t > 0.0)) throw Error(ErrorCode::NonpositiveTime, "times must be positive");
        t_min = std::min(t_min, t);
    }
    const auto spec = load_spectrum(src, t_min);
    const double tol = c.tol.value_or(1e-10);
    const bool circle = spec.cutoff().kind == "circle";
    Report r;
    Json rows = Json::array();
    r.csv = "t,value,tail_bound,model_trace\n";
    for (double t : ts) {
        const auto h = spectra::heat_trace(spec, t);
        const double model = spectra::model_trace(spec, t);
        Json row = {{"t", t}, {"value", h.value}, {"tail_bound", h.tail_bound}, {"model_trace", model}};
        if (circle) {
            const auto& m = std::get<spectra::CircleModel>(spec.cutoff().components.front().shape);
            const double poisson = spectra::heat_trace_poisson_circle(m.length, m.twist, t);
            const bool ok = std::abs(h.value - poisson) <= tol * poisson + h.tail_bound;
            row["poisson"] = poisson;
            row["agrees"] = ok;
            r.passed = r.passed && ok;
        }
        rows.push_back(row);
        r.csv += csv_line({t, h.value, h.tail_bound, model});
    }
    r.json = {{"spectrum", spectrum_summary(spec)}, {"rows", rows}};
    if (spec.kernel_dim() == 0 && !spec.empty()) {
        std::vector<double> late;
        for (double t : ts) {
            if (t >= 1.0) late.push_back(t);
        }
        const auto env = spectra::decay_envelope_check(spec, late);
        r.json["envelope"] = {{"gap", env.gap}, {"constant", env.constant}, {"points", env.t.size()},
                              {"min_margin", env.t.empty() ? Json(nullptr) : Json(env.min_margin)},
                              {"passed", env.passed}};
        r.passed = r.passed && env.passed;
    }
    r.json["passed"] = r.passed;
    return r;
}

Report cmd_zeta(const SpectrumSource& src, const std::vector<double>& s_values, double split, const Common& c) {
    if (c.selftest) return selftest_zeta();
    const auto spec = load_spectrum(src, 1e-2);
    const double tol = c.tol.value_or(1e-8);
    mellin::ZetaOptions opts;
    opts.split = split;
    Report r;
    Json rows = Json::array();
    r.csv = "s,mellin,direct,direct_tail\n";
    for (double s : s_values) {
        const double value = mellin::zeta_from_spectrum(spec, s, opts);
        const auto direct = mellin::zeta_direct(spec, s);
        const bool converges = std::isfinite(direct.tail_bound);
        Json row = {{"s", s}, {"zeta", value}, {"direct", converges ? Json(direct.value) : Json(nullptr)},
                    {"direct_tail", converges ? Json(direct.tail_bound) : Json(nullptr)}};
        if (const auto oracle = circle_zeta_oracle(spec, s)) {
            const bool ok = std::abs(value - *oracle) <= tol * std::max(1.0, std::abs(*oracle));
            row["oracle"] = *oracle;
            row["agrees"] = ok;
            r.passed = r.passed && ok;
        }
        rows.push_back(row);
        const double missing = std::numeric_limits<double>::quiet_NaN();
        r.csv += csv_line({s, value, converges ? direct.value : missing, converges ? direct.tail_bound : missing});
    }
    r.json = {{"spectrum", spectrum_summary(spec)}, {"rows", rows}};
    try {
        const double fd = mellin::zeta_prime_zero(spec, opts);
        const double laurent = mellin::zeta_prime_zero_laurent(spec, opts);
        Json zp = {{"finite_difference", fd}, {"laurent", laurent}};
        if (const auto oracle = circle_zeta_prime_oracle(spec)) {
            zp["oracle"] = *oracle;
            r.passed = r.passed && std::abs(fd - *oracle) <= 1e-6;
        }
        r.passed = r.passed && std::abs(fd - laurent) <= 1e-6;
        r.json["zeta_prime_zero"] = zp;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::PoleAtZero) throw;
        r.json["zeta_prime_zero"] = {{"error", "PoleAtZero"}};
    }
    r.json["passed"] = r.passed;
    return r;
}

struct TorsionArgs {
    std::string input;
    bool kernel_removed = false;
    std::optional<double> massive_line;
    int K = 64;
};

Report cmd_torsion(const SpectrumSource& src, const TorsionArgs& a, const Common& c) {
    if (c.selftest) return selftest_torsion();
    const double tol = c.tol.value_or(1e-6);
    Report r;
    if (a.massive_line) {
        const double v = torsion::l2_term({{1, torsion::massive_line_input(*a.massive_line)}});
        const double oracle = *a.massive_line / 2.0;
        r.passed = std::abs(v - oracle) <= tol;
        r.json = {{"model", "massive_line"}, {"mass", *a.massive_line}, {"l2_term", v}, {"oracle", oracle},
                  {"passed", r.passed}};
        return r;
    }
    torsion::TorsionInput in;
    std::optional<double> oracle;
    if (!a.input.empty()) {
        if (has_source(src)) throw Error(ErrorCode::InputError, "--input excludes --circle/--torus/--spectrum");
        in = io::torsion_input_from_json(io::read_json_file(a.input));
        if (a.kernel_removed) in.kernel_removed_override = true;
    } else if (!src.circle.empty()) {
        SpectrumSource fixed = src;
        if (!fixed.K) fixed.K = a.K;
        const auto spec = load_spectrum(fixed, 1.0);
        const auto& m = std::get<spectra::CircleModel>(spec.cutoff().components.front().shape);
        in = torsion::circle_input(m.length, m.twist, spec.cutoff().components.front().cutoff, a.kernel_removed);
        oracle = m.twist == 0.0 ? std::log(m.length) : std::log(2.0 * std::sin(kPi * m.twist));
    } else {
        throw Error(ErrorCode::InputError, "torsion needs --circle, --input or --massive-line");
    }
    const auto result = torsion::analytic_torsion(in);
    r.json = io::to_json(result);
    r.json["dim"] = in.dim;
    r.json["lambda"] = in.lambda;
    if (oracle) {
        r.json["oracle"] = *oracle;
        r.passed = std::abs(result.log_t - *oracle) <= tol;
    }
    for (const auto& [p, v] : result.zeta_prime) {
        r.passed = r.passed && std::abs(v - result.zeta_prime_laurent.at(p)) <= tol;
    }
    r.json["passed"] = r.passed;
    return r;
}

struct DanceArgs {
    std::string budget_file;
    int n = 2;
    std::optional<double> lambda;
    double epsilon = 0.01;
    double C1 = 1.0, C2 = 1.0, C3 = 1.0, C4 = 1.0, Cn = 1.0;
    std::string form = "derived";
    std::vector<std::uint64_t> levels{10, 100, 1000, 10000, 1000000};
    double a = 0.0;
    std::optional<double> vol;
    double delta = 0.01;
};

Report cmd_dance(const DanceArgs& a, const Common& c) {
    if (c.selftest) return selftest_dance();
    dance::ErrorBudget b;
    if (!a.budget_file.empty()) {
        b = io::budget_from_json(io::read_json_file(a.budget_file));
    } else {
        b.n = a.n;
        b.lambda = a.lambda;
        b.epsilon = a.epsilon;
        b.C1 = a.C1;
        b.C2 = a.C2;
        b.C3 = a.C3;
        b.C4 = a.C4;
        b.Cn = a.Cn;
        b.form = dance::e1_form_from_string(a.form);
        b.validate();
    }
    const auto req = dance::required_lambda(b, a.delta);
    // lambda_min ignores epsilon; e0 carries the factor (1 - epsilon).
    if (!b.lambda) b.lambda = req.lambda_min / (1.0 - b.epsilon);
    const auto choice = dance::optimize_beta_unchecked(b);
    b.beta = choice.beta_star;
    const auto& rep = choice.report;
    Report r;
    r.json = {{"budget", io::to_json(b)},
              {"required_lambda", {{"delta", a.delta}, {"beta_max", req.beta_max}, {"lambda_min", req.lambda_min}}},
              {"optimize", {{"beta_star", choice.beta_star}, {"beta_grid", choice.beta_grid}}},
              {"exponents", {{"e0", rep.e0}, {"e1", rep.e1}, {"e2", rep.e2}, {"min_exponent", rep.min_exponent},
                             {"feasible", rep.feasible}, {"lambda_required", rep.lambda_required}}}};
    r.passed = rep.feasible;
    if (rep.feasible) {
        const auto table = dance::budget_table(b, a.a, a.levels, a.vol);
        Json rows = Json::array();
        for (const auto& row : table.rows) {
            rows.push_back({{"N", row.N}, {"T", row.T}, {"R", row.R}, {"vol", row.vol}, {"bound_E0", row.bound_e0},
                            {"bound_E1", row.bound_e1}, {"bound_E2", row.bound_e2}, {"rhs", row.rhs}});
        }
        r.json["table"] = {{"a", table.a}, {"N1", std::isfinite(table.N1) ? Json(table.N1) : Json(nullptr)}, {"rows", rows}};
        r.csv = dance::budget_table_csv(table);
    }
    r.json["passed"] = r.passed;
    return r;
}

// ---------------------------------------------------------------------------
// Config expansion: {"command": "torsion", "circle": "L=1", "alpha": 0.25}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw Error(ErrorCode::InputError, "--config needs a path");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (path.empty()) return args;
    const Json cfg = io::read_json_file(path);
    if (!cfg.is_object() || cfg.empty()) throw Error(ErrorCode::InputError, "config must be a nonempty JSON object");
    auto given = [&](const std::string& key) {
        for (const auto& a : rest) {
            if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
        }
        return false;
    };
    std::vector<std::string> out;
    static const std::vector<std::string> kCommands{"distance", "exclusion", "heat", "zeta", "torsion", "dance"};
    const bool command_in_args =
        !rest.empty() && std::find(kCommands.begin(), kCommands.end(), rest.front()) != kCommands.end();
    if (command_in_args) {
        out.push_back(rest.front());
        rest.erase(rest.begin());
    } else if (cfg.contains("command") && cfg.at("command").is_string()) {
        out.push_back(cfg.at("command").get<std::string>());
    } else {
        throw Error(ErrorCode::InputError, "config needs a \"command\"");
    }
    for (const auto& [key, value] : cfg.items()) {
        if (key == "command" || given(key)) continue;
        auto scalar = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
        if (value.is_boolean()) {
            if (value.get<bool>()) out.push_back("--" + key);
        } else if (value.is_array()) {
            out.push_back("--" + key);
            for (const auto& v : value) out.push_back(scalar(v));
        } else {
            out.push_back("--" + key);
            out.push_back(scalar(value));
        }
    }
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "Master seed for randomized trials");
    sub->add_option("--tol", c.tol, "Assertion tolerance");
    sub->add_option("--out", c.out, "Write the report to this file");
    sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--selftest", c.selftest, "Run the module's invariant suite");
}

void add_source(CLI::App* sub, SpectrumSource& s) {
    sub->add_option("--circle", s.circle, "Circle model, e.g. L=6.2831853,alpha=0.25");
    sub->add_option("--alpha", s.alpha, "Twist of the circle model");
    sub->add_option("--torus", s.torus, "Torus model, e.g. L=1:1.5,alpha=0:0.2,p=1");
    sub->add_option("--spectrum", s.file, "Spectrum JSON file");
    sub->add_option("--K", s.K, "Mode cutoff (default: tail bound below 1e-13)");
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    Common common;
    SpectrumSource source;
    DistanceArgs distance;
    ExclusionArgs exclusion;
    GridArgs grid;
    std::vector<double> s_values{2.0};
    double split = 1.0;
    TorsionArgs tors;
    DanceArgs dnc;

    CLI::App app{"Analytic torsion toolkit"};
    app.require_subcommand(1);
    auto* c_distance = app.add_subcommand("distance", "Cartan distance and the distance lemma");
    c_distance->add_option("--matrix", distance.matrix, "Matrix rows, e.g. \"1,1;0,1\"");
    c_distance->add_option("--n", distance.n, "Dimension for random trials");
    c_distance->add_option("--trials", distance.trials, "Number of random trials");
    c_distance->add_option("--spread", distance.spread, "Log-scale spread of random rows");
    auto* c_exclusion = app.add_subcommand("exclusion", "Valuation certificate and exclusion radius");
    c_exclusion->add_option("--n", exclusion.n, "Matrix size for a random gamma");
    c_exclusion->add_option("--N", exclusion.N, "Level");
    c_exclusion->add_option("--trials", exclusion.trials, "Random real conjugators");
    c_exclusion->add_option("--gamma", exclusion.gamma, "Exact matrix rows, entries num or num/den");
    c_exclusion->add_option("--spread", exclusion.spread, "Coefficient range of a random gamma");
    auto* c_heat = app.add_subcommand("heat", "Heat traces with tail bounds and oracles");
    add_source(c_heat, source);
    c_heat->add_option("--t", grid.t, "Explicit times");
    c_heat->add_option("--tmin", grid.tmin, "Smallest time of a log grid");
    c_heat->add_option("--tmax", grid.tmax, "Largest time of a log grid");
    c_heat->add_option("--points", grid.points, "Points of the log grid");
    auto* c_zeta = app.add_subcommand("zeta", "Spectral zeta function and zeta'(0)");
    add_source(c_zeta, source);
    c_zeta->add_option("--s", s_values, "Points s");
    c_zeta->add_option("--split", split, "Mellin split point T");
    auto* c_torsion = app.add_subcommand("torsion", "Analytic torsion and the L2-term");
    add_source(c_torsion, source);
    c_torsion->add_option("--input", tors.input, "TorsionInput JSON file");
    c_torsion->add_flag("--kernel-removed", tors.kernel_removed, "Accept kernels, using kernel-free traces");
    c_torsion->add_option("--massive-line", tors.massive_line, "L2-term of the massive line with this mass");
    auto* c_dance = app.add_subcommand("dance", "Error budget optimization");
    c_dance->add_option("--budget", dnc.budget_file, "Budget JSON file");
    c_dance->add_option("--n", dnc.n, "Rank parameter");
    c_dance->add_option("--lambda", dnc.lambda, "Spectral gap (default: required lambda)");
    c_dance->add_option("--epsilon", dnc.epsilon, "Epsilon in (0, 1)");
    c_dance->add_option("--C1", dnc.C1);
    c_dance->add_option("--C2", dnc.C2);
    c_dance->add_option("--C3", dnc.C3);
    c_dance->add_option("--C4", dnc.C4);
    c_dance->add_option("--Cn", dnc.Cn);
    c_dance->add_option("--form", dnc.form, "derived, dropped-c2 or linear-cn");
    c_dance->add_option("--levels", dnc.levels, "Levels N for the table");
    c_dance->add_option("--a", dnc.a, "Log power in the theorem's right-hand side");
    c_dance->add_option("--vol", dnc.vol, "Volume (default: |SL(n, Z/N)| proxy)");
    c_dance->add_option("--delta", dnc.delta, "Margin for the required lambda");
    for (auto* sub : {c_distance, c_exclusion, c_heat, c_zeta, c_torsion, c_dance}) add_common(sub, common);

    try {
        std::vector<std::string> args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        try {
            app.parse(args);
        } catch (const CLI::CallForHelp& e) {
            out << app.help();
            return kExitOk;
        } catch (const CLI::ParseError& e) {
            err << "error: " << e.what() << "\n";
            return kExitInput;
        }

        Report report;
        std::string command;
        if (c_distance->parsed()) {
            command = "distance";
            report = cmd_distance(distance, common);
        } else if (c_exclusion->parsed()) {
            command = "exclusion";
            report = cmd_exclusion(exclusion, common);
        } else if (c_heat->parsed()) {
            command = "heat";
            report = cmd_heat(source, grid, common);
        } else if (c_zeta->parsed()) {
            command = "zeta";
            report = cmd_zeta(source, s_values, split, common);
        } else if (c_torsion->parsed()) {
            command = "torsion";
            report = cmd_torsion(source, tors, common);
        } else {
            command = "dance";
            report = cmd_dance(dnc, common);
        }
        report.json["command"] = command;
        report.json["timestamp"] = timestamp();

        std::string text;
        if (common.format == "csv") {
            if (report.csv.empty()) throw Error(ErrorCode::InputError, "no CSV output for '" + command + "'");
            text = report.csv;
        } else {
            text = report.json.dump(2) + "\n";
        }
        if (common.out.empty()) {
            out << text;
        } else {
            std::ofstream file(common.out);
            if (!file) throw Error(ErrorCode::InputError, "cannot write '" + common.out + "'");
            file << text;
        }
        if (!report.passed) err << command << ": assertion failed\n";
        return report.passed ? kExitOk : kExitAssertion;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::AssertionFailure ? kExitAssertion : kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
}

}  // namespace atorsion::cli
