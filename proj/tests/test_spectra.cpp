#include "atorsion/error.hpp"
#include "atorsion/spectra.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

using namespace atorsion;
using namespace atorsion::spectra;

namespace {

constexpr double kPi = std::numbers::pi;

std::map<double, std::uint64_t> as_map(const Spectrum& s) {
    std::map<double, std::uint64_t> out;
    for (const auto& e : s.entries()) out[e.eigenvalue] = e.multiplicity;
    return out;
}

// Brute-force eigenvalues of the truncated circle.
std::vector<double> circle_by_enumeration(double L, double a, int K) {
    std::vector<double> out;
    for (int k = -K; k <= K; ++k) out.push_back(std::pow(2 * kPi * (k + a) / L, 2));
    return out;
}

}  // namespace

TEST_CASE("circle_spectrum examples") {
    const auto s = circle_spectrum(2 * kPi, 0.0, 1);
    CHECK(as_map(s) == std::map<double, std::uint64_t>{{0.0, 1}, {1.0, 2}});
    CHECK(s.kernel_dim() == 1);
    CHECK(s.gap() == 1.0);
    CHECK(s.dim() == 1);

    const auto half = circle_spectrum(2 * kPi, 0.5, 0);
    CHECK(as_map(half) == std::map<double, std::uint64_t>{{0.25, 1}});
    CHECK(half.kernel_dim() == 0);

    const auto quarter = circle_spectrum(2 * kPi, 0.25, 1);
    const auto brute = circle_by_enumeration(2 * kPi, 0.25, 1);
    REQUIRE(quarter.entries().size() == 3);
    std::vector<double> got;
    for (const auto& e : quarter.entries()) got.push_back(e.eigenvalue);
    std::vector<double> want = brute;
    std::sort(want.begin(), want.end());
    for (std::size_t i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
    CHECK(got[0] == doctest::Approx(1.0 / 16));
    CHECK(got[1] == doctest::Approx(9.0 / 16));
    CHECK(got[2] == doctest::Approx(25.0 / 16));
}

TEST_CASE("torus_form_spectrum examples") {
    const auto c = circle_spectrum(3.0, 0.2, 5);
    const auto t = torus_form_spectrum({3.0}, {0.2}, 1, 5);
    REQUIRE(c.entries().size() == t.entries().size());
    for (std::size_t i = 0; i < c.entries().size(); ++i) {
        CHECK(t.entries()[i].eigenvalue == doctest::Approx(c.entries()[i].eigenvalue).epsilon(1e-14));
        CHECK(t.entries()[i].multiplicity == c.entries()[i].multiplicity);
    }
    const auto p0 = torus_form_spectrum({2 * kPi, 2 * kPi}, {0, 0}, 0, 1);
    const auto p1 = torus_form_spectrum({2 * kPi, 2 * kPi}, {0, 0}, 1, 1);
    CHECK(as_map(p0)[1.0] == 4);
    CHECK(as_map(p1)[1.0] == 8);
    CHECK(as_map(p0)[2.0] == 4);
    CHECK(p0.kernel_dim() == 1);
    CHECK(p1.kernel_dim() == 2);
    CHECK(p0.dim() == 2);
}

TEST_CASE("heat_trace examples") {
    const Spectrum one({{1.0, 1}}, 1);
    CHECK(heat_trace(one, 2.0).value == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(heat_trace(one, 2.0).tail_bound == 0.0);

    const auto circle = circle_spectrum(2 * kPi, 0.0, 200);
    const auto h = heat_trace(circle, 1.0);
    CHECK(std::abs(h.value - heat_trace_poisson_circle(2 * kPi, 0.0, 1.0)) <= 1e-12);

    const auto small = circle_spectrum(2 * kPi, 0.3, 4);
    const auto tiny = heat_trace(small, 1e-9);
    CHECK(tiny.value == doctest::Approx(9.0).epsilon(1e-6));
    CHECK(tiny.tail_bound > 1.0);

    try {
        heat_trace(one, 0.0);
        FAIL("expected NonpositiveTime");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonpositiveTime);
    }
}

TEST_CASE("Poisson circle examples") {
    const double L = 2 * kPi;
    for (double t : {0.01, 0.05}) {
        const double lead = L / std::sqrt(4 * kPi * t);
        CHECK(std::abs(heat_trace_poisson_circle(L, 0.0, t) - lead) <= 3 * std::exp(-L * L / (8 * t)));
    }
    for (double a : {0.1, 0.27, 0.4}) {
        for (double t : {0.01, 0.3, 4.0}) {
            CHECK(heat_trace_poisson_circle(5.0, a, t) ==
                  doctest::Approx(heat_trace_poisson_circle(5.0, 1 - a, t)).epsilon(1e-14));
        }
    }
}

TEST_CASE("decay_envelope_check examples") {
    const Spectrum one({{0.7, 1}}, 1);
    const auto single = decay_envelope_check(one, {1, 2, 3.5, 10});
    CHECK(single.passed);
    for (double m : single.margins) CHECK(std::abs(m) <= 1e-15);

    const auto env = decay_envelope_check(circle_spectrum(2 * kPi, 0.5, 100), {1, 2, 5, 10, 50});
    CHECK(env.passed);
    CHECK(env.min_margin >= -1e-12);

    try {
        decay_envelope_check(circle_spectrum(2 * kPi, 0.0, 3), {1, 2});
        FAIL("expected HasKernel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::HasKernel);
    }
}

TEST_CASE("small_t_expansion examples") {
    const auto c = small_t_expansion(circle_spectrum(2 * kPi, 0.0, 10));
    REQUIRE(c.terms().size() == 1);
    CHECK(c.terms()[0].alpha == -0.5);
    CHECK(c.terms()[0].coeff == doctest::Approx(std::sqrt(kPi)).epsilon(1e-15));
    CHECK(std::isinf(c.remainder_exponent()));

    const auto t = small_t_expansion(torus_form_spectrum({1, 1}, {0, 0}, 0, 3));
    REQUIRE(t.terms().size() == 1);
    CHECK(t.terms()[0].alpha == -1.0);
    CHECK(t.terms()[0].coeff == doctest::Approx(1 / (4 * kPi)).epsilon(1e-15));

    const auto t1 = small_t_expansion(torus_form_spectrum({1, 2, 3}, {0, 0.1, 0}, 2, 1));
    CHECK(t1.terms()[0].coeff == doctest::Approx(3 * 6 / std::pow(4 * kPi, 1.5)).epsilon(1e-14));

    const auto spec = circle_spectrum(2 * kPi, 0.0, choose_circle_cutoff(2 * kPi, 0.0, 0.01));
    CHECK(std::abs(heat_trace(spec, 0.01).value - c.evaluate(0.01)) <= 1e-10);

    try {
        small_t_expansion(Spectrum({{1.0, 1}}, 1));
        FAIL("expected UnsupportedModel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedModel);
    }
}

TEST_CASE("disjoint union keeps the models") {
    const auto a = circle_spectrum(2.0, 0.3, 10);
    const auto b = circle_spectrum(3.0, 0.1, 10);
    const auto u = disjoint_union(a, b);
    CHECK(u.cutoff().kind == "union");
    CHECK(u.total_multiplicity() == a.total_multiplicity() + b.total_multiplicity());
    CHECK(model_trace(u, 0.2) == doctest::Approx(model_trace(a, 0.2) + model_trace(b, 0.2)).epsilon(1e-14));
    CHECK(model_gap(u) == doctest::Approx(std::min(model_gap(a), model_gap(b))));
}

TEST_CASE("property: Poisson oracle matches the direct sum (K = 500)") {
    testing::for_all(
        "poisson", 31, 300,
        [](std::mt19937_64& rng) {
            std::uniform_real_distribution<double> L(0.5, 12.0), a(0.0, 1.0), logt(std::log(1e-3), std::log(10.0));
            return std::array<double, 3>{L(rng), a(rng), std::exp(logt(rng))};
        },
        [](const std::array<double, 3>& p) -> std::optional<std::string> {
            const auto spec = circle_spectrum(p[0], p[1], 500);
            const double direct = heat_trace(spec, p[2]).value;
            const double poisson = heat_trace_poisson_circle(p[0], p[1], p[2]);
            // The Poisson side cancels about 12 sqrt(t) / L terms of size
            // L / sqrt(4 pi t) down to the trace.
            const double terms = 1.0 + 12.0 * std::sqrt(p[2]) / p[0];
            const double floor = 64 * 2.2e-16 * terms * p[0] / std::sqrt(4 * kPi * p[2]);
            if (std::abs(direct - poisson) > 1e-10 * poisson + floor) return testing::describe(direct, poisson);
            return std::nullopt;
        });
}

TEST_CASE("property: tail bound covers enlarging the cutoff") {
    testing::for_all(
        "tail", 32, 100,
        [](std::mt19937_64& rng) {
            std::uniform_real_distribution<double> L(0.5, 12.0), a(0.0, 1.0), logt(std::log(1e-3), std::log(2.0));
            return std::tuple<double, double, double, int>{L(rng), a(rng), std::exp(logt(rng)), 1 + rng() % 15};
        },
        [](const std::tuple<double, double, double, int>& p) -> std::optional<std::string> {
            const auto [L, a, t, K] = p;
            const auto small = heat_trace(circle_spectrum(L, a, K), t);
            const double big = heat_trace(circle_spectrum(L, a, 8 * K + 400), t).value;
            if (big - small.value > small.tail_bound || big < small.value)
                return testing::describe(big - small.value, small.tail_bound);
            return std::nullopt;
        });
}

TEST_CASE("property: heat trace is decreasing and log-convex") {
    testing::for_all(
        "log-convex", 33, 100,
        [](std::mt19937_64& rng) {
            if (rng() % 2) {
                std::uniform_real_distribution<double> L(0.5, 8.0), a(0.0, 1.0);
                return circle_spectrum(L(rng), a(rng), 60);
            }
            std::uniform_real_distribution<double> lam(0.0, 20.0);
            std::vector<SpectrumEntry> entries;
            for (int i = 0; i < 1 + static_cast<int>(rng() % 12); ++i) entries.push_back({lam(rng), 1 + rng() % 4});
            return Spectrum(entries, 1);
        },
        [](const Spectrum& spec) -> std::optional<std::string> {
            std::vector<double> logs;
            for (double t = 0.05; t < 5.0; t += 0.05) logs.push_back(std::log(heat_trace(spec, t).value));
            for (std::size_t i = 1; i + 1 < logs.size(); ++i) {
                if (logs[i] > logs[i - 1] + 1e-15) return std::string("not decreasing");
                if (logs[i + 1] - 2 * logs[i] + logs[i - 1] < -1e-10) return std::string("not log-convex");
            }
            return std::nullopt;
        });
}

TEST_CASE("property: decay envelope on kernel-free spectra") {
    testing::for_all(
        "envelope", 34, 200,
        [](std::mt19937_64& rng) {
            std::uniform_real_distribution<double> L(0.5, 8.0), a(0.01, 0.99);
            if (rng() % 2) return circle_spectrum(L(rng), a(rng), 40);
            return torus_form_spectrum({L(rng), L(rng)}, {a(rng), a(rng)}, static_cast<int>(rng() % 3), 8);
        },
        [](const Spectrum& spec) -> std::optional<std::string> {
            std::vector<double> grid;
            for (double t = 1.0; t <= 50.0; t += 0.5) grid.push_back(t);
            const auto env = decay_envelope_check(spec, grid);
            if (!env.passed || env.min_margin < -1e-12) return "margin " + std::to_string(env.min_margin);
            return std::nullopt;
        });
}

TEST_CASE("property: torus trace is the product of circle traces") {
    testing::for_all(
        "torus product", 35, 100,
        [](std::mt19937_64& rng) {
            std::uniform_real_distribution<double> L(0.5, 5.0), a(0.0, 1.0), t(0.05, 3.0);
            const int d = 2 + static_cast<int>(rng() % 2);
            std::vector<double> ls, as;
            for (int i = 0; i < d; ++i) {
                ls.push_back(L(rng));
                as.push_back(rng() % 3 ? a(rng) : 0.0);
            }
            return std::tuple<std::vector<double>, std::vector<double>, int, double>{ls, as, static_cast<int>(rng() % (d + 1)), t(rng)};
        },
        [](const std::tuple<std::vector<double>, std::vector<double>, int, double>& c) -> std::optional<std::string> {
            const auto& [ls, as, p, t] = c;
            const int d = static_cast<int>(ls.size());
            const auto spec = torus_form_spectrum(ls, as, p, 6);
            double model = static_cast<double>(binomial(d, p));
            double truncated = model;
            double lead = model;
            for (int i = 0; i < d; ++i) {
                model *= heat_trace_poisson_circle(ls[i], as[i], t);
                truncated *= heat_trace(circle_spectrum(ls[i], as[i], 6), t).value;
                lead *= std::max(1.0, ls[i] / std::sqrt(4 * kPi * t));
            }
            if (std::abs(model_trace(spec, t) - model) > 1e-10 * model + 1e-15 * lead)
                return testing::describe(model_trace(spec, t), model);
            if (std::abs(heat_trace(spec, t).value - truncated) > 1e-10 * truncated)
                return testing::describe(heat_trace(spec, t).value, truncated);
            return std::nullopt;
        });
}

TEST_CASE("cutoff chooser meets the tolerance") {
    for (double t : {1e-3, 1e-2, 0.5}) {
        const int K = choose_circle_cutoff(6.0, 0.3, t);
        CHECK(circle_tail_bound(6.0, 0.3, K, t) < 1e-13);
        if (K > 0) CHECK(circle_tail_bound(6.0, 0.3, K - 1, t) >= 1e-13);
    }
}
