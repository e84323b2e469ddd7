#include "atorsion/congruence.hpp"
#include "atorsion/error.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace atorsion;
using namespace atorsion::congruence;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::AssertionFailure;
}

std::uint64_t brute_phi(std::uint64_t n) {
    std::uint64_t count = 0;
    for (std::uint64_t k = 1; k <= n; ++k) count += std::gcd(k, n) == 1;
    return count;
}

}  // namespace

TEST_CASE("valuation examples") {
    CHECK(valuation(Rational(12), 2).value() == 2);
    CHECK(valuation(Rational(3, 4), 2).value() == -2);
    CHECK(valuation(Rational(0), 5).is_infinite());
    CHECK(code_of([] { valuation(Rational(12), 4); }) == ErrorCode::NotPrime);
}

TEST_CASE("in_principal_congruence examples") {
    CHECK(in_principal_congruence(ExactMatrix::identity(2), 12));
    CHECK(in_principal_congruence(ExactMatrix::from_integers({{1, 4}, {0, 1}}), 4));
    CHECK_FALSE(in_principal_congruence(ExactMatrix::from_integers({{1, 2}, {0, 1}}), 4));
    // Denominators prime to N are allowed, others are not.
    CHECK(in_principal_congruence(ExactMatrix::from_strings({{"1", "10/3"}, {"0", "1"}}), 10));
    CHECK_FALSE(in_principal_congruence(ExactMatrix::from_strings({{"1", "10/2"}, {"0", "1"}}), 10));
}

TEST_CASE("char_poly_shifted examples") {
    for (const auto& a : char_poly_shifted(ExactMatrix::identity(3))) CHECK(a == 0);
    const auto shear = char_poly_shifted(ExactMatrix::from_integers({{1, 1}, {0, 1}}));
    CHECK(shear[0] == 0);
    CHECK(shear[1] == 0);
    const auto sym = char_poly_shifted(ExactMatrix::from_integers({{5, 4}, {4, 5}}));
    CHECK(sym[1] == -8);
    CHECK(sym[0] == 0);
}

TEST_CASE("is_unipotent examples") {
    CHECK(is_unipotent(ExactMatrix::identity(2)));
    CHECK(is_unipotent(ExactMatrix::from_integers({{1, 7}, {0, 1}})));
    CHECK_FALSE(is_unipotent(ExactMatrix::from_strings({{"2", "0"}, {"0", "1/2"}})));
}

TEST_CASE("valuation_certificate examples") {
    const auto id = valuation_certificate(ExactMatrix::identity(2), 9);
    CHECK(id.passed);
    for (const auto& row : id.rows) CHECK(row.val.is_infinite());

    const auto c = valuation_certificate(ExactMatrix::from_integers({{5, 4}, {4, 5}}), 4);
    CHECK(c.passed);
    REQUIRE(c.rows.size() == 2);
    CHECK(c.rows[0].k == 0);
    CHECK(c.rows[0].val.is_infinite());
    CHECK(c.rows[0].required == 4);
    CHECK(c.rows[1].val.value() == 3);
    CHECK(c.rows[1].required == 2);

    CHECK(code_of([] { valuation_certificate(ExactMatrix::from_integers({{1, 2}, {0, 1}}), 4); }) ==
          ErrorCode::NotCongruent);
}

TEST_CASE("exclusion_radius examples") {
    CHECK(exclusion_radius(2, 10).radius == 0.0);
    CHECK(exclusion_radius(2, 19).radius == 0.0);
    const auto b = exclusion_radius(2, 1000);
    CHECK(b.c_n == Rational(1, 8));
    CHECK(b.radius == doctest::Approx(std::log(125 - std::sqrt(2.0)) - 0.5 * std::log(2.0)).epsilon(1e-14));
    CHECK(b.radius == doctest::Approx(4.47).epsilon(1e-3));
    CHECK(exclusion_constant(3) == Rational(1, 48));
    CHECK(exclusion_constant(4) == Rational(1, 384));
}

TEST_CASE("exclusion threshold is the least level meeting the reporting constant") {
    for (int n : {2, 3, 4}) {
        const auto n0 = exclusion_threshold(n);
        CHECK(exclusion_radius_value(n, n0) >= 0.25 * std::log(static_cast<double>(n0)));
        CHECK(exclusion_radius_value(n, n0 - 1) < 0.25 * std::log(static_cast<double>(n0 - 1)));
        for (std::uint64_t N = n0; N < n0 + 20000; N += 37)
            CHECK(exclusion_radius_value(n, N) >= 0.25 * std::log(static_cast<double>(N)));
        for (double N = n0; N < 1e18; N *= 1.7) CHECK(exclusion_radius_value(n, N) >= 0.25 * std::log(N));
    }
}

TEST_CASE("radius over log N tends to 1") {
    for (int n : {2, 3, 4}) {
        const double N = 1e40;
        const double ratio = exclusion_radius_value(n, N) / std::log(N);
        CHECK(ratio >= 0.9);
        CHECK(ratio <= 1.1);
        double prev = 0.0;
        for (double M = 1e6; M <= 1e40; M *= 10) {
            const double r = exclusion_radius_value(n, M) / std::log(M);
            CHECK(r > prev);
            prev = r;
        }
    }
}

TEST_CASE("verify_exclusion") {
    const auto gamma = ExactMatrix::from_integers({{21, 10}, {-40, -19}});  // det 1, trace 2 -> unipotent
    CHECK(code_of([&] { verify_exclusion(gamma, 10, 10, 1); }) == ErrorCode::IsUnipotent);
    const auto g = ExactMatrix::from_integers({{1, 10}, {10, 101}});
    const auto single = verify_exclusion(g, 10, 1, 5);
    CHECK(single.passed);
    CHECK(single.min_distance >= single.bound);
    const auto many = verify_exclusion(g, 10, 1000, 5);
    CHECK(many.passed);
    CHECK(code_of([] { verify_exclusion(ExactMatrix::from_integers({{11, 10}, {10, 11}}), 10, 5, 1); }) ==
          ErrorCode::DetNotUnit);
    CHECK(code_of([] { verify_exclusion(ExactMatrix::from_integers({{1, 5}, {0, 1}}), 10, 5, 1); }) ==
          ErrorCode::NotCongruent);
}

TEST_CASE("counting") {
    CHECK(euler_phi(1) == 1);
    CHECK(euler_phi(12) == 4);
    for (std::uint64_t n = 1; n < 300; ++n) CHECK(euler_phi(n) == brute_phi(n));
    CHECK(sl_count(2, 4).formula == 48);
    CHECK(sl_count(2, 3).formula == 24);
    for (int n : {2, 3}) {
        for (std::uint64_t N = 2; N <= 6; ++N) {
            const auto c = sl_count(n, N);
            REQUIRE(c.enumerated.has_value());
            CHECK(*c.enumerated == c.formula);
        }
    }
    CHECK(code_of([] { sl_count_enumerate(4, 7); }) == ErrorCode::BudgetExceeded);
    CHECK_FALSE(sl_count(4, 7).enumerated.has_value());
    CHECK(gl_sl_torsion_scale(12, 2.5) == doctest::Approx(10.0));
    CHECK(gl_sl_torsion_scale(7, 0.0) == 0.0);
    CHECK(gl_sl_torsion_scale(2, 1.25) == 1.25);
}

TEST_CASE("property: certificates pass for random congruent gamma") {
    struct Case {
        ExactMatrix gamma;
        std::uint64_t N;
    };
    testing::for_all(
        "certificate", 21, 1000,
        [](std::mt19937_64& rng) {
            const std::size_t n = 2 + rng() % 3;
            const std::uint64_t N = 3 + rng() % 998;
            return Case{random_congruent(n, N, 6, rng() % 2 ? 9 : 1, rng), N};
        },
        [](const Case& c) -> std::optional<std::string> {
            const auto cert = valuation_certificate(c.gamma, c.N);
            if (!cert.passed) return "certificate failed at N = " + std::to_string(c.N);
            return std::nullopt;
        });
}

TEST_CASE("property: char poly agrees with principal-minor expansion") {
    testing::for_all(
        "char poly", 22, 300,
        [](std::mt19937_64& rng) { return random_congruent(2 + rng() % 3, 2 + rng() % 30, 5, 7, rng); },
        [](const ExactMatrix& g) -> std::optional<std::string> {
            if (char_poly_shifted(g) != testing::char_poly_by_minors(g)) return std::string("mismatch");
            return std::nullopt;
        });
}

TEST_CASE("property: char poly is conjugation invariant") {
    struct Case {
        ExactMatrix g, x;
    };
    testing::for_all(
        "conjugation", 23, 300,
        [](std::mt19937_64& rng) {
            const std::size_t n = 2 + rng() % 3;
            ExactMatrix x = random_congruent(n, 1 + rng() % 5, 4, 5, rng);
            while (x.determinant() == 0) x = random_congruent(n, 1 + rng() % 5, 4, 5, rng);
            return Case{random_congruent(n, 2 + rng() % 30, 5, 7, rng), x};
        },
        [](const Case& c) -> std::optional<std::string> {
            // x g x^-1 computed as the solution y of y x = x g.
            const std::size_t n = c.g.dim();
            const ExactMatrix xg = c.x * c.g;
            // Invert x by Gauss-Jordan over Q.
            ExactMatrix a = c.x, inv = ExactMatrix::identity(n);
            for (std::size_t col = 0; col < n; ++col) {
                std::size_t piv = col;
                while (a(piv, col) == 0) ++piv;
                for (std::size_t j = 0; j < n; ++j) {
                    std::swap(a(piv, j), a(col, j));
                    std::swap(inv(piv, j), inv(col, j));
                }
                const Rational p = a(col, col);
                for (std::size_t j = 0; j < n; ++j) {
                    a(col, j) /= p;
                    inv(col, j) /= p;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == col || a(i, col) == 0) continue;
                    const Rational f = a(i, col);
                    for (std::size_t j = 0; j < n; ++j) {
                        a(i, j) -= f * a(col, j);
                        inv(i, j) -= f * inv(col, j);
                    }
                }
            }
            if (!(c.x * inv == ExactMatrix::identity(n))) return std::string("bad inverse");
            if (char_poly_shifted(xg * inv) != char_poly_shifted(c.g)) return std::string("not invariant");
            return std::nullopt;
        });
}

TEST_CASE("property: unipotent iff the shifted char poly vanishes") {
    testing::for_all(
        "unipotent", 24, 400,
        [](std::mt19937_64& rng) {
            const std::size_t n = 2 + rng() % 3;
            if (rng() % 2) {
                // Strictly upper triangular perturbations are unipotent.
                ExactMatrix g = ExactMatrix::identity(n);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = i + 1; j < n; ++j) g(i, j) = static_cast<long>(rng() % 11) - 5;
                return g;
            }
            return random_congruent(n, 2 + rng() % 10, 3, 1, rng);
        },
        [](const ExactMatrix& g) -> std::optional<std::string> {
            bool zero = true;
            for (const auto& a : char_poly_shifted(g)) zero = zero && a == 0;
            if (zero != is_unipotent(g)) return std::string("disagreement");
            return std::nullopt;
        });
}

TEST_CASE("property: non-unipotent elements have a large coefficient and entry") {
    struct Case {
        ExactMatrix g;
        std::uint64_t N;
    };
    testing::for_all(
        "large coefficient", 25, 300,
        [](std::mt19937_64& rng) {
            const std::size_t n = 2 + rng() % 2;
            const std::uint64_t N = 3 + rng() % 60;
            return Case{random_congruent_sl(n, N, 3, rng), N};
        },
        [](const Case& c) -> std::optional<std::string> {
            const std::size_t n = c.g.dim();
            if (c.g.determinant() != 1) return std::string("det != 1");
            const auto a = char_poly_shifted(c.g);
            bool big = false;
            for (std::size_t k = 0; k < n; ++k) {
                mpz_class bound;
                mpz_ui_pow_ui(bound.get_mpz_t(), c.N, n - k);
                big = big || (a[k] != 0 && abs(a[k]) >= bound);
            }
            if (!big) return std::string("no coefficient reaches N^(n-k)");
            const Rational m = (c.g - ExactMatrix::identity(n)).max_abs_entry();
            if (m < exclusion_constant(static_cast<int>(n)) * Rational(static_cast<long>(c.N)))
                return std::string("max entry below c_n N");
            return std::nullopt;
        });
}

TEST_CASE("property: random SL elements are excluded from the ball") {
    struct Case {
        ExactMatrix g;
        std::uint64_t N;
        std::uint64_t seed;
    };
    testing::for_all(
        "exclusion", 26, 40,
        [](std::mt19937_64& rng) {
            const std::size_t n = 2 + rng() % 2;
            const std::uint64_t N = 50 + rng() % 500;
            return Case{random_congruent_sl(n, N, 2, rng), N, rng()};
        },
        [](const Case& c) -> std::optional<std::string> {
            const auto rep = verify_exclusion(c.g, c.N, 100, c.seed);
            if (!rep.passed) return testing::describe(rep.min_distance, rep.bound);
            return std::nullopt;
        });
}

TEST_CASE("property: radius is monotone in N") {
    for (int n : {2, 3, 4}) {
        for (std::uint64_t N = 3; N < 200000; N = N * 5 / 4 + 1) {
            const double r = exclusion_radius_value(n, static_cast<double>(N));
            const double r2 = exclusion_radius_value(n, 2.0 * static_cast<double>(N));
            CHECK(r2 >= r);
            if (r > 0) CHECK(r2 > r);
        }
    }
}
