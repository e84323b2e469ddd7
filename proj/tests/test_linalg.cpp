#include "atorsion/error.hpp"
#include "atorsion/linalg.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace atorsion;
using namespace atorsion::linalg;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = gauss(rng);
    Eigen::HouseholderQR<Matrix> qr(m);
    return qr.householderQ() * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("polar_log of the identity") {
    const auto p = polar_log(GroupPoint(Matrix::Identity(3, 3)));
    CHECK(p.log_symmetric.norm() < 1e-14);
    CHECK((p.orthogonal_factor - Matrix::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("polar_log of a positive diagonal") {
    const auto p = polar_log(GroupPoint(mat2(4, 0, 0, 0.25)));
    CHECK(p.log_symmetric(0, 0) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
    CHECK(p.log_symmetric(1, 1) == doctest::Approx(-std::log(4.0)).epsilon(1e-14));
    CHECK(std::abs(p.log_symmetric(0, 1)) < 1e-14);
}

TEST_CASE("shear: singular values and reconstruction") {
    const Matrix g = mat2(1, 1, 0, 1);
    const auto p = polar_log(GroupPoint(g));
    const auto [s1, s2] = testing::singular_values_2x2(1, 1, 0, 1);
    CHECK(p.singular_values(0) == doctest::Approx(s1).epsilon(1e-13));
    CHECK(p.singular_values(1) == doctest::Approx(s2).epsilon(1e-13));
    CHECK(s1 == doctest::Approx(std::sqrt((3 + std::sqrt(5.0)) / 2)).epsilon(1e-14));
    CHECK((p.orthogonal_factor * symmetric_exp(p.log_symmetric) - g).norm() <= 1e-10);
    CHECK(std::abs(p.singular_values.array().log().sum()) < 1e-9);
}

TEST_CASE("cartan_distance examples") {
    CHECK(cartan_distance(GroupPoint(Matrix::Identity(2, 2))) == 0.0);
    CHECK(cartan_distance(GroupPoint(mat2(M_E, 0, 0, 1 / M_E))) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    const double phi = (1 + std::sqrt(5.0)) / 2;
    const auto [s1, s2] = testing::singular_values_2x2(1, 1, 0, 1);
    const double oracle = std::hypot(std::log(s1), std::log(s2));
    const double got = cartan_distance(GroupPoint(mat2(1, 1, 0, 1)));
    CHECK(got == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(got == doctest::Approx(std::sqrt(2.0) * std::log(phi)).epsilon(1e-13));
    CHECK(got == doctest::Approx(0.6805).epsilon(1e-4));
}

TEST_CASE("norms") {
    CHECK(operator_norm(Matrix::Identity(2, 2)) == doctest::Approx(1.0));
    CHECK(frobenius_norm(Matrix::Identity(2, 2)) == doctest::Approx(std::sqrt(2.0)));
    CHECK(operator_norm(mat2(3, 0, 0, 1.0 / 3)) == doctest::Approx(3.0));
    CHECK(operator_norm(mat2(0, 2, 0, 0)) == doctest::Approx(2.0));
    CHECK(frobenius_norm(mat2(0, 2, 0, 0)) == doctest::Approx(2.0));
}

TEST_CASE("check_distance_lemma examples") {
    const auto id = check_distance_lemma(GroupPoint(Matrix::Identity(2, 2)));
    CHECK(id.r == 0.0);
    CHECK(id.log_opnorm == doctest::Approx(0.0));
    CHECK(id.margin_op == doctest::Approx(0.0));
    // The uncorrected Frobenius form fails here: r = 0 < log sqrt 2.
    CHECK(id.r < id.log_frobnorm);
    CHECK(id.margin_frob == doctest::Approx(0.0));

    const auto d = check_distance_lemma(GroupPoint(mat2(std::exp(2.0), 0, 0, std::exp(-2.0))));
    CHECK(d.r == doctest::Approx(2 * std::sqrt(2.0)));
    CHECK(d.log_opnorm == doctest::Approx(2.0));
    CHECK(d.margin_op == doctest::Approx(2 * std::sqrt(2.0) - 2));
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(GroupPoint(mat2(2, 0, 0, 1)), Error);
    try {
        GroupPoint(mat2(2, 0, 0, 1));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DetNotUnit);
    }
    try {
        singular_values(mat2(1, 1, 1, 1));
        FAIL("expected SingularMatrix");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularMatrix);
    }
}

TEST_CASE("property: distance lemma, both corrected forms") {
    testing::for_all(
        "distance lemma", 11, 20000,
        [](std::mt19937_64& rng) { return random_group_point(2 + rng() % 4, 2.5, rng); },
        [](const GroupPoint& g) -> std::optional<std::string> {
            const auto c = check_distance_lemma(g);
            if (c.margin_op < -1e-9) return "margin_op " + std::to_string(c.margin_op);
            if (c.margin_frob < -1e-9) return "margin_frob " + std::to_string(c.margin_frob);
            return std::nullopt;
        });
}

TEST_CASE("property: symmetry under inverse and transpose") {
    testing::for_all(
        "symmetry", 12, 2000,
        [](std::mt19937_64& rng) { return random_group_point(2 + rng() % 4, 2.0, rng); },
        [](const GroupPoint& g) -> std::optional<std::string> {
            const double r = cartan_distance(g);
            const double inv = cartan_distance_normalized(g.entries().inverse());
            const double tr = cartan_distance_normalized(g.entries().transpose());
            if (std::abs(inv - r) > 1e-9) return testing::describe(inv, r);
            if (std::abs(tr - r) > 1e-9) return testing::describe(tr, r);
            return std::nullopt;
        });
}

TEST_CASE("property: bi-K-invariance") {
    struct Case {
        GroupPoint g;
        Matrix k1, k2;
    };
    testing::for_all(
        "bi-K", 13, 2000,
        [](std::mt19937_64& rng) {
            const std::size_t n = 2 + rng() % 4;
            auto g = random_group_point(n, 2.0, rng);
            return Case{g, random_orthogonal(n, rng), random_orthogonal(n, rng)};
        },
        [](const Case& c) -> std::optional<std::string> {
            const double moved = cartan_distance_normalized(c.k1 * c.g.entries() * c.k2);
            const double r = cartan_distance(c.g);
            if (std::abs(moved - r) > 1e-8) return testing::describe(moved, r);
            return std::nullopt;
        });
}

TEST_CASE("property: distance of exp(X) is the Frobenius norm of X") {
    testing::for_all(
        "exp", 14, 2000,
        [](std::mt19937_64& rng) {
            const std::size_t n = 2 + rng() % 4;
            std::normal_distribution<double> gauss(0.0, 1.5);
            Matrix x(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i; j < n; ++j) x(i, j) = x(j, i) = gauss(rng);
            x -= (x.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
            return x;
        },
        [](const Matrix& x) -> std::optional<std::string> {
            const double r = cartan_distance_normalized(symmetric_exp(x));
            if (std::abs(r - x.norm()) > 1e-8) return testing::describe(r, x.norm());
            return std::nullopt;
        });
}

TEST_CASE("property: singular values agree with the 2x2 closed form") {
    testing::for_all(
        "svd 2x2", 15, 2000, [](std::mt19937_64& rng) { return random_group_point(2, 3.0, rng); },
        [](const GroupPoint& g) -> std::optional<std::string> {
            const Matrix& m = g.entries();
            const auto [s1, s2] = testing::singular_values_2x2(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
            const Vector sv = singular_values(m);
            if (std::abs(sv(0) - s1) > 1e-10 * s1) return testing::describe(sv(0), s1);
            if (std::abs(sv(1) - s2) > 1e-8 * s2) return testing::describe(sv(1), s2);
            return std::nullopt;
        });
}
