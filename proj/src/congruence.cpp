#include "atorsion/congruence.hpp"

#include "atorsion/error.hpp"
#include "atorsion/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace atorsion::congruence {

// ---------------------------------------------------------------------------
// ExactMatrix

ExactMatrix::ExactMatrix(std::size_t n) : n_(n), data_(n * n) {
    if (n < 1) throw Error(ErrorCode::InputError, "ExactMatrix dimension must be positive");
}

ExactMatrix::ExactMatrix(std::size_t n, std::vector<Rational> row_major)
    : n_(n), data_(std::move(row_major)) {
    if (n < 1 || data_.size() != n * n) {
        throw Error(ErrorCode::InputError, "ExactMatrix: entry count does not match n*n");
    }
    for (auto& q : data_) q.canonicalize();
}

ExactMatrix ExactMatrix::identity(std::size_t n) {
    ExactMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

ExactMatrix ExactMatrix::from_integers(const std::vector<std::vector<long>>& rows) {
    const std::size_t n = rows.size();
    ExactMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw Error(ErrorCode::InputError, "matrix is not square");
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

ExactMatrix ExactMatrix::from_strings(const std::vector<std::vector<std::string>>& rows) {
    const std::size_t n = rows.size();
    ExactMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw Error(ErrorCode::InputError, "matrix is not square");
        for (std::size_t j = 0; j < n; ++j) {
            Rational q;
            if (q.set_str(rows[i][j], 10) != 0) {
                throw Error(ErrorCode::InputError, "not a rational: '" + rows[i][j] + "'");
            }
            if (q.get_den() == 0) throw Error(ErrorCode::InputError, "zero denominator");
            q.canonicalize();
            m(i, j) = q;
        }
    }
    return m;
}

ExactMatrix ExactMatrix::operator+(const ExactMatrix& o) const {
    ExactMatrix r(n_);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + o.data_[i];
    return r;
}

ExactMatrix ExactMatrix::operator-(const ExactMatrix& o) const {
    ExactMatrix r(n_);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - o.data_[i];
    return r;
}

ExactMatrix ExactMatrix::operator*(const ExactMatrix& o) const {
    ExactMatrix r(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = 0; k < n_; ++k) {
            if ((*this)(i, k) == 0) continue;
            for (std::size_t j = 0; j < n_; ++j) r(i, j) += (*this)(i, k) * o(k, j);
        }
    }
    return r;
}

bool ExactMatrix::operator==(const ExactMatrix& o) const { return n_ == o.n_ && data_ == o.data_; }

Rational ExactMatrix::trace() const {
    Rational t = 0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

Rational ExactMatrix::determinant() const {
    std::vector<Rational> a = data_;
    Rational det = 1;
    for (std::size_t c = 0; c < n_; ++c) {
        std::size_t pivot = c;
        while (pivot < n_ && a[pivot * n_ + c] == 0) ++pivot;
        if (pivot == n_) return 0;
        if (pivot != c) {
            for (std::size_t j = 0; j < n_; ++j) std::swap(a[pivot * n_ + j], a[c * n_ + j]);
            det = -det;
        }
        const Rational piv = a[c * n_ + c];
        det *= piv;
        for (std::size_t r = c + 1; r < n_; ++r) {
            if (a[r * n_ + c] == 0) continue;
            const Rational f = a[r * n_ + c] / piv;
            for (std::size_t j = c; j < n_; ++j) a[r * n_ + j] -= f * a[c * n_ + j];
        }
    }
    return det;
}

bool ExactMatrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Rational& q) { return q == 0; });
}

bool ExactMatrix::is_integral() const {
    return std::all_of(data_.begin(), data_.end(), [](const Rational& q) { return q.get_den() == 1; });
}

Rational ExactMatrix::max_abs_entry() const {
    Rational m = 0;
    for (const auto& q : data_) m = std::max(m, Rational(abs(q)));
    return m;
}

linalg::Matrix ExactMatrix::to_double() const {
    linalg::Matrix m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j).get_d();
    return m;
}

std::vector<std::vector<std::string>> ExactMatrix::to_strings() const {
    std::vector<std::vector<std::string>> rows(n_, std::vector<std::string>(n_));
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) rows[i][j] = (*this)(i, j).get_str();
    return rows;
}

// ---------------------------------------------------------------------------
// Primes and valuations

bool is_prime(std::uint64_t p) {
    if (p < 2) return false;
    Integer z;
    mpz_import(z.get_mpz_t(), 1, 1, sizeof(p), 0, 0, &p);
    return mpz_probab_prime_p(z.get_mpz_t(), 40) > 0;
}

std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, int>> out;
    for (std::uint64_t p = 2; p <= n / p; p += (p == 2 ? 1 : 2)) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e > 0) out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

Valuation valuation(const Integer& z, std::uint64_t p) {
    if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
    if (z == 0) return Valuation::infinity();
    Integer pz;
    mpz_import(pz.get_mpz_t(), 1, 1, sizeof(p), 0, 0, &p);
    Integer rest = abs(z);
    long v = 0;
    while (mpz_divisible_p(rest.get_mpz_t(), pz.get_mpz_t()) != 0) {
        mpz_divexact(rest.get_mpz_t(), rest.get_mpz_t(), pz.get_mpz_t());
        ++v;
    }
    return Valuation(v);
}

Valuation valuation(const Rational& q, std::uint64_t p) {
    if (!is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
    if (q == 0) return Valuation::infinity();
    return Valuation(valuation(q.get_num(), p).value() - valuation(q.get_den(), p).value());
}

// ---------------------------------------------------------------------------
// Congruence membership and characteristic polynomials

bool in_principal_congruence(const ExactMatrix& gamma, std::uint64_t level) {
    const std::size_t n = gamma.dim();
    const ExactMatrix shifted = gamma - ExactMatrix::identity(n);
    for (const auto& [p, e] : factorize(level)) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (!valuation(gamma(i, j), p).at_least(0)) return false;
                if (!valuation(shifted(i, j), p).at_least(e)) return false;
            }
        }
    }
    return true;
}

std::vector<Rational> char_poly_shifted(const ExactMatrix& gamma) {
    // Faddeev-LeVerrier over Q: M_k = A M_{k-1} + c_{n-k+1} I,
    // c_{n-k} = -tr(A M_k) / k.
    const std::size_t n = gamma.dim();
    const ExactMatrix a = gamma - ExactMatrix::identity(n);
    std::vector<Rational> c(n + 1);
    c[n] = 1;
    ExactMatrix m(n);
    for (std::size_t k = 1; k <= n; ++k) {
        m = a * m;
        for (std::size_t i = 0; i < n; ++i) m(i, i) += c[n - k + 1];
        c[n - k] = -(a * m).trace() / Rational(static_cast<long>(k));
    }
    c.pop_back();
    return c;
}

bool is_unipotent(const ExactMatrix& gamma) {
    const std::size_t n = gamma.dim();
    const ExactMatrix a = gamma - ExactMatrix::identity(n);
    ExactMatrix power = a;
    for (std::size_t k = 1; k < n; ++k) power = power * a;
    return power.is_zero();
}

ValuationCertificate valuation_certificate(const ExactMatrix& gamma, std::uint64_t level) {
    if (level < 3) throw Error(ErrorCode::InputError, "level must be >= 3");
    if (!in_principal_congruence(gamma, level)) {
        throw Error(ErrorCode::NotCongruent, "gamma is not congruent to I mod " + std::to_string(level));
    }
    const std::size_t n = gamma.dim();
    const auto coeffs = char_poly_shifted(gamma);
    ValuationCertificate cert;
    cert.n = n;
    cert.level = level;
    cert.gamma = gamma;
    cert.passed = true;
    for (const auto& [p, e] : factorize(level)) {
        for (std::size_t k = 0; k < n; ++k) {
            CertificateRow row;
            row.p = p;
            row.k = static_cast<int>(k);
            row.val = valuation(coeffs[k], p);
            row.required = static_cast<long>(n - k) * e;
            cert.passed = cert.passed && row.val.at_least(row.required);
            cert.rows.push_back(row);
        }
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Exclusion radius

Rational exclusion_constant(int n) {
    if (n < 2) throw Error(ErrorCode::InputError, "n must be >= 2");
    Integer denom = 1;
    for (int i = 1; i <= n; ++i) denom *= 2 * i;  // 2^n n!
    return Rational(Integer(1), denom);
}

double exclusion_radius_value(int n, double level) {
    const double c = exclusion_constant(n).get_d();
    const double root_n = std::sqrt(static_cast<double>(n));
    const double excess = c * level - root_n;
    if (!(c * level > root_n + 1.0)) return 0.0;
    return std::max(0.0, std::log(excess) - 0.5 * std::log(static_cast<double>(n)));
}

std::uint64_t exclusion_threshold(int n, double C) {
    auto holds = [&](std::uint64_t level) {
        const double r = exclusion_radius_value(n, static_cast<double>(level));
        return r > 0.0 && r >= C * std::log(static_cast<double>(level));
    };
    std::uint64_t lo = 3;
    if (holds(lo)) return lo;
    std::uint64_t hi = 6;
    constexpr std::uint64_t kMax = std::uint64_t{1} << 62;
    while (!holds(hi)) {
        lo = hi;
        if (hi >= kMax / 2) throw Error(ErrorCode::InputError, "exclusion threshold exceeds 2^62");
        hi *= 2;
    }
    // holds(lo) false, holds(hi) true
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (holds(mid) ? hi : lo) = mid;
    }
    return hi;
}

ExclusionBound exclusion_radius(int n, std::uint64_t level) {
    if (level < 3) throw Error(ErrorCode::InputError, "level must be >= 3");
    ExclusionBound b;
    b.n = n;
    b.level = level;
    b.c_n = exclusion_constant(n);
    b.radius = exclusion_radius_value(n, static_cast<double>(level));
    b.C_n = kReportingConstant;
    b.N_0 = exclusion_threshold(n, kReportingConstant);
    return b;
}

ExclusionReport verify_exclusion(const ExactMatrix& gamma, std::uint64_t level,
                                 std::size_t trials, std::uint64_t seed) {
    // Membership in K(N) means integrality at every prime, not only at p | N.
    if (!gamma.is_integral() || !in_principal_congruence(gamma, level)) {
        throw Error(ErrorCode::NotCongruent,
                    "gamma must be integral and congruent to I mod " + std::to_string(level));
    }
    if (is_unipotent(gamma)) throw Error(ErrorCode::IsUnipotent, "gamma is unipotent");
    if (abs(gamma.determinant()) != 1) throw Error(ErrorCode::DetNotUnit, "|det gamma| != 1");

    const std::size_t n = gamma.dim();
    const linalg::Matrix g = gamma.to_double();
    ExclusionReport report;
    report.bound = exclusion_radius(static_cast<int>(n), level).radius;
    report.trials = trials;
    report.min_distance = std::numeric_limits<double>::infinity();

    for (std::size_t trial = 0; trial < trials; ++trial) {
        linalg::Matrix x = linalg::Matrix::Identity(n, n);
        if (trial > 0) {
            auto rng = task_rng(seed, trial);
            std::normal_distribution<double> gauss;
            std::uniform_real_distribution<double> spread(-2.0, 2.0);
            for (;;) {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j) x(i, j) = gauss(rng);
                for (std::size_t j = 0; j < n; ++j) x.col(j) *= std::exp(spread(rng));
                const auto s = linalg::operator_norm(x.inverse()) * linalg::operator_norm(x);
                if (std::isfinite(s) && s < 1e6) break;
            }
        }
        const linalg::Matrix conj = x.partialPivLu().solve(g * x);
        double d = 0.0;
        try {
            d = linalg::cartan_distance_normalized(conj);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularMatrix) throw;
            // Too ill-conditioned for the full spectrum; det = 1 exactly, so
            // log ||conj||_op is still a valid lower bound on the distance.
            d = std::log(linalg::operator_norm(conj));
        }
        report.min_distance = std::min(report.min_distance, d);
    }
    report.passed = trials == 0 || report.min_distance >= report.bound;
    return report;
}

// ---------------------------------------------------------------------------
// Counting

std::uint64_t euler_phi(std::uint64_t n) {
    if (n == 0) throw Error(ErrorCode::InputError, "euler_phi requires N >= 1");
    std::uint64_t phi = n;
    for (const auto& [p, e] : factorize(n)) phi = phi / p * (p - 1);
    return phi;
}

Integer sl_count_formula(int n, std::uint64_t level) {
    if (n < 2 || level < 2) throw Error(ErrorCode::InputError, "sl_count requires n >= 2, N >= 2");
    // |SL(n, Z/p^e)| = p^{(e-1)(n^2-1)} p^{n(n-1)/2} prod_{k=2}^n (p^k - 1)
    Integer total = 1;
    for (const auto& [p, e] : factorize(level)) {
        Integer pz;
        mpz_import(pz.get_mpz_t(), 1, 1, sizeof(p), 0, 0, &p);
        Integer local;
        mpz_pow_ui(local.get_mpz_t(), pz.get_mpz_t(),
                   static_cast<unsigned long>((e - 1) * (n * n - 1) + n * (n - 1) / 2));
        for (int k = 2; k <= n; ++k) {
            Integer pk;
            mpz_pow_ui(pk.get_mpz_t(), pz.get_mpz_t(), static_cast<unsigned long>(k));
            local *= pk - 1;
        }
        total *= local;
    }
    return total;
}

namespace {

// Leibniz expansion of det mod N over a flat n x n array of residues.
struct PermutationTable {
    std::vector<std::vector<int>> perms;
    std::vector<int> signs;

    explicit PermutationTable(int n) {
        std::vector<int> p(static_cast<std::size_t>(n));
        std::iota(p.begin(), p.end(), 0);
        do {
            int inversions = 0;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) inversions += p[i] > p[j];
            perms.push_back(p);
            signs.push_back(inversions % 2 == 0 ? 1 : -1);
        } while (std::next_permutation(p.begin(), p.end()));
    }
};

}  // namespace

Integer sl_count_enumerate(int n, std::uint64_t level, std::uint64_t budget) {
    if (n < 2 || level < 2) throw Error(ErrorCode::InputError, "sl_count requires n >= 2, N >= 2");
    const int cells = n * n;
    long double space = 1.0L;
    for (int i = 0; i < cells; ++i) space *= static_cast<long double>(level);
    if (space > static_cast<long double>(budget)) {
        throw Error(ErrorCode::BudgetExceeded,
                    "N^(n^2) = " + std::to_string(static_cast<double>(space)) + " exceeds budget");
    }
    const PermutationTable table(n);
    const auto modulus = static_cast<std::int64_t>(level);
    std::vector<std::int64_t> cell(static_cast<std::size_t>(cells), 0);
    std::uint64_t count = 0;
    for (;;) {
        std::int64_t det = 0;
        for (std::size_t t = 0; t < table.perms.size(); ++t) {
            std::int64_t prod = 1;
            for (int i = 0; i < n; ++i) {
                prod = prod * cell[static_cast<std::size_t>(i * n + table.perms[t][i])] % modulus;
            }
            det = (det + table.signs[t] * prod) % modulus;
        }
        det = ((det % modulus) + modulus) % modulus;
        if (det == 1 % modulus) ++count;
        int pos = 0;
        while (pos < cells && ++cell[static_cast<std::size_t>(pos)] == modulus) {
            cell[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == cells) break;
    }
    return Integer(static_cast<unsigned long>(count));
}

SlCount sl_count(int n, std::uint64_t level, std::uint64_t budget) {
    SlCount out;
    out.formula = sl_count_formula(n, level);
    try {
        out.enumerated = sl_count_enumerate(n, level, budget);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::BudgetExceeded) throw;
    }
    if (out.enumerated && *out.enumerated != out.formula) {
        throw Error(ErrorCode::AssertionFailure, "sl_count formula disagrees with enumeration");
    }
    return out;
}

double gl_sl_torsion_scale(std::uint64_t level, double log_torsion_sl) {
    return static_cast<double>(euler_phi(level)) * log_torsion_sl;
}

// ---------------------------------------------------------------------------
// Generators

ExactMatrix random_congruent(std::size_t n, std::uint64_t level, long spread,
                             long coprime_denominators, std::mt19937_64& rng) {
    std::uniform_int_distribution<long> entry(-spread, spread);
    std::uniform_int_distribution<long> denom(1, std::max(1L, coprime_denominators));
    ExactMatrix g = ExactMatrix::identity(n);
    const Integer big_n(static_cast<unsigned long>(level));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            long d = 1;
            if (coprime_denominators > 1) {
                do {
                    d = denom(rng);
                } while (std::gcd(static_cast<std::uint64_t>(d), level) != 1);
            }
            Rational b(Integer(entry(rng)), Integer(d));
            b.canonicalize();
            g(i, j) += Rational(big_n) * b;
        }
    }
    return g;
}

ExactMatrix random_congruent_sl(std::size_t n, std::uint64_t level, long spread,
                                std::mt19937_64& rng) {
    std::uniform_int_distribution<long> coeff(1, std::max(1L, spread));
    std::uniform_int_distribution<int> sign(0, 1);
    std::uniform_int_distribution<std::size_t> index(0, n - 1);
    const Rational big_n(Integer(static_cast<unsigned long>(level)));
    for (;;) {
        ExactMatrix g = ExactMatrix::identity(n);
        for (std::size_t f = 0; f < n; ++f) {
            std::size_t i = index(rng);
            std::size_t j = index(rng);
            while (j == i) j = index(rng);
            ExactMatrix e = ExactMatrix::identity(n);
            e(i, j) = big_n * Rational(coeff(rng) * (sign(rng) != 0 ? 1 : -1));
            g = g * e;
        }
        if (!is_unipotent(g)) return g;
    }
}

}  // namespace atorsion::congruence
