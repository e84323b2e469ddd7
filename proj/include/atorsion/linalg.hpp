/*
 * linalg.hpp - geometry of the symmetric space GL(n,R)^1 / O(n).
 *
 * Every g with |det g| = 1 factors as g = k * exp(X) with k orthogonal and
 * X symmetric and traceless (polar form). The Riemannian distance from the
 * base point to g.K is
 *
 *     r(g) = ||X||_F = || (log s_1, ..., log s_n) ||_2,
 *
 * where s_i are the singular values of g. Since max |log s_i| <= ||log s||_2,
 *
 *     r(g) >= log ||g||_op                        (exact)
 *     r(g) >= log ||g||_F - 1/2 log n             (Frobenius form)
 */
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <random>

namespace atorsion::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDetTolerance = 1e-9;
inline constexpr double kSingularTolerance = 1e-12;

// An element of G(R)^1: a real n x n matrix with |det| = 1.
class GroupPoint {
public:
    // Throws Error{DetNotUnit} when |det| deviates from 1 by more than
    // kDetTolerance, Error{SingularMatrix} when not invertible.
    explicit GroupPoint(Matrix entries);

    // Rescales an invertible matrix by |det|^(-1/n) so it lands in G(R)^1.
    static GroupPoint normalized(const Matrix& m);

    const Matrix& entries() const noexcept { return entries_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }

private:
    Matrix entries_;
};

struct PolarData {
    Matrix orthogonal_factor;
    Matrix log_symmetric;
    Vector singular_values;  // descending
};

// g = orthogonal_factor * exp(log_symmetric).
PolarData polar_log(const GroupPoint& g);

double cartan_distance(const GroupPoint& g);

// Distance of an arbitrary invertible matrix after rescaling to unit
// determinant. Used on conjugates x^-1 g x whose determinant is 1 only up to
// rounding.
double cartan_distance_normalized(const Matrix& m);

// Descending singular values; throws SingularMatrix below the relative
// tolerance.
Vector singular_values(const Matrix& m);

double operator_norm(const Matrix& m);
double frobenius_norm(const Matrix& m);

struct DistanceLemmaCheck {
    double r = 0.0;
    double log_opnorm = 0.0;
    double log_frobnorm = 0.0;
    double margin_op = 0.0;    // r - log ||g||_op
    double margin_frob = 0.0;  // r - (log ||g||_F - 1/2 log n)
};

DistanceLemmaCheck check_distance_lemma(const GroupPoint& g);

// exp of a symmetric matrix via its eigendecomposition.
Matrix symmetric_exp(const Matrix& x);

// Gaussian matrix with rows scaled by e^{U(-spread, spread)}, normalized to
// unit determinant.
GroupPoint random_group_point(std::size_t n, double spread, std::mt19937_64& rng);

}  // namespace atorsion::linalg
