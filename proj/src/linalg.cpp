#include "atorsion/linalg.hpp"

#include "atorsion/error.hpp"

#include <cmath>
#include <sstream>

namespace atorsion::linalg {

namespace {

void require_square(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw Error(ErrorCode::InputError, "matrix must be square and nonempty");
    }
}

}  // namespace

GroupPoint::GroupPoint(Matrix entries) : entries_(std::move(entries)) {
    require_square(entries_);
    if (entries_.rows() < 2) {
        throw Error(ErrorCode::InputError, "GroupPoint requires n >= 2");
    }
    // singular_values throws SingularMatrix first, so a degenerate matrix is
    // never misreported as a determinant failure.
    singular_values(entries_);
    const double det = entries_.determinant();
    if (!(std::abs(std::abs(det) - 1.0) <= kDetTolerance)) {
        std::ostringstream msg;
        msg << "|det| = " << std::abs(det) << " is not 1";
        throw Error(ErrorCode::DetNotUnit, msg.str());
    }
}

GroupPoint GroupPoint::normalized(const Matrix& m) {
    require_square(m);
    singular_values(m);
    const double det = std::abs(m.determinant());
    const double scale = std::pow(det, -1.0 / static_cast<double>(m.rows()));
    return GroupPoint(m * scale);
}

Vector singular_values(const Matrix& m) {
    require_square(m);
    Eigen::JacobiSVD<Matrix> svd(m);
    Vector s = svd.singularValues();
    if (!(s(s.size() - 1) > kSingularTolerance * s(0))) {
        throw Error(ErrorCode::SingularMatrix, "smallest singular value below tolerance");
    }
    return s;
}

PolarData polar_log(const GroupPoint& g) {
    const Matrix& m = g.entries();
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vector s = svd.singularValues();
    if (!(s(s.size() - 1) > kSingularTolerance * s(0))) {
        throw Error(ErrorCode::SingularMatrix, "smallest singular value below tolerance");
    }
    const Matrix& u = svd.matrixU();
    const Matrix& v = svd.matrixV();
    // m = U S V^T = (U V^T)(V S V^T)
    Vector log_s = s.array().log().matrix();
    Matrix x = v * log_s.asDiagonal() * v.transpose();
    PolarData out;
    out.orthogonal_factor = u * v.transpose();
    out.log_symmetric = 0.5 * (x + x.transpose());
    out.singular_values = std::move(s);
    return out;
}

double cartan_distance(const GroupPoint& g) {
    const Vector s = singular_values(g.entries());
    return s.array().log().matrix().norm();
}

double cartan_distance_normalized(const Matrix& m) {
    Vector log_s = singular_values(m).array().log().matrix();
    // Removing the mean of log s is the same as rescaling to |det| = 1.
    log_s.array() -= log_s.mean();
    return log_s.norm();
}

double operator_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

double frobenius_norm(const Matrix& m) { return m.norm(); }

DistanceLemmaCheck check_distance_lemma(const GroupPoint& g) {
    const Matrix& m = g.entries();
    const double n = static_cast<double>(g.dim());
    DistanceLemmaCheck c;
    c.r = cartan_distance(g);
    c.log_opnorm = std::log(operator_norm(m));
    c.log_frobnorm = std::log(frobenius_norm(m));
    c.margin_op = c.r - c.log_opnorm;
    c.margin_frob = c.r - (c.log_frobnorm - 0.5 * std::log(n));
    return c;
}

Matrix symmetric_exp(const Matrix& x) {
    require_square(x);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (x + x.transpose()));
    const Vector e = eig.eigenvalues().array().exp().matrix();
    return eig.eigenvectors() * e.asDiagonal() * eig.eigenvectors().transpose();
}

GroupPoint random_group_point(std::size_t n, double spread, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> scale(-spread, spread);
    const auto dim = static_cast<Eigen::Index>(n);
    for (;;) {
        Matrix m(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double row_scale = std::exp(scale(rng));
            for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = row_scale * gauss(rng);
        }
        const Vector s = Eigen::JacobiSVD<Matrix>(m).singularValues();
        if (s(dim - 1) > 1e-8 * s(0)) return GroupPoint::normalized(m);
    }
}

}  // namespace atorsion::linalg
