#include "pobandit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pobandit/errors.hpp"

namespace pobandit {

namespace {

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw DimensionMismatch(std::string(what) + ": expected a square matrix, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

}  // namespace

bool all_finite(const Matrix& m) { return m.allFinite(); }

bool is_symmetric(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = j + 1; i < m.rows(); ++i) {
            if (std::abs(m(i, j) - m(j, i)) > tol) return false;
        }
    }
    return true;
}

Matrix cholesky(const Matrix& m, const Tolerances& tol) {
    require_square(m, "cholesky");
    if (!is_symmetric(m, tol.symmetry)) {
        throw DimensionMismatch("cholesky: matrix is not symmetric");
    }
    const Eigen::Index n = m.rows();
    const double max_diag = n > 0 ? m.diagonal().maxCoeff() : 0.0;
    if (n > 0 && !(max_diag > 0.0)) {
        throw NotPositiveDefinite("cholesky: largest diagonal entry is not positive");
    }
    const double floor = tol.spd_pivot * max_diag;

    Matrix lower = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = m(j, j) - lower.row(j).head(j).squaredNorm();
        if (!(pivot > floor)) {
            throw NotPositiveDefinite("cholesky: pivot " + std::to_string(pivot) + " at index " +
                                      std::to_string(j));
        }
        const double diag = std::sqrt(pivot);
        lower(j, j) = diag;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            lower(i, j) = (m(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j))) / diag;
        }
    }
    return lower;
}

Vector cholesky_solve(const Matrix& lower, const Vector& b) {
    if (lower.rows() != b.size()) {
        throw DimensionMismatch("cholesky_solve: right-hand side has the wrong length");
    }
    Vector x = lower.triangularView<Eigen::Lower>().solve(b);
    lower.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
    return x;
}

void cholesky_rank1_update(Matrix& lower, Vector v) {
    const Eigen::Index n = lower.rows();
    if (v.size() != n) {
        throw DimensionMismatch("cholesky_rank1_update: vector has the wrong length");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        const double lkk = lower(k, k);
        const double r = std::hypot(lkk, v(k));
        const double c = r / lkk;
        const double s = v(k) / lkk;
        lower(k, k) = r;
        for (Eigen::Index i = k + 1; i < n; ++i) {
            lower(i, k) = (lower(i, k) + s * v(i)) / c;
            v(i) = c * v(i) - s * lower(i, k);
        }
    }
}

Vector solve_spd(const Matrix& m, const Vector& b, const Tolerances& tol) {
    if (m.rows() != b.size()) {
        throw DimensionMismatch("solve_spd: right-hand side has the wrong length");
    }
    return cholesky_solve(cholesky(m, tol), b);
}

Matrix projection_onto_columns(const Matrix& m, const Tolerances& tol) {
    if (m.size() == 0 || m.cwiseAbs().maxCoeff() < tol.zero_entry) {
        throw ZeroMatrix("projection_onto_columns: matrix is numerically zero");
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cutoff = tol.rank_cutoff * sv(0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    const auto basis = svd.matrixU().leftCols(rank);
    return basis * basis.transpose();
}

Matrix orthonormalize_rows(const Matrix& m, const Tolerances& tol) {
    if (m.rows() > m.cols()) {
        throw RankDeficient("orthonormalize_rows: more rows than columns");
    }
    Matrix q = m;
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        const double original = q.row(i).norm();
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index j = 0; j < i; ++j) {
                q.row(i) -= q.row(i).dot(q.row(j)) * q.row(j);
            }
        }
        const double residual = q.row(i).norm();
        if (!(residual > tol.gram_schmidt * original) || original == 0.0) {
            throw RankDeficient("orthonormalize_rows: row " + std::to_string(i) +
                                " is linearly dependent on earlier rows");
        }
        q.row(i) /= residual;
        for (Eigen::Index k = 0; k < q.cols(); ++k) {
            if (std::abs(q(i, k)) > tol.zero_entry) {
                if (q(i, k) < 0.0) q.row(i) *= -1.0;
                break;
            }
        }
    }
    return q;
}

Matrix psd_pseudo_inverse(const Matrix& m, const Tolerances& tol) {
    require_square(m, "psd_pseudo_inverse");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    const Vector& values = eig.eigenvalues();
    const Matrix& vectors = eig.eigenvectors();
    const double largest = values.cwiseAbs().maxCoeff();
    const double cutoff = tol.rank_cutoff * largest;
    Matrix inverse = Matrix::Zero(m.rows(), m.cols());
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        if (values(k) > cutoff) {
            inverse.noalias() += (1.0 / values(k)) * vectors.col(k) * vectors.col(k).transpose();
        }
    }
    return inverse;
}

double operator_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

Matrix psd_factor(const Matrix& cov, const Tolerances& tol) {
    require_square(cov, "psd_factor");
    if (!is_symmetric(cov, tol.symmetry)) {
        throw DimensionMismatch("psd_factor: covariance is not symmetric");
    }
    const Eigen::Index n = cov.rows();
    Matrix factor = Matrix::Zero(n, n);
    if (n == 0) return factor;

    Matrix residual = cov;
    const double threshold = tol.psd_clamp * std::max(cov.diagonal().maxCoeff(), 0.0);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index pivot = -1;
        double best = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!used[static_cast<std::size_t>(i)] && residual(i, i) > best) {
                best = residual(i, i);
                pivot = i;
            }
        }
        if (!(best > threshold)) break;
        used[static_cast<std::size_t>(pivot)] = true;
        const double root = std::sqrt(best);
        for (Eigen::Index i = 0; i < n; ++i) {
            factor(i, k) = used[static_cast<std::size_t>(i)] && i != pivot ? 0.0 : residual(i, pivot) / root;
        }
        factor(pivot, k) = root;
        residual.noalias() -= factor.col(k) * factor.col(k).transpose();
    }
    return factor;
}

Vector standard_normal_vector(Eigen::Index n, RngStream& rng) {
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.standard_normal();
    return z;
}

GaussianSampler::GaussianSampler(const Matrix& cov, const Tolerances& tol)
    : factor_(psd_factor(cov, tol)), zero_(factor_.isZero(0.0)) {}

Vector GaussianSampler::sample_centered(RngStream& rng) const {
    const Vector z = standard_normal_vector(factor_.rows(), rng);
    if (zero_) return Vector::Zero(factor_.rows());
    return factor_ * z;
}

Vector GaussianSampler::sample(const Vector& mean, RngStream& rng) const {
    if (mean.size() != factor_.rows()) {
        throw DimensionMismatch("mvn_sample: mean has length " + std::to_string(mean.size()) +
                                ", covariance has dimension " + std::to_string(factor_.rows()));
    }
    const Vector z = standard_normal_vector(factor_.rows(), rng);
    if (zero_) return mean;
    return mean + factor_ * z;
}

Vector mvn_sample(const Vector& mean, const Matrix& cov, RngStream& rng, const Tolerances& tol) {
    if (cov.rows() != mean.size()) {
        throw DimensionMismatch("mvn_sample: mean and covariance dimensions differ");
    }
    return GaussianSampler(cov, tol).sample(mean, rng);
}

}  // namespace pobandit
