#pragma once

#include <Eigen/Dense>

#include "pobandit/rng.hpp"

namespace pobandit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Numerical thresholds shared by the linear-algebra routines. The defaults
/// are what every experiment uses unless the configuration overrides them.
struct Tolerances {
    double symmetry = 1e-10;        // |m_ij - m_ji| allowed before a matrix counts as asymmetric
    double spd_pivot = 1e-12;       // Cholesky pivot floor, relative to the largest diagonal entry
    double psd_clamp = 1e-12;       // pivoted factorization treats residual diagonals below this (relative) as zero
    double rank_cutoff = 1e-10;     // singular values below this times the largest are treated as zero
    double zero_entry = 1e-14;      // absolute magnitude below which a matrix counts as all-zero
    double gram_schmidt = 1e-10;    // relative residual norm below which rows count as dependent
};

bool all_finite(const Matrix& m);
bool is_symmetric(const Matrix& m, double tol);

/// Lower-triangular L with L * L^T = m.
/// Throws NotPositiveDefinite when a pivot drops to spd_pivot times the
/// largest diagonal entry, DimensionMismatch when m is not square or not
/// symmetric.
Matrix cholesky(const Matrix& m, const Tolerances& tol = {});

/// Solves L * L^T * x = b given the lower factor.
Vector cholesky_solve(const Matrix& lower, const Vector& b);

/// In-place update of the lower factor so that L' L'^T = L L^T + v v^T.
void cholesky_rank1_update(Matrix& lower, Vector v);

Vector solve_spd(const Matrix& m, const Vector& b, const Tolerances& tol = {});

/// Orthogonal projector onto the column space of m. Rank is the number of
/// singular values above rank_cutoff times the largest one.
Matrix projection_onto_columns(const Matrix& m, const Tolerances& tol = {});

/// Modified Gram-Schmidt over the rows of m, applied twice for stability.
/// Each output row has its first nonzero entry positive.
Matrix orthonormalize_rows(const Matrix& m, const Tolerances& tol = {});

/// Moore-Penrose inverse of a symmetric positive semi-definite matrix.
Matrix psd_pseudo_inverse(const Matrix& m, const Tolerances& tol = {});

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Factor F (n x n, not necessarily triangular) with F * F^T = cov for a
/// symmetric PSD cov, computed by diagonally pivoted Cholesky. Residual
/// pivots at or below psd_clamp times the largest diagonal entry end the
/// factorization; the remaining columns stay zero.
Matrix psd_factor(const Matrix& cov, const Tolerances& tol = {});

/// Fills an n-vector with standard normals drawn in index order.
Vector standard_normal_vector(Eigen::Index n, RngStream& rng);

/// Draws from N(mean, cov) as mean + F * z. Always consumes exactly dim
/// standard normals, whatever the rank of cov.
class GaussianSampler {
public:
    explicit GaussianSampler(const Matrix& cov, const Tolerances& tol = {});

    Eigen::Index dim() const noexcept { return factor_.rows(); }
    const Matrix& factor() const noexcept { return factor_; }

    Vector sample(const Vector& mean, RngStream& rng) const;
    Vector sample_centered(RngStream& rng) const;

private:
    Matrix factor_;
    bool zero_ = false;
};

Vector mvn_sample(const Vector& mean, const Matrix& cov, RngStream& rng, const Tolerances& tol = {});

}  // namespace pobandit
