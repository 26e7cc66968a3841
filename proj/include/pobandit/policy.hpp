#pragma once

#include <cstddef>
#include <span>

#include "pobandit/numerics.hpp"
#include "pobandit/rng.hpp"

namespace pobandit {

/// Gaussian posterior over the transformed parameter eta in precision form:
/// mean eta_hat, covariance c_B * B^-1. B starts at the identity and grows
/// by y y^T per observed arm; the lower Cholesky factor of B is kept in
/// sync by rank-1 updates.
class PosteriorState {
public:
    PosteriorState(std::size_t d_y, double c_B);

    /// Starts from a given mean instead of zero (B still starts at I).
    PosteriorState(const Vector& eta_hat, double c_B);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(eta_hat_.size()); }
    double c_B() const noexcept { return c_B_; }
    const Matrix& B() const noexcept { return B_; }
    const Matrix& chol_B() const noexcept { return chol_B_; }
    const Vector& eta_hat() const noexcept { return eta_hat_; }

    /// eta_hat <- (B + y y^T)^-1 (B eta_hat + y r), then B <- B + y y^T.
    void update(const Vector& y, double r);

private:
    Matrix B_;
    Matrix chol_B_;
    Vector eta_hat_;
    double c_B_;
};

PosteriorState init_state(std::size_t d_y, double c_B);

/// Returns the updated copy; the input is left untouched.
PosteriorState update(PosteriorState state, const Vector& y, double r);

/// Draws eta_tilde ~ N(eta_hat, c_B B^-1). Always consumes dim() standard
/// normals so that runs differing only in c_B see the same randomness
/// elsewhere; with c_B == 0 the result is eta_hat bit for bit.
Vector sample_parameter(const PosteriorState& state, RngStream& rng);

/// 0-based argmax of y_i^T eta over the arms, lowest index on ties.
std::size_t select_arm(const Vector& eta, std::span<const Vector> observations);

/// Conditionally optimal arm under the true transformed parameter.
std::size_t oracle_arm(const Vector& eta_star, std::span<const Vector> observations);

/// Reward-parameter estimate pinv(D B D^T) D B eta_hat, where pinv drops
/// eigenvalues below rank_cutoff times the largest.
Vector recover_mu(const PosteriorState& state, const Matrix& D, const Tolerances& tol = {});

}  // namespace pobandit
