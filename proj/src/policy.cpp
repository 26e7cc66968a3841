#include "pobandit/policy.hpp"

#include <cmath>
#include <string>

#include "pobandit/errors.hpp"

namespace pobandit {

PosteriorState::PosteriorState(std::size_t d_y, double c_B) : PosteriorState(Vector::Zero(static_cast<Eigen::Index>(d_y)), c_B) {}

PosteriorState::PosteriorState(const Vector& eta_hat, double c_B)
    : B_(Matrix::Identity(eta_hat.size(), eta_hat.size())),
      chol_B_(Matrix::Identity(eta_hat.size(), eta_hat.size())),
      eta_hat_(eta_hat),
      c_B_(c_B) {
    if (eta_hat.size() < 1) throw ValidationError("posterior dimension must be at least 1");
    if (!(c_B >= 0.0) || !std::isfinite(c_B)) throw ValidationError("c_B must be a finite nonnegative number");
}

void PosteriorState::update(const Vector& y, double r) {
    if (y.size() != eta_hat_.size()) {
        throw DimensionMismatch("posterior update: observation has length " + std::to_string(y.size()) +
                                ", expected " + std::to_string(eta_hat_.size()));
    }
    if (!std::isfinite(r) || !y.allFinite()) throw ValidationError("posterior update: non-finite data");
    const Vector rhs = B_ * eta_hat_ + y * r;
    B_.noalias() += y * y.transpose();
    cholesky_rank1_update(chol_B_, y);
    eta_hat_ = cholesky_solve(chol_B_, rhs);
}

PosteriorState init_state(std::size_t d_y, double c_B) { return PosteriorState(d_y, c_B); }

PosteriorState update(PosteriorState state, const Vector& y, double r) {
    state.update(y, r);
    return state;
}

Vector sample_parameter(const PosteriorState& state, RngStream& rng) {
    const Vector z = standard_normal_vector(static_cast<Eigen::Index>(state.dim()), rng);
    if (state.c_B() == 0.0) return state.eta_hat();
    // chol^-T z has covariance (L L^T)^-1 = B^-1.
    Vector offset = state.chol_B().triangularView<Eigen::Lower>().transpose().solve(z);
    return state.eta_hat() + std::sqrt(state.c_B()) * offset;
}

std::size_t select_arm(const Vector& eta, std::span<const Vector> observations) {
    if (observations.empty()) throw EmptyArmSet("no arms to choose from");
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        if (observations[i].size() != eta.size()) {
            throw DimensionMismatch("select_arm: observation " + std::to_string(i) + " has the wrong length");
        }
        const double score = observations[i].dot(eta);
        if (i == 0 || score > best_score) {
            best = i;
            best_score = score;
        }
    }
    return best;
}

std::size_t oracle_arm(const Vector& eta_star, std::span<const Vector> observations) {
    return select_arm(eta_star, observations);
}

Vector recover_mu(const PosteriorState& state, const Matrix& D, const Tolerances& tol) {
    if (static_cast<std::size_t>(D.cols()) != state.dim()) {
        throw DimensionMismatch("recover_mu: D has " + std::to_string(D.cols()) + " columns, posterior dimension is " +
                                std::to_string(state.dim()));
    }
    const Matrix DB = D * state.B();
    Matrix gram = DB * D.transpose();
    gram = 0.5 * (gram + gram.transpose()).eval();
    return psd_pseudo_inverse(gram, tol) * (DB * state.eta_hat());
}

}  // namespace pobandit
