#include "pobandit/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pobandit/errors.hpp"

namespace pobandit {

namespace {

constexpr int kMaxConstructionAttempts = 8;
constexpr double kTinyRowNorm = 1e-12;

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& rng) {
    Matrix g(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) g(i, j) = rng.standard_normal();
    }
    return g;
}

}  // namespace

void EnvironmentSpec::validate(const Tolerances& tol) const {
    const auto dx = static_cast<Eigen::Index>(d_x);
    const auto dy = static_cast<Eigen::Index>(d_y);
    if (arms < 1) throw ValidationError("arm count must be at least 1");
    if (d_x < 1 || d_y < 1) throw ValidationError("dimensions must be at least 1");
    if (mu_star.size() != dx) throw ValidationError("mu_star must have length d_x");
    if (A.rows() != dy || A.cols() != dx) {
        throw ValidationError("A must be d_y x d_x, got " + shape(A));
    }
    if (sigma_x.rows() != dx || sigma_x.cols() != dx) throw ValidationError("sigma_x must be d_x x d_x");
    if (sigma_y.rows() != dy || sigma_y.cols() != dy) throw ValidationError("sigma_y must be d_y x d_y");
    if (!mu_star.allFinite() || !A.allFinite() || !sigma_x.allFinite() || !sigma_y.allFinite()) {
        throw ValidationError("model contains non-finite entries");
    }
    if (!(sigma_r_sq > 0.0) || !std::isfinite(sigma_r_sq)) {
        throw ValidationError("reward noise variance must be positive and finite");
    }
    try {
        cholesky(sigma_x, tol);
    } catch (const Error&) {
        throw ValidationError("sigma_x must be symmetric positive definite");
    }
    if (!is_symmetric(sigma_y, tol.symmetry)) throw ValidationError("sigma_y must be symmetric");
    if (sigma_y.size() > 0 && sigma_y.diagonal().minCoeff() < 0.0) {
        throw ValidationError("sigma_y must be positive semi-definite");
    }
}

Matrix derive_D(const EnvironmentSpec& spec, const Tolerances& tol) {
    const Matrix& A = spec.A;
    bool sigma_y_spd = true;
    Matrix chol_y;
    try {
        chol_y = cholesky(spec.sigma_y, tol);
    } catch (const NotPositiveDefinite&) {
        sigma_y_spd = false;
    }

    if (sigma_y_spd) {
        // weighted = sigma_y^-1 A, precision = A^T sigma_y^-1 A + sigma_x^-1
        Matrix weighted = A;
        chol_y.triangularView<Eigen::Lower>().solveInPlace(weighted);
        chol_y.triangularView<Eigen::Lower>().transpose().solveInPlace(weighted);
        const Matrix chol_x = cholesky(spec.sigma_x, tol);
        Matrix sigma_x_inv = Matrix::Identity(A.cols(), A.cols());
        chol_x.triangularView<Eigen::Lower>().solveInPlace(sigma_x_inv);
        chol_x.triangularView<Eigen::Lower>().transpose().solveInPlace(sigma_x_inv);
        Matrix precision = A.transpose() * weighted + sigma_x_inv;
        precision = 0.5 * (precision + precision.transpose()).eval();
        const Matrix chol_p = cholesky(precision, tol);
        Matrix d = weighted.transpose();
        chol_p.triangularView<Eigen::Lower>().solveInPlace(d);
        chol_p.triangularView<Eigen::Lower>().transpose().solveInPlace(d);
        return d;
    }

    Matrix innovation = A * spec.sigma_x * A.transpose() + spec.sigma_y;
    innovation = 0.5 * (innovation + innovation.transpose()).eval();
    const Matrix chol_s = cholesky(innovation, tol);
    // D^T = innovation^-1 A sigma_x
    Matrix d_t = A * spec.sigma_x;
    chol_s.triangularView<Eigen::Lower>().solveInPlace(d_t);
    chol_s.triangularView<Eigen::Lower>().transpose().solveInPlace(d_t);
    return d_t.transpose();
}

DerivedModel derive_model(const EnvironmentSpec& spec, const Tolerances& tol) {
    spec.validate(tol);
    DerivedModel model;
    model.D = derive_D(spec, tol);
    model.eta_star = model.D.transpose() * spec.mu_star;

    // Cov(x | y) = sigma_x - D A sigma_x, identical to the inverse precision.
    Matrix cond_cov = spec.sigma_x - model.D * spec.A * spec.sigma_x;
    model.cond_var_const = std::max(0.0, spec.mu_star.dot(cond_cov * spec.mu_star));

    const double mu_norm = spec.mu_star.norm();
    if (mu_norm == 0.0) {
        model.degenerate = true;
        model.ell = 0.0;
    } else {
        try {
            const Matrix projector = projection_onto_columns(model.D, tol);
            model.ell = std::clamp((projector * spec.mu_star).norm() / mu_norm, 0.0, 1.0);
        } catch (const ZeroMatrix&) {
            model.ell = 0.0;
        }
    }

    model.snr_r = spec.mu_star.dot(spec.sigma_x * spec.mu_star) / spec.sigma_r_sq;
    const double signal = (spec.A * spec.sigma_x * spec.A.transpose()).trace();
    const double noise = spec.sigma_y.trace();
    model.snr_y = noise > 0.0 ? signal / noise : std::numeric_limits<double>::infinity();
    return model;
}

RewardLaw conditional_reward_params(const DerivedModel& model, const EnvironmentSpec& spec, const Vector& y) {
    if (y.size() != model.eta_star.size()) {
        throw DimensionMismatch("conditional_reward_params: observation has length " + std::to_string(y.size()) +
                                ", expected " + std::to_string(model.eta_star.size()));
    }
    return {y.dot(model.eta_star), model.cond_var_const + spec.sigma_r_sq};
}

Environment::Environment(EnvironmentSpec spec, const Tolerances& tol)
    : spec_(std::move(spec)),
      model_(derive_model(spec_, tol)),
      context_sampler_(spec_.sigma_x, tol),
      noise_sampler_(spec_.sigma_y, tol),
      reward_sd_(std::sqrt(spec_.sigma_r_sq)) {}

RoundData Environment::sample_round(RngStream& rng) const {
    RoundData round;
    round.contexts.reserve(spec_.arms);
    round.observations.reserve(spec_.arms);
    round.reward_noises.reserve(spec_.arms);
    for (std::size_t i = 0; i < spec_.arms; ++i) {
        round.contexts.push_back(context_sampler_.sample_centered(rng));
    }
    for (std::size_t i = 0; i < spec_.arms; ++i) {
        round.observations.push_back(spec_.A * round.contexts[i] + noise_sampler_.sample_centered(rng));
    }
    for (std::size_t i = 0; i < spec_.arms; ++i) {
        round.reward_noises.push_back(reward_sd_ * rng.standard_normal());
    }
    return round;
}

double Environment::realized_reward(const RoundData& round, std::size_t arm) const {
    return pobandit::realized_reward(spec_, round, arm);
}

RoundData sample_round(const EnvironmentSpec& spec, RngStream& rng) { return Environment(spec).sample_round(rng); }

double realized_reward(const EnvironmentSpec& spec, const RoundData& round, std::size_t arm) {
    if (arm >= round.contexts.size() || arm >= round.reward_noises.size()) {
        throw ArmOutOfRange("arm " + std::to_string(arm) + " out of range for " +
                            std::to_string(round.contexts.size()) + " arms");
    }
    return round.contexts[arm].dot(spec.mu_star) + round.reward_noises[arm];
}

Vector draw_mu_star(std::size_t d_x, double norm, RngStream& rng) {
    for (;;) {
        Vector g = standard_normal_vector(static_cast<Eigen::Index>(d_x), rng);
        const double n = g.norm();
        if (n > kTinyRowNorm) return g * (norm / n);
    }
}

Matrix make_A_orthonormal(std::size_t d_y, std::size_t d_x, RngStream& rng, const Tolerances& tol) {
    if (d_y > d_x) throw InfeasibleTarget("orthonormal rows need d_y <= d_x");
    for (int attempt = 1;; ++attempt) {
        try {
            return orthonormalize_rows(gaussian_matrix(d_y, d_x, rng), tol);
        } catch (const RankDeficient&) {
            if (attempt == kMaxConstructionAttempts) throw;
        }
    }
}

Matrix make_A_with_estimability(const Vector& mu_star, double ell_target, std::size_t d_y, std::size_t d_x,
                                RngStream& rng, const Tolerances& tol) {
    if (!(ell_target > 0.0 && ell_target <= 1.0)) {
        throw InfeasibleTarget("estimability target must lie in (0, 1]");
    }
    if (static_cast<std::size_t>(mu_star.size()) != d_x) throw DimensionMismatch("mu_star must have length d_x");
    if (d_y < 1 || d_x < d_y + 1) {
        throw InfeasibleTarget("estimability construction needs d_x >= d_y + 1");
    }
    const double mu_norm = mu_star.norm();
    if (!(mu_norm > 0.0)) throw InfeasibleTarget("mu_star must be nonzero");
    const Vector u = mu_star / mu_norm;

    for (int attempt = 1;; ++attempt) {
        try {
            Vector w = standard_normal_vector(static_cast<Eigen::Index>(d_x), rng);
            for (int pass = 0; pass < 2; ++pass) w -= w.dot(u) * u;
            const double w_norm = w.norm();
            if (!(w_norm > tol.gram_schmidt)) throw RankDeficient("orthogonal direction collapsed");
            w /= w_norm;

            Matrix stacked(static_cast<Eigen::Index>(d_y + 1), static_cast<Eigen::Index>(d_x));
            stacked.row(0) = u.transpose();
            stacked.row(1) = w.transpose();
            stacked.bottomRows(static_cast<Eigen::Index>(d_y - 1)) = gaussian_matrix(d_y - 1, d_x, rng);
            const Matrix basis = orthonormalize_rows(stacked, tol);

            Matrix a(static_cast<Eigen::Index>(d_y), static_cast<Eigen::Index>(d_x));
            a.row(0) = (ell_target * u + std::sqrt(std::max(0.0, 1.0 - ell_target * ell_target)) * w).transpose();
            a.bottomRows(static_cast<Eigen::Index>(d_y - 1)) = basis.bottomRows(static_cast<Eigen::Index>(d_y - 1));
            return a;
        } catch (const RankDeficient&) {
            if (attempt == kMaxConstructionAttempts) throw;
        }
    }
}

Matrix make_A_normalized_rows(std::size_t d_y, std::size_t d_x, RngStream& rng) {
    Matrix a(static_cast<Eigen::Index>(d_y), static_cast<Eigen::Index>(d_x));
    for (std::size_t i = 0; i < d_y; ++i) {
        for (;;) {
            Vector row = standard_normal_vector(static_cast<Eigen::Index>(d_x), rng);
            const double n = row.norm();
            if (n >= kTinyRowNorm) {
                a.row(static_cast<Eigen::Index>(i)) = (row / n).transpose();
                break;
            }
        }
    }
    return a;
}

}  // namespace pobandit
