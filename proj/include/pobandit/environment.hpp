#pragma once

#include <cstddef>
#include <vector>

#include "pobandit/numerics.hpp"
#include "pobandit/rng.hpp"

namespace pobandit {

/// Generative model: N arms with hidden contexts x ~ N(0, sigma_x), observed
/// through y = A x + e with e ~ N(0, sigma_y), and rewards x^T mu_star + noise
/// with noise ~ N(0, sigma_r_sq). All arms share the same covariances.
struct EnvironmentSpec {
    std::size_t d_x = 0;
    std::size_t d_y = 0;
    std::size_t arms = 0;
    Vector mu_star;
    Matrix A;        // d_y x d_x
    Matrix sigma_x;  // SPD
    Matrix sigma_y;  // SPD; the zero matrix is accepted as a noiseless channel
    double sigma_r_sq = 1.0;

    /// Throws ValidationError describing the first violated invariant.
    void validate(const Tolerances& tol = {}) const;
};

struct DerivedModel {
    Matrix D;                     // d_x x d_y, maps observations to E[x | y]
    Vector eta_star;              // D^T mu_star
    double ell = 0.0;             // ||P_C(D) mu_star|| / ||mu_star||
    double cond_var_const = 0.0;  // mu_star^T Cov(x | y) mu_star
    double snr_r = 0.0;
    double snr_y = 0.0;
    bool degenerate = false;      // mu_star == 0, ell reported as 0
};

struct RoundData {
    std::vector<Vector> contexts;      // hidden x_i, one per arm
    std::vector<Vector> observations;  // y_i
    std::vector<double> reward_noises;
};

struct RewardLaw {
    double mean = 0.0;
    double variance = 0.0;
};

/// D = (A^T sigma_y^-1 A + sigma_x^-1)^-1 A^T sigma_y^-1. When sigma_y is
/// singular the equivalent gain form sigma_x A^T (A sigma_x A^T + sigma_y)^-1
/// is used instead.
Matrix derive_D(const EnvironmentSpec& spec, const Tolerances& tol = {});

DerivedModel derive_model(const EnvironmentSpec& spec, const Tolerances& tol = {});

/// Law of a reward given its arm's observation y: N(y^T eta_star, cond_var_const + sigma_r_sq).
RewardLaw conditional_reward_params(const DerivedModel& model, const EnvironmentSpec& spec, const Vector& y);

/// Validated spec bundled with its derived quantities and cached covariance
/// factors, so repeated rounds skip refactorization.
class Environment {
public:
    explicit Environment(EnvironmentSpec spec, const Tolerances& tol = {});

    const EnvironmentSpec& spec() const noexcept { return spec_; }
    const DerivedModel& model() const noexcept { return model_; }

    /// Consumes, in order: N contexts (d_x normals each), N observation
    /// noises (d_y normals each), N reward noises (one normal each).
    RoundData sample_round(RngStream& rng) const;

    /// Reward of a 0-based arm: contexts[arm]^T mu_star + reward_noises[arm].
    double realized_reward(const RoundData& round, std::size_t arm) const;

private:
    EnvironmentSpec spec_;
    DerivedModel model_;
    GaussianSampler context_sampler_;
    GaussianSampler noise_sampler_;
    double reward_sd_;
};

RoundData sample_round(const EnvironmentSpec& spec, RngStream& rng);
double realized_reward(const EnvironmentSpec& spec, const RoundData& round, std::size_t arm);

/// Random reward parameter: d_x standard normals rescaled to the given norm.
Vector draw_mu_star(std::size_t d_x, double norm, RngStream& rng);

/// d_y x d_x matrix with orthonormal rows, from Gaussian rows orthonormalized.
Matrix make_A_orthonormal(std::size_t d_y, std::size_t d_x, RngStream& rng, const Tolerances& tol = {});

/// Orthonormal-row A whose row space captures exactly the fraction
/// ell_target of mu_star (under identity covariances). Row 0 is
/// ell * u + sqrt(1 - ell^2) * w with u = mu_star / |mu_star| and w a random
/// unit vector orthogonal to u; the other rows are orthogonal to u and w.
Matrix make_A_with_estimability(const Vector& mu_star, double ell_target, std::size_t d_y, std::size_t d_x,
                                RngStream& rng, const Tolerances& tol = {});

/// Gaussian rows scaled to unit norm, not orthogonalized. d_y may exceed d_x.
Matrix make_A_normalized_rows(std::size_t d_y, std::size_t d_x, RngStream& rng);

}  // namespace pobandit
