#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pobandit/environment.hpp"
#include "pobandit/numerics.hpp"

namespace pobandit {

struct ScenarioConfig {
    EnvironmentSpec spec;
    double c_B = 0.0;
    std::size_t horizon = 1;
    std::uint64_t master_seed = 0;
    std::uint64_t scenario_id = 0;
    // Test hook: posterior mean at t = 1 (defaults to zero).
    std::optional<Vector> initial_eta;
    Tolerances tolerances;
};

/// Per-step records, index t - 1 for step t. Metrics are taken after the
/// posterior update of step t. Arms are 0-based.
struct ScenarioTrace {
    std::vector<std::size_t> chosen_arm;
    std::vector<std::size_t> oracle_arm;
    std::vector<double> regret_increment;
    std::vector<double> cum_regret;
    std::vector<double> eta_err;
    std::vector<double> mu_err;
    std::vector<double> cum_reward;

    std::size_t horizon() const noexcept { return chosen_arm.size(); }
};

/// Runs the posterior-sampling loop for config.horizon steps on the stream
/// (master_seed, scenario_id). Each step draws the round (contexts,
/// observation noises, reward noises), then the posterior sample, picks the
/// policy and oracle arms, charges the realized-reward gap as regret, and
/// updates the posterior with the chosen arm's observation and reward.
ScenarioTrace run_scenario(const ScenarioConfig& config);

/// Regret(t) / ln t for 1-based t >= 2.
double normalized_regret(const ScenarioTrace& trace, std::size_t t);

struct SeriesStats {
    std::vector<double> mean;
    std::vector<double> max;
    std::vector<double> min;
};

/// Per-step mean, max and min across scenarios. norm_regret is NaN at t = 1.
struct AggregateSeries {
    std::size_t scenario_count = 0;
    SeriesStats eta_err;
    SeriesStats mu_err;
    SeriesStats cum_regret;
    SeriesStats norm_regret;
    SeriesStats cum_reward;

    std::size_t horizon() const noexcept { return eta_err.mean.size(); }
};

/// Reduces traces in the given order; the result does not depend on how the
/// traces were produced.
AggregateSeries aggregate(std::span<const ScenarioTrace> traces);

/// Runs every scenario on up to `threads` workers (0 picks the hardware
/// concurrency). Output order matches the input order.
std::vector<ScenarioTrace> run_traces(std::span<const ScenarioConfig> configs, unsigned threads = 0);

/// Throws InconsistentConfigs unless all configs share horizon and model shape.
AggregateSeries run_batch(std::span<const ScenarioConfig> configs, unsigned threads = 0);

}  // namespace pobandit
