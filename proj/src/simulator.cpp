#include "pobandit/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "pobandit/errors.hpp"
#include "pobandit/policy.hpp"

namespace pobandit {

ScenarioTrace run_scenario(const ScenarioConfig& config) {
    if (config.horizon < 1) throw ValidationError("horizon must be at least 1");
    const Environment env(config.spec, config.tolerances);
    const DerivedModel& model = env.model();
    RngStream rng(config.master_seed, config.scenario_id);

    PosteriorState state = config.initial_eta ? PosteriorState(*config.initial_eta, config.c_B)
                                              : PosteriorState(config.spec.d_y, config.c_B);
    if (state.dim() != config.spec.d_y) throw DimensionMismatch("initial posterior mean has the wrong length");

    ScenarioTrace trace;
    const std::size_t T = config.horizon;
    trace.chosen_arm.reserve(T);
    trace.oracle_arm.reserve(T);
    trace.regret_increment.reserve(T);
    trace.cum_regret.reserve(T);
    trace.eta_err.reserve(T);
    trace.mu_err.reserve(T);
    trace.cum_reward.reserve(T);

    double cum_regret = 0.0;
    double cum_reward = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const RoundData round = env.sample_round(rng);
        const Vector eta_tilde = sample_parameter(state, rng);
        const std::size_t chosen = select_arm(eta_tilde, round.observations);
        const std::size_t best = oracle_arm(model.eta_star, round.observations);

        const double reward = env.realized_reward(round, chosen);
        const double increment = chosen == best ? 0.0 : env.realized_reward(round, best) - reward;
        cum_regret += increment;
        cum_reward += reward;

        state.update(round.observations[chosen], reward);

        trace.chosen_arm.push_back(chosen);
        trace.oracle_arm.push_back(best);
        trace.regret_increment.push_back(increment);
        trace.cum_regret.push_back(cum_regret);
        trace.eta_err.push_back((state.eta_hat() - model.eta_star).norm());
        trace.mu_err.push_back((recover_mu(state, model.D, config.tolerances) - config.spec.mu_star).norm());
        trace.cum_reward.push_back(cum_reward);
    }
    return trace;
}

double normalized_regret(const ScenarioTrace& trace, std::size_t t) {
    if (t < 2) throw UndefinedAtT1("normalized regret is undefined for t < 2");
    if (t > trace.horizon()) {
        throw ValidationError("step " + std::to_string(t) + " beyond horizon " + std::to_string(trace.horizon()));
    }
    return trace.cum_regret[t - 1] / std::log(static_cast<double>(t));
}

namespace {

template <class Extract>
SeriesStats reduce(std::span<const ScenarioTrace> traces, std::size_t horizon, Extract extract) {
    SeriesStats stats;
    stats.mean.assign(horizon, 0.0);
    stats.max.assign(horizon, -std::numeric_limits<double>::infinity());
    stats.min.assign(horizon, std::numeric_limits<double>::infinity());
    for (const ScenarioTrace& trace : traces) {
        for (std::size_t t = 0; t < horizon; ++t) {
            const double v = extract(trace, t);
            stats.mean[t] += v;
            stats.max[t] = std::max(stats.max[t], v);
            stats.min[t] = std::min(stats.min[t], v);
        }
    }
    const double n = static_cast<double>(traces.size());
    for (double& m : stats.mean) m /= n;
    return stats;
}

}  // namespace

AggregateSeries aggregate(std::span<const ScenarioTrace> traces) {
    if (traces.empty()) throw InconsistentConfigs("cannot aggregate zero scenarios");
    const std::size_t horizon = traces.front().horizon();
    for (const ScenarioTrace& trace : traces) {
        if (trace.horizon() != horizon) throw InconsistentConfigs("traces have different horizons");
    }
    AggregateSeries series;
    series.scenario_count = traces.size();
    series.eta_err = reduce(traces, horizon, [](const ScenarioTrace& s, std::size_t t) { return s.eta_err[t]; });
    series.mu_err = reduce(traces, horizon, [](const ScenarioTrace& s, std::size_t t) { return s.mu_err[t]; });
    series.cum_regret = reduce(traces, horizon, [](const ScenarioTrace& s, std::size_t t) { return s.cum_regret[t]; });
    series.cum_reward = reduce(traces, horizon, [](const ScenarioTrace& s, std::size_t t) { return s.cum_reward[t]; });
    series.norm_regret = reduce(traces, horizon, [](const ScenarioTrace& s, std::size_t t) {
        return t == 0 ? std::numeric_limits<double>::quiet_NaN() : normalized_regret(s, t + 1);
    });
    return series;
}

std::vector<ScenarioTrace> run_traces(std::span<const ScenarioConfig> configs, unsigned threads) {
    std::vector<ScenarioTrace> traces(configs.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, configs.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < configs.size(); ++i) traces[i] = run_scenario(configs[i]);
        return traces;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < configs.size() && !failed; i = next++) {
                    try {
                        traces[i] = run_scenario(configs[i]);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                        failed = true;
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
    return traces;
}

AggregateSeries run_batch(std::span<const ScenarioConfig> configs, unsigned threads) {
    if (configs.empty()) throw InconsistentConfigs("batch contains no scenarios");
    const ScenarioConfig& first = configs.front();
    for (const ScenarioConfig& c : configs) {
        if (c.horizon != first.horizon || c.spec.d_x != first.spec.d_x || c.spec.d_y != first.spec.d_y ||
            c.spec.arms != first.spec.arms) {
            throw InconsistentConfigs("batch configs differ in horizon or model shape");
        }
    }
    const std::vector<ScenarioTrace> traces = run_traces(configs, threads);
    return aggregate(traces);
}

}  // namespace pobandit
