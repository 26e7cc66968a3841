// pobandit: run the bandit experiment presets and write results CSVs.
//
//   pobandit run --preset fig1_arms --scale desk --out results
//   pobandit run --config my.cfg
//   pobandit list-presets
//   pobandit describe --preset fig3_snr
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure.
#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "pobandit/errors.hpp"
#include "pobandit/experiments.hpp"
#include "pobandit/results_csv.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

void print_summary(const pobandit::ExperimentSummary& summary) {
    std::cout << "wrote " << summary.rows_written << " rows to " << summary.results_path.string() << '\n'
              << "manifest: " << summary.manifest_path.string() << '\n';
    std::cout << "final-step means per sweep point (eta_err, mu_err, norm_regret, cum_reward):\n";
    for (const auto& [point, series] : summary.points) {
        const std::size_t last = series.horizon() - 1;
        const double norm = series.norm_regret.mean[last];
        std::cout << "  " << (point.key().empty() ? std::string("(default)") : point.key()) << ": "
                  << pobandit::format_shortest(series.eta_err.mean[last]) << ", "
                  << pobandit::format_shortest(series.mu_err.mean[last]) << ", "
                  << (std::isnan(norm) ? std::string("-") : pobandit::format_shortest(norm)) << ", "
                  << pobandit::format_shortest(series.cum_reward.mean[last]) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Posterior-sampling bandits with partially observed contexts"};
    app.require_subcommand(1);

    std::string preset_name;
    std::string scale_text;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "results";
    std::string config_path;
    unsigned threads = 0;
    bool threads_given = false;

    auto* run = app.add_subcommand("run", "Run an experiment preset and write results.csv and manifest.txt");
    run->add_option("--preset", preset_name, "Preset name (see list-presets)");
    run->add_option("--scale", scale_text, "desk (T=2000, 20 scenarios) or paper (T=5000, 50 scenarios)")
        ->check(CLI::IsMember({"desk", "paper"}));
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--out", out_dir, "Output root directory");
    run->add_option("--config", config_path, "Config file (key = value)");
    run->add_option("--threads", threads, "Worker threads (0 = all cores)")->each([&](const std::string&) {
        threads_given = true;
    });

    auto* list = app.add_subcommand("list-presets", "List the built-in presets");

    std::string describe_name;
    std::string describe_scale = "paper";
    auto* describe = app.add_subcommand("describe", "Print a preset's parameter grid");
    describe->add_option("--preset", describe_name, "Preset name")->required();
    describe->add_option("--scale", describe_scale, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*list) {
            for (std::string_view name : pobandit::preset_names()) std::cout << name << '\n';
            return 0;
        }
        if (*describe) {
            std::cout << pobandit::describe(pobandit::preset(describe_name, pobandit::parse_scale(describe_scale)));
            return 0;
        }

        std::optional<pobandit::Scale> scale;
        if (!scale_text.empty()) scale = pobandit::parse_scale(scale_text);

        pobandit::ExperimentPreset experiment;
        if (!config_path.empty()) {
            experiment = pobandit::parse_config(config_path, {scale});
            if (!preset_name.empty() && preset_name != experiment.name) {
                throw pobandit::ValidationError("--preset " + preset_name + " conflicts with the config file's preset " +
                                                experiment.name);
            }
        } else {
            if (preset_name.empty()) throw pobandit::ValidationError("run needs --preset or --config");
            experiment = pobandit::preset(preset_name, scale.value_or(pobandit::Scale::paper));
        }
        if (seed) experiment.master_seed = *seed;
        if (threads_given) experiment.threads = threads;
        pobandit::validate(experiment);

        print_summary(pobandit::run_experiment(experiment, out_dir));
        return 0;
    } catch (const pobandit::ValidationFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
