#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pobandit/numerics.hpp"
#include "pobandit/simulator.hpp"

namespace pobandit {

inline constexpr std::string_view kVersion = "1.0.0";
inline constexpr std::uint64_t kDefaultSeed = 20220125;

// Setup draws (mu_star, A) for scenario k come from stream kSetupStreamOffset + k
// so they never overlap the simulation stream k. A shared mu_star, when
// requested, comes from kSharedMuStream.
inline constexpr std::uint64_t kSetupStreamOffset = std::uint64_t{1} << 63;
inline constexpr std::uint64_t kSharedMuStream = ~std::uint64_t{0};

enum class ObservationKind { orthonormal, target_ell, normalized_rows };

enum class Scale { desk, paper };

std::string_view to_string(ObservationKind kind);
std::string_view to_string(Scale scale);
ObservationKind parse_observation_kind(std::string_view text);
Scale parse_scale(std::string_view text);

/// Model parameters for one sweep point. Optional fields override the plain
/// ones when set: snr_y fixes s_y = s_x / snr_y, snr_r fixes sigma_r_sq so
/// that mu^T sigma_x mu / sigma_r_sq hits the target for each drawn mu.
struct ModelParams {
    std::size_t d_x = 20;
    std::size_t d_y = 5;
    std::size_t arms = 5;
    double sigma_r_sq = 1.0;
    double s_x = 1.0;
    double s_y = 1.0;
    double c_B = 0.0;
    std::optional<double> mu_norm;  // sqrt(d_x) when unset
    std::optional<double> ell;      // required for ObservationKind::target_ell
    std::optional<double> snr_r;
    std::optional<double> snr_y;
    ObservationKind observation = ObservationKind::orthonormal;
    bool fix_mu = false;

    bool operator==(const ModelParams&) const = default;
};

/// Names accepted as sweep axes and numeric config keys.
std::span<const std::string_view> sweepable_parameters();

/// Sets a named numeric parameter; throws ValidationError for unknown names
/// or non-integral counts.
void apply_parameter(ModelParams& params, std::string_view name, double value);

/// Throws ValidationError when the parameters cannot produce a valid model.
void validate(const ModelParams& params);

struct SweepAxis {
    std::string name;
    std::vector<double> values;

    bool operator==(const SweepAxis&) const = default;
};

struct ExperimentPreset {
    std::string name;
    ModelParams base;
    std::vector<SweepAxis> grid;  // Cartesian product, first axis outermost
    std::size_t scenarios = 50;
    std::size_t horizon = 5000;
    std::uint64_t master_seed = kDefaultSeed;
    unsigned threads = 0;  // 0 = hardware concurrency; never affects results
    Tolerances tolerances;

    bool operator==(const ExperimentPreset&) const = default;
};

bool operator==(const Tolerances& a, const Tolerances& b);

std::span<const std::string_view> preset_names();

/// Built-in presets: fig1_arms, fig2_estimability, fig3_snr, fig4_dimension
/// and custom. Desk scale runs T = 2000 with 20 scenarios and trims the
/// fig3 and fig4 grids; paper scale runs T = 5000 with 50 scenarios.
ExperimentPreset preset(std::string_view name, Scale scale = Scale::paper);

void validate(const ExperimentPreset& preset);

struct SweepPoint {
    std::vector<std::pair<std::string, double>> assignments;

    /// "name=value" pairs joined by ';' (empty for a single default point).
    std::string key() const;
};

std::vector<SweepPoint> expand_grid(const ExperimentPreset& preset);

ModelParams params_at(const ExperimentPreset& preset, const SweepPoint& point);

/// Builds the per-scenario environments of one sweep point.
std::vector<ScenarioConfig> build_scenarios(const ExperimentPreset& preset, const SweepPoint& point);

struct PointResult {
    SweepPoint point;
    AggregateSeries series;
};

using TraceSink = std::function<void(const SweepPoint&, std::span<const ScenarioTrace>)>;

/// Runs every sweep point in grid order; the sink sees each point's traces
/// before they are discarded.
std::vector<PointResult> run_points(const ExperimentPreset& preset, const TraceSink& sink = {});

struct ExperimentSummary {
    std::filesystem::path results_path;
    std::filesystem::path manifest_path;
    std::size_t rows_written = 0;
    std::vector<PointResult> points;
};

/// Writes <out_root>/<preset>/results.csv and manifest.txt. The manifest is
/// itself a config file that reproduces the CSV.
ExperimentSummary run_experiment(const ExperimentPreset& preset, const std::filesystem::path& out_root);

/// Config file text describing the preset completely.
std::string to_config_text(const ExperimentPreset& preset);

/// Human-readable grid description for the CLI.
std::string describe(const ExperimentPreset& preset);

// Config parsing (config.cpp).

struct ConfigOverrides {
    std::optional<Scale> scale;
};

/// Parses the key = value config format. The preset named by `preset` is
/// the starting point (custom when absent); every other key overrides it.
/// Throws ParseError for syntax problems and unknown keys and
/// ValidationError for out-of-range values.
ExperimentPreset parse_config_text(std::string_view text, const ConfigOverrides& overrides = {});
ExperimentPreset parse_config(const std::filesystem::path& file, const ConfigOverrides& overrides = {});

}  // namespace pobandit
