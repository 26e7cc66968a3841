#include "pobandit/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pobandit/environment.hpp"
#include "pobandit/errors.hpp"
#include "pobandit/results_csv.hpp"

namespace pobandit {

namespace {

constexpr std::array<std::string_view, 5> kPresetNames{"fig1_arms", "fig2_estimability", "fig3_snr",
                                                       "fig4_dimension", "custom"};

constexpr std::array<std::string_view, 11> kSweepable{"N",     "d_x",   "d_y",   "c_B",        "ell",    "snr_r",
                                                      "snr_y", "s_x",   "s_y",   "sigma_r_sq", "mu_norm"};

std::size_t as_count(std::string_view name, double value) {
    if (!(value >= 1.0) || value != std::floor(value) || value > 1e9) {
        throw ValidationError(std::string(name) + " must be a positive integer, got " + format_shortest(value));
    }
    return static_cast<std::size_t>(value);
}

}  // namespace

std::string_view to_string(ObservationKind kind) {
    switch (kind) {
        case ObservationKind::orthonormal: return "orthonormal";
        case ObservationKind::target_ell: return "target_ell";
        case ObservationKind::normalized_rows: return "normalized_rows";
    }
    return "orthonormal";
}

std::string_view to_string(Scale scale) { return scale == Scale::desk ? "desk" : "paper"; }

ObservationKind parse_observation_kind(std::string_view text) {
    if (text == "orthonormal") return ObservationKind::orthonormal;
    if (text == "target_ell") return ObservationKind::target_ell;
    if (text == "normalized_rows") return ObservationKind::normalized_rows;
    throw ValidationError("unknown observation kind '" + std::string(text) + "'");
}

Scale parse_scale(std::string_view text) {
    if (text == "desk") return Scale::desk;
    if (text == "paper") return Scale::paper;
    throw ValidationError("unknown scale '" + std::string(text) + "' (expected desk or paper)");
}

std::span<const std::string_view> sweepable_parameters() { return kSweepable; }

void apply_parameter(ModelParams& p, std::string_view name, double value) {
    if (!std::isfinite(value)) throw ValidationError(std::string(name) + " must be finite");
    if (name == "N") p.arms = as_count(name, value);
    else if (name == "d_x") p.d_x = as_count(name, value);
    else if (name == "d_y") p.d_y = as_count(name, value);
    else if (name == "c_B") p.c_B = value;
    else if (name == "ell") p.ell = value;
    else if (name == "snr_r") p.snr_r = value;
    else if (name == "snr_y") p.snr_y = value;
    else if (name == "s_x") p.s_x = value;
    else if (name == "s_y") p.s_y = value;
    else if (name == "sigma_r_sq") p.sigma_r_sq = value;
    else if (name == "mu_norm") p.mu_norm = value;
    else throw ValidationError("unknown parameter '" + std::string(name) + "'");
}

void validate(const ModelParams& p) {
    if (p.arms < 1 || p.d_x < 1 || p.d_y < 1) throw ValidationError("N, d_x and d_y must be at least 1");
    if (!(p.sigma_r_sq > 0.0)) throw ValidationError("sigma_r_sq must be positive");
    if (!(p.s_x > 0.0)) throw ValidationError("s_x must be positive");
    if (!(p.s_y >= 0.0)) throw ValidationError("s_y must be nonnegative");
    if (!(p.c_B >= 0.0)) throw ValidationError("c_B must be nonnegative");
    if (p.mu_norm && !(*p.mu_norm > 0.0)) throw ValidationError("mu_norm must be positive");
    if (p.snr_r && !(*p.snr_r > 0.0)) throw ValidationError("snr_r must be positive");
    if (p.snr_y && !(*p.snr_y > 0.0)) throw ValidationError("snr_y must be positive");
    switch (p.observation) {
        case ObservationKind::orthonormal:
            if (p.d_y > p.d_x) throw ValidationError("orthonormal observation rows need d_y <= d_x");
            break;
        case ObservationKind::target_ell: {
            if (!p.ell) throw ValidationError("target_ell observations need an ell value");
            if (!(*p.ell > 0.0 && *p.ell <= 1.0)) throw ValidationError("ell must lie in (0, 1]");
            if (p.d_x < p.d_y + 1) throw ValidationError("target_ell observations need d_x >= d_y + 1");
            const double s_y = p.snr_y ? p.s_x / *p.snr_y : p.s_y;
            if (p.s_x != 1.0 || s_y != 1.0) {
                throw ValidationError("target_ell observations require identity covariances (s_x = s_y = 1)");
            }
            break;
        }
        case ObservationKind::normalized_rows: break;
    }
}

bool operator==(const Tolerances& a, const Tolerances& b) {
    return a.symmetry == b.symmetry && a.spd_pivot == b.spd_pivot && a.psd_clamp == b.psd_clamp &&
           a.rank_cutoff == b.rank_cutoff && a.zero_entry == b.zero_entry && a.gram_schmidt == b.gram_schmidt;
}

std::span<const std::string_view> preset_names() { return kPresetNames; }

ExperimentPreset preset(std::string_view name, Scale scale) {
    ExperimentPreset p;
    p.name = std::string(name);
    const bool desk = scale == Scale::desk;
    p.horizon = desk ? 2000 : 5000;
    p.scenarios = desk ? 20 : 50;

    if (name == "fig1_arms") {
        p.grid = {{"N", {5, 10, 20, 50}}};
    } else if (name == "fig2_estimability") {
        p.base.observation = ObservationKind::target_ell;
        p.base.ell = 1.0;
        p.grid = {{"ell", {0.25, 0.5, 0.75, 1.0}}, {"c_B", {0, 1, 10, 100}}};
    } else if (name == "fig3_snr") {
        const std::vector<double> levels =
            desk ? std::vector<double>{0.25, 1, 4} : std::vector<double>{0.25, 0.5, 1, 2, 4};
        p.grid = {{"snr_y", levels}, {"snr_r", levels}};
    } else if (name == "fig4_dimension") {
        p.base.d_x = 50;
        p.base.observation = ObservationKind::normalized_rows;
        p.grid = {{"d_y", desk ? std::vector<double>{5, 20, 100} : std::vector<double>{5, 20, 50, 100}}};
    } else if (name != "custom") {
        throw UnknownPreset("unknown preset '" + std::string(name) + "'");
    }
    return p;
}

std::string SweepPoint::key() const {
    std::string out;
    for (const auto& [name, value] : assignments) {
        if (!out.empty()) out += ';';
        out += name;
        out += '=';
        out += format_shortest(value);
    }
    return out;
}

std::vector<SweepPoint> expand_grid(const ExperimentPreset& preset) {
    std::vector<SweepPoint> points{SweepPoint{}};
    for (const SweepAxis& axis : preset.grid) {
        std::vector<SweepPoint> next;
        next.reserve(points.size() * axis.values.size());
        for (const SweepPoint& point : points) {
            for (double v : axis.values) {
                SweepPoint extended = point;
                extended.assignments.emplace_back(axis.name, v);
                next.push_back(std::move(extended));
            }
        }
        points = std::move(next);
    }
    return points;
}

ModelParams params_at(const ExperimentPreset& preset, const SweepPoint& point) {
    ModelParams params = preset.base;
    for (const auto& [name, value] : point.assignments) apply_parameter(params, name, value);
    return params;
}

void validate(const ExperimentPreset& preset) {
    if (preset.scenarios < 1) throw ValidationError("scenarios must be at least 1");
    if (preset.horizon < 1) throw ValidationError("horizon must be at least 1");
    for (const SweepAxis& axis : preset.grid) {
        if (axis.values.empty()) throw ValidationError("sweep axis '" + axis.name + "' has no values");
        if (std::find(kSweepable.begin(), kSweepable.end(), axis.name) == kSweepable.end()) {
            throw ValidationError("'" + axis.name + "' cannot be swept");
        }
    }
    for (std::size_t i = 0; i < preset.grid.size(); ++i) {
        for (std::size_t j = i + 1; j < preset.grid.size(); ++j) {
            if (preset.grid[i].name == preset.grid[j].name) {
                throw ValidationError("sweep axis '" + preset.grid[i].name + "' appears twice");
            }
        }
    }
    for (const SweepPoint& point : expand_grid(preset)) {
        try {
            validate(params_at(preset, point));
        } catch (const ValidationError& e) {
            throw ValidationError(point.assignments.empty() ? std::string(e.what())
                                                            : "at " + point.key() + ": " + e.what());
        }
    }
}

std::vector<ScenarioConfig> build_scenarios(const ExperimentPreset& preset, const SweepPoint& point) {
    const ModelParams p = params_at(preset, point);
    validate(p);
    const double mu_norm = p.mu_norm.value_or(std::sqrt(static_cast<double>(p.d_x)));
    const double s_y = p.snr_y ? p.s_x / *p.snr_y : p.s_y;

    std::vector<ScenarioConfig> configs;
    configs.reserve(preset.scenarios);
    for (std::size_t k = 0; k < preset.scenarios; ++k) {
        RngStream setup(preset.master_seed, kSetupStreamOffset + k);
        EnvironmentSpec spec;
        spec.d_x = p.d_x;
        spec.d_y = p.d_y;
        spec.arms = p.arms;
        if (p.fix_mu) {
            RngStream shared(preset.master_seed, kSharedMuStream);
            spec.mu_star = draw_mu_star(p.d_x, mu_norm, shared);
        } else {
            spec.mu_star = draw_mu_star(p.d_x, mu_norm, setup);
        }
        switch (p.observation) {
            case ObservationKind::orthonormal:
                spec.A = make_A_orthonormal(p.d_y, p.d_x, setup, preset.tolerances);
                break;
            case ObservationKind::target_ell:
                spec.A = make_A_with_estimability(spec.mu_star, *p.ell, p.d_y, p.d_x, setup, preset.tolerances);
                break;
            case ObservationKind::normalized_rows:
                spec.A = make_A_normalized_rows(p.d_y, p.d_x, setup);
                break;
        }
        const auto dx = static_cast<Eigen::Index>(p.d_x);
        const auto dy = static_cast<Eigen::Index>(p.d_y);
        spec.sigma_x = p.s_x * Matrix::Identity(dx, dx);
        spec.sigma_y = s_y * Matrix::Identity(dy, dy);
        spec.sigma_r_sq = p.snr_r ? spec.mu_star.dot(spec.sigma_x * spec.mu_star) / *p.snr_r : p.sigma_r_sq;

        ScenarioConfig config;
        config.spec = std::move(spec);
        config.c_B = p.c_B;
        config.horizon = preset.horizon;
        config.master_seed = preset.master_seed;
        config.scenario_id = k;
        config.tolerances = preset.tolerances;
        configs.push_back(std::move(config));
    }
    return configs;
}

std::vector<PointResult> run_points(const ExperimentPreset& preset, const TraceSink& sink) {
    validate(preset);
    std::vector<PointResult> results;
    for (const SweepPoint& point : expand_grid(preset)) {
        const std::vector<ScenarioConfig> configs = build_scenarios(preset, point);
        const std::vector<ScenarioTrace> traces = run_traces(configs, preset.threads);
        if (sink) sink(point, traces);
        results.push_back({point, aggregate(traces)});
    }
    return results;
}

ExperimentSummary run_experiment(const ExperimentPreset& preset, const std::filesystem::path& out_root) {
    validate(preset);
    ExperimentSummary summary;
    const std::filesystem::path dir = out_root / preset.name;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());
    summary.results_path = dir / "results.csv";
    summary.manifest_path = dir / "manifest.txt";

    {
        std::ofstream manifest(summary.manifest_path, std::ios::binary);
        if (!manifest) throw IoFailure("cannot write " + summary.manifest_path.string());
        manifest << to_config_text(preset);
        if (!manifest) throw IoFailure("write failed for " + summary.manifest_path.string());
    }

    std::ofstream csv(summary.results_path, std::ios::binary);
    if (!csv) throw IoFailure("cannot write " + summary.results_path.string());
    csv << kResultsHeader << '\n';
    summary.points = run_points(preset, [&](const SweepPoint& point, std::span<const ScenarioTrace> traces) {
        const std::string key = point.key();
        for (std::size_t k = 0; k < traces.size(); ++k) {
            summary.rows_written += write_trace_rows(csv, preset.name, key, k, traces[k]);
        }
        if (!csv) throw IoFailure("write failed for " + summary.results_path.string());
    });
    csv.flush();
    if (!csv) throw IoFailure("write failed for " + summary.results_path.string());
    return summary;
}

std::string to_config_text(const ExperimentPreset& preset) {
    std::ostringstream out;
    const ModelParams& b = preset.base;
    out << "# pobandit " << kVersion << " run manifest\n";
    out << "preset = " << preset.name << '\n';
    out << "T = " << preset.horizon << '\n';
    out << "scenarios = " << preset.scenarios << '\n';
    out << "seed = " << preset.master_seed << '\n';
    out << "d_x = " << b.d_x << '\n';
    out << "d_y = " << b.d_y << '\n';
    out << "N = " << b.arms << '\n';
    out << "sigma_r_sq = " << format_shortest(b.sigma_r_sq) << '\n';
    out << "s_x = " << format_shortest(b.s_x) << '\n';
    out << "s_y = " << format_shortest(b.s_y) << '\n';
    out << "c_B = " << format_shortest(b.c_B) << '\n';
    if (b.mu_norm) out << "mu_norm = " << format_shortest(*b.mu_norm) << '\n';
    if (b.ell) out << "ell = " << format_shortest(*b.ell) << '\n';
    if (b.snr_r) out << "snr_r = " << format_shortest(*b.snr_r) << '\n';
    if (b.snr_y) out << "snr_y = " << format_shortest(*b.snr_y) << '\n';
    out << "observation = " << to_string(b.observation) << '\n';
    out << "fix_mu = " << (b.fix_mu ? "true" : "false") << '\n';
    const Tolerances& tol = preset.tolerances;
    out << "tol.symmetry = " << format_shortest(tol.symmetry) << '\n';
    out << "tol.spd_pivot = " << format_shortest(tol.spd_pivot) << '\n';
    out << "tol.psd_clamp = " << format_shortest(tol.psd_clamp) << '\n';
    out << "tol.rank_cutoff = " << format_shortest(tol.rank_cutoff) << '\n';
    out << "tol.zero_entry = " << format_shortest(tol.zero_entry) << '\n';
    out << "tol.gram_schmidt = " << format_shortest(tol.gram_schmidt) << '\n';
    out << "sweep = none\n";
    for (const SweepAxis& axis : preset.grid) {
        for (double v : axis.values) out << "sweep." << axis.name << " = " << format_shortest(v) << '\n';
    }
    return out.str();
}

std::string describe(const ExperimentPreset& preset) {
    std::ostringstream out;
    const ModelParams& b = preset.base;
    out << "preset:      " << preset.name << '\n'
        << "horizon:     " << preset.horizon << '\n'
        << "scenarios:   " << preset.scenarios << '\n'
        << "seed:        " << preset.master_seed << '\n'
        << "defaults:    d_x=" << b.d_x << " d_y=" << b.d_y << " N=" << b.arms
        << " sigma_r_sq=" << format_shortest(b.sigma_r_sq) << " s_x=" << format_shortest(b.s_x)
        << " s_y=" << format_shortest(b.s_y) << " c_B=" << format_shortest(b.c_B) << '\n'
        << "observation: " << to_string(b.observation) << '\n';
    if (preset.grid.empty()) {
        out << "grid:        (single point)\n";
    } else {
        out << "grid:\n";
        for (const SweepAxis& axis : preset.grid) {
            out << "  " << axis.name << ':';
            for (double v : axis.values) out << ' ' << format_shortest(v);
            out << '\n';
        }
    }
    out << "points:      " << expand_grid(preset).size() << '\n';
    return out.str();
}

}  // namespace pobandit
