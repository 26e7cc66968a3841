#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pobandit/simulator.hpp"

namespace pobandit {

// Column order of results.csv. Floating-point cells carry 17 significant
// digits; chosen_arm is 1-based; norm_regret is empty at t = 1.
inline constexpr std::string_view kResultsHeader =
    "experiment,sweep_point,scenario_id,t,chosen_arm,regret_increment,cum_regret,norm_regret,eta_err,mu_err,"
    "cum_reward";

struct ResultRow {
    std::string experiment;
    std::string sweep_point;
    std::uint64_t scenario_id = 0;
    std::size_t t = 0;
    std::size_t chosen_arm = 0;
    double regret_increment = 0.0;
    double cum_regret = 0.0;
    std::optional<double> norm_regret;
    double eta_err = 0.0;
    double mu_err = 0.0;
    double cum_reward = 0.0;

    bool operator==(const ResultRow&) const = default;
};

/// 17 significant digits, printf %.17g style.
std::string format_real(double value);

/// Shortest text that parses back to the same double.
std::string format_shortest(double value);

void write_row(std::ostream& out, const ResultRow& row);

/// Appends one row per step of the trace.
std::size_t write_trace_rows(std::ostream& out, std::string_view experiment, std::string_view sweep_point,
                             std::uint64_t scenario_id, const ScenarioTrace& trace);

ResultRow parse_row(std::string_view line);

/// Reads a results file, checking the header. Throws ParseError on malformed
/// rows and IoFailure when the file cannot be opened.
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

}  // namespace pobandit
