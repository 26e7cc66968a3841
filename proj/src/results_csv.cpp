#include "pobandit/results_csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <system_error>

#include "pobandit/errors.hpp"

namespace pobandit {

namespace {

constexpr int kColumns = 11;

template <class T>
T parse_number(std::string_view text, int line, const char* field) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError(line, field, "not a number: '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

std::string format_real(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

std::string format_shortest(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_row(std::ostream& out, const ResultRow& row) {
    out << row.experiment << ',' << row.sweep_point << ',' << row.scenario_id << ',' << row.t << ','
        << row.chosen_arm << ',' << format_real(row.regret_increment) << ',' << format_real(row.cum_regret) << ',';
    if (row.norm_regret) out << format_real(*row.norm_regret);
    out << ',' << format_real(row.eta_err) << ',' << format_real(row.mu_err) << ',' << format_real(row.cum_reward)
        << '\n';
}

std::size_t write_trace_rows(std::ostream& out, std::string_view experiment, std::string_view sweep_point,
                             std::uint64_t scenario_id, const ScenarioTrace& trace) {
    ResultRow row;
    row.experiment = experiment;
    row.sweep_point = sweep_point;
    row.scenario_id = scenario_id;
    for (std::size_t i = 0; i < trace.horizon(); ++i) {
        row.t = i + 1;
        row.chosen_arm = trace.chosen_arm[i] + 1;
        row.regret_increment = trace.regret_increment[i];
        row.cum_regret = trace.cum_regret[i];
        row.norm_regret = row.t >= 2 ? std::optional(normalized_regret(trace, row.t)) : std::nullopt;
        row.eta_err = trace.eta_err[i];
        row.mu_err = trace.mu_err[i];
        row.cum_reward = trace.cum_reward[i];
        write_row(out, row);
    }
    return trace.horizon();
}

ResultRow parse_row(std::string_view line) { 
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (cells.size() != kColumns) {
        throw ParseError(0, "row", "expected " + std::to_string(kColumns) + " columns, got " +
                                       std::to_string(cells.size()));
    }
    ResultRow row;
    row.experiment = cells[0];
    row.sweep_point = cells[1];
    row.scenario_id = parse_number<std::uint64_t>(cells[2], 0, "scenario_id");
    row.t = parse_number<std::size_t>(cells[3], 0, "t");
    row.chosen_arm = parse_number<std::size_t>(cells[4], 0, "chosen_arm");
    row.regret_increment = parse_number<double>(cells[5], 0, "regret_increment");
    row.cum_regret = parse_number<double>(cells[6], 0, "cum_regret");
    if (!cells[7].empty()) row.norm_regret = parse_number<double>(cells[7], 0, "norm_regret");
    row.eta_err = parse_number<double>(cells[8], 0, "eta_err");
    row.mu_err = parse_number<double>(cells[9], 0, "mu_err");
    row.cum_reward = parse_number<double>(cells[10], 0, "cum_reward");
    return row;
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kResultsHeader) {
        throw ParseError(1, "header", "results header does not match the expected schema");
    }
    std::vector<ResultRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            rows.push_back(parse_row(line));
        } catch (const ParseError& e) {
            throw ParseError(line_no, e.field(), e.what());
        }
    }
    return rows;
}

}  // namespace pobandit
