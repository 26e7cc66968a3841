// Config file grammar, one entry per line:
//
//   # comment                 (also allowed after a value)
//   key = value
//
// Scalar keys may appear once. `sweep.<param> = <value>` lines repeat to
// list an axis's values in order; an axis named here replaces the preset's
// axis of the same name, new axes are appended. `sweep = none` drops the
// preset's grid before any sweep.<param> lines are applied.
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pobandit/errors.hpp"
#include "pobandit/experiments.hpp"

namespace pobandit {

namespace {

struct Entry {
    int line = 0;
    std::string key;
    std::string value;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_real(const Entry& e) {
    double value = 0.0;
    const char* begin = e.value.data();
    const char* end = begin + e.value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) throw ParseError(e.line, e.key, "expected a number, got '" + e.value + "'");
    return value;
}

std::uint64_t to_u64(const Entry& e) {
    std::uint64_t value = 0;
    const char* begin = e.value.data();
    const char* end = begin + e.value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError(e.line, e.key, "expected a nonnegative integer, got '" + e.value + "'");
    }
    return value;
}

bool to_bool(const Entry& e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ParseError(e.line, e.key, "expected true or false, got '" + e.value + "'");
}

std::vector<Entry> tokenize(std::string_view text) {
    std::vector<Entry> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, std::string(line), "expected 'key = value'");
        Entry e{line_no, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1)))};
        if (e.key.empty()) throw ParseError(line_no, "", "missing key before '='");
        if (e.value.empty()) throw ParseError(line_no, e.key, "missing value");
        entries.push_back(std::move(e));
    }
    return entries;
}

const std::set<std::string, std::less<>> kScalarKeys{
    "preset", "scale",     "T",     "horizon", "scenarios", "seed",  "threads", "d_x",   "d_y",
    "N",      "sigma_r_sq", "s_x",  "s_y",     "c_B",       "mu_norm", "ell",   "snr_r", "snr_y",
    "observation", "fix_mu", "sweep", "tol.symmetry", "tol.spd_pivot", "tol.psd_clamp", "tol.rank_cutoff",
    "tol.zero_entry", "tol.gram_schmidt"};

double positive_tolerance(const Entry& e) {
    const double v = to_real(e);
    if (!(v > 0.0 && v < 1.0)) throw ValidationError(e.key + " must lie in (0, 1)");
    return v;
}

}  // namespace

ExperimentPreset parse_config_text(std::string_view text, const ConfigOverrides& overrides) {
    const std::vector<Entry> entries = tokenize(text);

    std::map<std::string, const Entry*, std::less<>> scalars;
    std::vector<std::pair<std::string, std::vector<double>>> sweeps;
    for (const Entry& e : entries) {
        if (e.key.rfind("sweep.", 0) == 0) {
            const std::string axis = e.key.substr(6);
            const auto& names = sweepable_parameters();
            if (std::find(names.begin(), names.end(), axis) == names.end()) {
                throw ParseError(e.line, e.key, "'" + axis + "' is not a sweepable parameter");
            }
            auto it = std::find_if(sweeps.begin(), sweeps.end(), [&](const auto& s) { return s.first == axis; });
            if (it == sweeps.end()) {
                sweeps.emplace_back(axis, std::vector<double>{});
                it = std::prev(sweeps.end());
            }
            it->second.push_back(to_real(e));
            continue;
        }
        if (!kScalarKeys.contains(e.key)) throw ParseError(e.line, e.key, "unknown key");
        std::string canonical = e.key == "horizon" ? "T" : e.key;
        if (!scalars.emplace(canonical, &e).second) throw ParseError(e.line, e.key, "key given more than once");
    }

    auto find = [&](std::string_view key) -> const Entry* {
        const auto it = scalars.find(key);
        return it == scalars.end() ? nullptr : it->second;
    };

    Scale scale = Scale::paper;
    if (overrides.scale) {
        scale = *overrides.scale;
    } else if (const Entry* e = find("scale")) {
        try {
            scale = parse_scale(e->value);
        } catch (const ValidationError& err) {
            throw ParseError(e->line, e->key, err.what());
        }
    }

    std::string name = "custom";
    if (const Entry* e = find("preset")) name = e->value;
    ExperimentPreset p = preset(name, scale);

    if (const Entry* e = find("T")) p.horizon = static_cast<std::size_t>(to_u64(*e));
    if (const Entry* e = find("scenarios")) p.scenarios = static_cast<std::size_t>(to_u64(*e));
    if (const Entry* e = find("seed")) p.master_seed = to_u64(*e);
    if (const Entry* e = find("threads")) p.threads = static_cast<unsigned>(to_u64(*e));

    for (std::string_view key : sweepable_parameters()) {
        if (const Entry* e = find(key)) apply_parameter(p.base, key, to_real(*e));
    }
    if (const Entry* e = find("observation")) {
        try {
            p.base.observation = parse_observation_kind(e->value);
        } catch (const ValidationError& err) {
            throw ParseError(e->line, e->key, err.what());
        }
    }
    if (const Entry* e = find("fix_mu")) p.base.fix_mu = to_bool(*e);

    if (const Entry* e = find("tol.symmetry")) p.tolerances.symmetry = positive_tolerance(*e);
    if (const Entry* e = find("tol.spd_pivot")) p.tolerances.spd_pivot = positive_tolerance(*e);
    if (const Entry* e = find("tol.psd_clamp")) p.tolerances.psd_clamp = positive_tolerance(*e);
    if (const Entry* e = find("tol.rank_cutoff")) p.tolerances.rank_cutoff = positive_tolerance(*e);
    if (const Entry* e = find("tol.zero_entry")) p.tolerances.zero_entry = positive_tolerance(*e);
    if (const Entry* e = find("tol.gram_schmidt")) p.tolerances.gram_schmidt = positive_tolerance(*e);

    if (const Entry* e = find("sweep")) {
        if (e->value != "none") throw ParseError(e->line, e->key, "only 'sweep = none' is allowed");
        p.grid.clear();
    }
    for (auto& [axis, values] : sweeps) {
        auto it = std::find_if(p.grid.begin(), p.grid.end(), [&](const SweepAxis& a) { return a.name == axis; });
        if (it != p.grid.end()) {
            it->values = std::move(values);
        } else {
            p.grid.push_back({axis, std::move(values)});
        }
    }

    validate(p);
    return p;
}

ExperimentPreset parse_config(const std::filesystem::path& file, const ConfigOverrides& overrides) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoFailure("cannot open config file " + file.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), overrides);
}

}  // namespace pobandit
