#include "doubletscope/cli_io.hpp"

#include "doubletscope/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace doubletscope {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(std::string_view key, const std::string& why)
{
    throw ConfigError(ExitCode::data, "config key '" + std::string(key) + "': " + why);
}

double parse_real(std::string_view key, std::string_view value)
{
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out))
        bad(key, "expected a finite real number, got '" + std::string(value) + "'");
    return out;
}

std::int64_t parse_integer(std::string_view key, std::string_view value)
{
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        bad(key, "expected an integer, got '" + std::string(value) + "'");
    return out;
}

int parse_int(std::string_view key, std::string_view value)
{
    const std::int64_t v = parse_integer(key, value);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        bad(key, "integer out of range");
    return static_cast<int>(v);
}

Rational parse_rational(std::string_view key, std::string_view value)
{
    const auto slash = value.find('/');
    const std::int64_t num = parse_integer(key, trim(value.substr(0, slash)));
    std::int64_t den = 1;
    if (slash != std::string_view::npos)
        den = parse_integer(key, trim(value.substr(slash + 1)));
    if (den <= 0)
        bad(key, "denominator must be a positive integer");
    return Rational(num, den);
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table{
        {"gamma", [](RunConfig& c, auto k, auto v) { c.system.gamma = parse_real(k, v); }},
        {"L_pi", [](RunConfig& c, auto k, auto v) { c.system.length_pi = parse_rational(k, v); }},
        {"d_pi", [](RunConfig& c, auto k, auto v) { c.system.distance_pi = parse_rational(k, v); }},
        {"epsilon", [](RunConfig& c, auto k, auto v) { c.system.epsilon = parse_real(k, v); }},
        {"K", [](RunConfig& c, auto k, auto v) { c.system.cutoff = parse_int(k, v); }},
        {"n_grid", [](RunConfig& c, auto k, auto v) { c.n_grid = parse_int(k, v); }},
        {"epsilon_min", [](RunConfig& c, auto k, auto v) { c.epsilon_min = parse_real(k, v); }},
        {"epsilon_max", [](RunConfig& c, auto k, auto v) { c.epsilon_max = parse_real(k, v); }},
        {"epsilon_steps", [](RunConfig& c, auto k, auto v) { c.epsilon_steps = parse_int(k, v); }},
        {"output_dir", [](RunConfig& c, auto k, auto v) {
             if (v.empty())
                 bad(k, "must not be empty");
             c.output_dir = std::string(v);
         }},
        {"deflation_threshold", [](RunConfig& c, auto k, auto v) { c.deflation_threshold = parse_real(k, v); }},
        {"quasi_degeneracy_ratio", [](RunConfig& c, auto k, auto v) { c.quasi_degeneracy_ratio = parse_real(k, v); }},
        {"quasi_degeneracy_max_halfwidth",
         [](RunConfig& c, auto k, auto v) { c.quasi_degeneracy_max_halfwidth = parse_real(k, v); }},
        {"fit_halfwidth", [](RunConfig& c, auto k, auto v) { c.fit_halfwidth = parse_real(k, v); }},
        {"fit_points", [](RunConfig& c, auto k, auto v) { c.fit_points = parse_int(k, v); }},
        {"crossing_min", [](RunConfig& c, auto k, auto v) { c.crossing_min = parse_real(k, v); }},
        {"crossing_max", [](RunConfig& c, auto k, auto v) { c.crossing_max = parse_real(k, v); }},
    };
    return table;
}

} // namespace

ScanOptions RunConfig::scan_options() const
{
    ScanOptions o;
    o.n_grid = n_grid;
    o.fit_halfwidth = fit_halfwidth;
    o.fit_points = fit_points;
    o.quasi_degeneracy_ratio = quasi_degeneracy_ratio;
    o.quasi_degeneracy_max_halfwidth = quasi_degeneracy_max_halfwidth;
    return o;
}

std::vector<double> RunConfig::epsilon_grid() const
{
    std::vector<double> grid(static_cast<std::size_t>(epsilon_steps));
    const int n = epsilon_steps - 1;
    for (int i = 0; i <= n; ++i) {
        // Rounded to 15 significant digits so that nominal grid values such as 1.008
        // come out as the nearest double rather than a few ulps off it.
        const double raw = (epsilon_min * (n - i) + epsilon_max * i) / n;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.15g", raw);
        grid[static_cast<std::size_t>(i)] = std::strtod(buf, nullptr);
    }
    grid.front() = epsilon_min;
    grid.back() = epsilon_max;
    return grid;
}

std::pair<double, double> RunConfig::crossing_bracket() const
{
    const double centre = fundamental_double_point(system).energy;
    return {crossing_min.value_or(centre - 1e-3), crossing_max.value_or(centre + 1e-3)};
}

void validate_config(const RunConfig& c)
{
    const SystemParams& s = c.system;
    if (!(s.gamma > 0.0))
        bad("gamma", "must be positive");
    if (!(s.epsilon > 0.0))
        bad("epsilon", "must be positive");
    if (s.cutoff < 1)
        bad("K", "must be at least 1");
    if (s.length_pi <= 0)
        bad("L_pi", "must be positive");
    if (s.distance_pi <= 0 || s.distance_pi >= s.length_pi)
        bad("d_pi", "must satisfy 0 < d_pi < L_pi");
    if (s.distance_pi * 2 == s.length_pi)
        bad("d_pi", "d = L/2 is excluded (doubly symmetric configuration)");
    if (!(c.epsilon_min > 0.0))
        bad("epsilon_min", "must be positive");
    if (!(c.epsilon_min < c.epsilon_max))
        bad("epsilon_max", "must exceed epsilon_min");
    const double omega_k = mode_frequency(s, s.cutoff);
    for (const auto& [key, e] : {std::pair<const char*, double>{"epsilon", s.epsilon}, {"epsilon_max", c.epsilon_max}})
        if (omega_k < 2.0 * e)
            bad("K", "cutoff too small: omega_K = " + format_number(omega_k) + " must be at least 2*" + key);
    if (c.epsilon_steps < 2)
        bad("epsilon_steps", "must be at least 2");
    if (c.n_grid < 2 * s.cutoff)
        bad("n_grid", "must be at least 2K = " + std::to_string(2 * s.cutoff));
    if (!(c.deflation_threshold > 0.0 && c.deflation_threshold < 1.0))
        bad("deflation_threshold", "must lie in (0, 1)");
    if (!(c.quasi_degeneracy_ratio > 0.0))
        bad("quasi_degeneracy_ratio", "must be positive");
    if (!(c.quasi_degeneracy_max_halfwidth >= 0.0))
        bad("quasi_degeneracy_max_halfwidth", "must be non-negative");
    if (!(c.fit_halfwidth > 0.0))
        bad("fit_halfwidth", "must be positive");
    if (c.fit_points < 2)
        bad("fit_points", "must be at least 2");
    if (c.crossing_min.has_value() != c.crossing_max.has_value())
        bad(c.crossing_min ? "crossing_max" : "crossing_min", "crossing_min and crossing_max must be given together");
    if (c.crossing_min && !(*c.crossing_min > 0.0 && *c.crossing_min < *c.crossing_max))
        bad("crossing_max", "must exceed crossing_min > 0");
    try {
        validate(s);
    } catch (const InvalidArgument& e) {
        throw ConfigError(ExitCode::data, std::string("invalid configuration: ") + e.what());
    }
}

RunConfig parse_config_text(std::string_view text, std::string_view source)
{
    RunConfig config;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string where = std::string(source) + ":" + std::to_string(line_no);
        if (eq == std::string_view::npos)
            throw ConfigError(ExitCode::data, where + ": expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError(ExitCode::data, where + ": unknown config key '" + std::string(key) + "'");
        if (!seen.insert(std::string(key)).second)
            throw ConfigError(ExitCode::data, where + ": config key '" + std::string(key) + "' given twice");
        try {
            it->second(config, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(ExitCode::data, where + ": " + e.what());
        }
    }
    validate_config(config);
    return config;
}

RunConfig parse_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(ExitCode::usage, "cannot open config file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.string());
}

} // namespace doubletscope
