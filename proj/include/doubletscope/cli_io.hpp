#pragma once

// Configuration files, output formats and the doubletscope command line.
//
// Config format: UTF-8 text, one `key = value` per line, `#` starts a comment.
// L_pi and d_pi are exact multiples of pi, written as an integer or "n/d".

#include "doubletscope/doublet_scan.hpp"
#include "doubletscope/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace doubletscope {

struct RunConfig {
    SystemParams system;
    int n_grid = 4096;
    double epsilon_min = 1.005;
    double epsilon_max = 1.030;
    int epsilon_steps = 501;
    std::filesystem::path output_dir = ".";
    double deflation_threshold = 1e-14;   // only consulted for non-rational d/L
    double quasi_degeneracy_ratio = 10.0;
    double quasi_degeneracy_max_halfwidth = 5e-3;
    double fit_halfwidth = 1e-3;
    int fit_points = 21;
    // Crossing bracket; defaults to the fundamental double-point energy +- 1e-3.
    std::optional<double> crossing_min;
    std::optional<double> crossing_max;

    ScanOptions scan_options() const;
    std::vector<double> epsilon_grid() const;
    std::pair<double, double> crossing_bracket() const;
};

// Throws ConfigError with ExitCode::data naming the offending key. `source` names the
// input in messages.
RunConfig parse_config_text(std::string_view text, std::string_view source = "<config>");

// As above; a missing or unreadable file is ExitCode::usage.
RunConfig parse_config(const std::filesystem::path& path);

// All RunConfig invariants beyond SystemParams; throws ConfigError(data).
void validate_config(const RunConfig& config);

// Shortest round-trip decimal form; empty for NaN.
std::string format_number(double value);

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows);
void write_doublet_report(std::ostream& out, const DoubletReport& report);

// Entry point of the doubletscope executable. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace doubletscope
