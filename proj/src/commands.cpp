#include "doubletscope/cli_io.hpp"

#include "doubletscope/eigensolver.hpp"
#include "doubletscope/errors.hpp"
#include "doubletscope/observables.hpp"
#include "svg.hpp"
#include "writers.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace doubletscope {

namespace {

namespace fs = std::filesystem;

constexpr const char* sym_color = "#1f4e9c";
constexpr const char* anti_color = "#c0392b";
constexpr const char* neighbor_color = "#7f7f7f";
constexpr const char* emitter_color = "#f39c12";

// Outputs are staged in memory and written together at the end of a command, so a
// failing computation leaves nothing behind. A failed write removes what was written.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    std::ostringstream& add(const std::string& name)
    {
        files_.emplace_back(dir_ / name, std::ostringstream{});
        return files_.back().second;
    }

    std::vector<fs::path> commit()
    {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec)
            throw ConfigError(ExitCode::data, "cannot create output directory '" + dir_.string() + "': " + ec.message());
        std::vector<fs::path> written;
        for (const auto& [path, content] : files_) {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            written.push_back(path);
            const std::string data = content.str();
            if (out)
                out.write(data.data(), static_cast<std::streamsize>(data.size()));
            out.close();
            if (!out) {
                for (const fs::path& p : written)
                    fs::remove(p, ec);
                throw ConfigError(ExitCode::data, "cannot write output file '" + path.string() + "'");
            }
        }
        return written;
    }

private:
    fs::path dir_;
    std::vector<std::pair<fs::path, std::ostringstream>> files_;
};

void report_written(std::ostream& out, const std::vector<fs::path>& files)
{
    for (const fs::path& f : files)
        out << "wrote " << f.string() << '\n';
}

SystemParams at_epsilon(const RunConfig& config, double epsilon)
{
    SystemParams p = config.system;
    p.epsilon = epsilon;
    return p;
}

std::string resonance_label(Branch branch, int index)
{
    return (branch == Branch::Short ? "E" : "E~") + std::to_string(index);
}

int cmd_spectrum(const RunConfig& config, std::ostream& out)
{
    const SystemParams& p = config.system;
    const ArrowheadSector sym = build_sector(p, SectorLabel::Symmetric);
    const ArrowheadSector anti = build_sector(p, SectorLabel::Antisymmetric);

    std::vector<SpectrumEntry> entries;
    for (const ArrowheadSector* s : {&sym, &anti}) {
        for (const EigenPair& pair : solve_all(*s))
            entries.push_back({pair.energy, s->label(), pair.emitter_probability(), false, pair.root_index});
        for (const DeflatedMode& d : s->deflated())
            entries.push_back({d.omega, s->label(), 0.0, true, static_cast<std::size_t>(d.mode)});
    }
    std::sort(entries.begin(), entries.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
        if (a.energy != b.energy)
            return a.energy < b.energy;
        return a.sector < b.sector;
    });

    OutputSet files(config.output_dir);
    write_spectrum_csv(files.add("spectrum.csv"), entries);
    write_modes_csv(files.add("modes.csv"), sym, anti, p);
    out << "epsilon = " << format_number(p.epsilon) << ": " << entries.size() << " eigenvalues (dimension "
        << p.full_dimension() << ")\n";
    report_written(out, files.commit());
    return 0;
}

void scan_svg(std::ostream& os, const RunConfig& config, const AnnotatedScan& scan, const ResonanceLadder& ladder)
{
    SvgPlot plot("Energy of the highest-P_e eigenstates, d/L = " +
                     std::to_string(config.system.distance_ratio().numerator()) + "/" +
                     std::to_string(config.system.distance_ratio().denominator()),
                 "epsilon", "E");
    for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric}) {
        std::vector<Point> pts;
        for (std::size_t i = 0; i < scan.rows.size(); ++i) {
            const BestState& b = scan.rows[i].best(label);
            // A jump to another eigenvalue branch is drawn as a gap.
            if (i > 0 && scan.rows[i - 1].best(label).root_index != b.root_index)
                pts.push_back({NAN, NAN});
            pts.push_back({scan.rows[i].epsilon, b.energy});
        }
        plot.add_line(std::move(pts), label == SectorLabel::Symmetric ? sym_color : anti_color, Dash::solid,
                      label == SectorLabel::Symmetric ? "symmetric" : "antisymmetric");
    }
    for (const LadderEntry& e : ladder.entries) {
        const auto dp = std::find_if(ladder.double_points.begin(), ladder.double_points.end(), [&](const DoublePoint& d) {
            return e.branch == Branch::Short ? d.nu == e.index : d.nu_prime == e.index;
        });
        if (dp == ladder.double_points.end())
            plot.add_hline(e.energy, "black", e.branch == Branch::Short ? Dash::dashed : Dash::dot_dashed,
                           resonance_label(e.branch, e.index));
        else if (e.branch == Branch::Short)
            plot.add_hline(e.energy, "black", Dash::dashed,
                           "E" + std::to_string(dp->nu) + "=E~" + std::to_string(dp->nu_prime));
    }
    plot.write(os);
}

int cmd_scan(const RunConfig& config, std::ostream& out)
{
    const std::vector<double> grid = config.epsilon_grid();
    std::vector<ScanRow> rows = sweep(config.system, grid, config.scan_options());

    double e_lo = rows.front().symmetric.energy;
    double e_hi = e_lo;
    for (const ScanRow& r : rows) {
        e_lo = std::min({e_lo, r.symmetric.energy, r.antisymmetric.energy});
        e_hi = std::max({e_hi, r.symmetric.energy, r.antisymmetric.energy});
    }
    const ResonanceLadder ladder = resonances_in_window(config.system, e_lo, e_hi);
    const AnnotatedScan scan = classify_resonances(std::move(rows), ladder);

    OutputSet files(config.output_dir);
    write_scan_csv(files.add("scan.csv"), scan.rows);
    scan_svg(files.add("scan.svg"), config, scan, ladder);

    out << scan.rows.size() << " rows, " << scan.crossings.size() << " resonance crossings\n";
    for (const ResonanceCrossing& c : scan.crossings) {
        out << "  epsilon = " << format_number(scan.rows[c.row].epsilon) << "  " << to_string(c.sector) << " crosses ";
        if (c.double_point)
            out << "E" << c.index << "=E~" << c.partner_index;
        else
            out << resonance_label(c.branch, c.index);
        out << " = " << format_number(c.energy) << (c.compatible ? "" : "  (parity mismatch)")
            << (c.continuous ? "" : "  (branch jump)") << '\n';
    }
    report_written(out, files.commit());
    return 0;
}

void doublet_svg(std::ostream& os, const DoubletReport& r)
{
    SvgPlot plot("Doublet near the (" + std::to_string(r.nu) + ", " + std::to_string(r.nu_prime) +
                     ") double resonance",
                 "epsilon", "E");
    std::vector<Point> sym, anti, below, above;
    for (const DoubletSample& s : r.quasi_samples) {
        sym.push_back({s.epsilon, s.e_symmetric});
        anti.push_back({s.epsilon, s.e_antisymmetric});
        below.push_back({s.epsilon, s.below});
        above.push_back({s.epsilon, s.above});
    }
    plot.add_line(std::move(sym), sym_color, Dash::solid, "symmetric");
    plot.add_line(std::move(anti), anti_color, Dash::solid, "antisymmetric");
    plot.add_line(std::move(below), neighbor_color, Dash::solid, "neighbors");
    plot.add_line(std::move(above), neighbor_color, Dash::solid);
    const double h = r.fit_halfwidth;
    plot.add_line({{r.epsilon_bar - h, r.energy_cross - r.slope_symmetric * h},
                   {r.epsilon_bar + h, r.energy_cross + r.slope_symmetric * h}},
                  sym_color, Dash::dashed, "linear fit");
    plot.add_line({{r.epsilon_bar - h, r.energy_cross - r.slope_antisymmetric * h},
                   {r.epsilon_bar + h, r.energy_cross + r.slope_antisymmetric * h}},
                  anti_color, Dash::dashed);
    plot.add_hline(r.resonance_energy, "black", Dash::dotted,
                   "E" + std::to_string(r.nu) + "=E~" + std::to_string(r.nu_prime));
    plot.add_marker({r.epsilon_bar, r.energy_cross}, "black");

    // Zoom on the doublet: the neighbors stay visible only when they are close.
    double lo = r.energy_cross;
    double hi = r.energy_cross;
    for (const DoubletSample& s : r.quasi_samples) {
        lo = std::min({lo, s.e_symmetric, s.e_antisymmetric});
        hi = std::max({hi, s.e_symmetric, s.e_antisymmetric});
    }
    const double pad = 0.5 * (hi - lo);
    plot.set_y_range(lo - pad, hi + pad);
    plot.write(os);
}

int cmd_doublet(const RunConfig& config, std::ostream& out)
{
    const auto [lo, hi] = config.crossing_bracket();
    const ScanOptions options = config.scan_options();
    const Crossing crossing = find_crossing(config.system, lo, hi, {SectorLabel::Symmetric, SectorLabel::Antisymmetric},
                                            options);
    const DoubletReport report = fit_doublet(config.system, crossing, options);

    OutputSet files(config.output_dir);
    write_doublet_report(files.add("doublet.txt"), report);
    doublet_svg(files.add("doublet.svg"), report);
    std::ostringstream& samples = files.add("doublet_samples.csv");
    samples << "epsilon,E_sym,E_anti,E_below,E_above,neighbor_gap\n";
    for (const DoubletSample& s : report.quasi_samples)
        samples << format_number(s.epsilon) << ',' << format_number(s.e_symmetric) << ','
                << format_number(s.e_antisymmetric) << ',' << format_number(s.below) << ','
                << format_number(s.above) << ',' << format_number(s.neighbor_gap) << '\n';

    write_doublet_report(out, report);
    if (report.nonlinear_warning)
        out << "warning: fit residual exceeds 1e-3 of the fitted energy span; the doublet is not linear over the fit window\n";
    if (report.branch_switch_warning)
        out << "warning: a tracked branch stops being the highest-P_e state inside the fit window\n";
    report_written(out, files.commit());
    return 0;
}

void amplitude_svg(std::ostream& os, const AmplitudeProfile& profile, const SystemParams& p, SectorLabel label,
                   double pe, std::optional<double> confinement)
{
    std::ostringstream title;
    title.precision(6);
    title << (label == SectorLabel::Symmetric ? "Symmetric" : "Antisymmetric") << " state E = "
          << profile.energy << ", P_e = " << pe;
    if (confinement)
        title << ", short-path share = " << *confinement;
    SvgPlot plot(title.str(), "x", "|zeta(x)|");
    std::vector<Point> pts;
    pts.reserve(profile.grid.size() + 1);
    for (std::size_t j = 0; j < profile.grid.size(); ++j)
        pts.push_back({profile.grid[j], std::abs(profile.values[j])});
    pts.push_back({profile.length, std::abs(profile.values.front())});
    plot.add_line(std::move(pts), label == SectorLabel::Symmetric ? sym_color : anti_color);
    plot.add_marker({0.0, 0.0}, emitter_color, "x1");
    plot.add_marker({p.distance(), 0.0}, emitter_color, "x2");
    plot.write(os);
}

int cmd_amplitude(const RunConfig& config, int rank, std::ostream& out)
{
    const SystemParams& p = config.system;
    const LocalSpectrum spec = local_spectrum(p, config.scan_options());

    OutputSet files(config.output_dir);
    for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric}) {
        std::vector<EigenPair> ranked = spec.pairs(label);
        std::stable_sort(ranked.begin(), ranked.end(), [](const EigenPair& a, const EigenPair& b) {
            return a.emitter_probability() > b.emitter_probability();
        });
        if (rank > static_cast<int>(ranked.size()))
            throw InvalidArgument("--rank " + std::to_string(rank) + " exceeds the " + std::to_string(ranked.size()) +
                                  " " + std::string(to_string(label)) + " states in the spectral window");
        const EigenPair& pair = ranked[static_cast<std::size_t>(rank - 1)];
        const SingleExcitationState state = make_state(pair, spec.sector(label), p);
        const AmplitudeProfile profile = photon_amplitude(state, p, config.n_grid);
        const auto confinement = confinement_ratio(profile, p);
        const std::string stem = "amplitude_" + std::string(to_string(label));
        write_amplitude_csv(files.add(stem + ".csv"), profile);
        amplitude_svg(files.add(stem + ".svg"), profile, p, label, pair.emitter_probability(), confinement);
        out << to_string(label) << ": E = " << format_number(pair.energy)
            << "  P_e = " << format_number(pair.emitter_probability())
            << "  confinement = " << (confinement ? format_number(*confinement) : "n/a") << '\n';
    }
    report_written(out, files.commit());
    return 0;
}

class Checklist {
public:
    explicit Checklist(std::ostream& out) : out_(out) {}
    void check(bool ok, const std::string& name, const std::string& detail)
    {
        out_ << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
        failed_ = failed_ || !ok;
    }
    bool failed() const { return failed_; }

private:
    std::ostream& out_;
    bool failed_ = false;
};

std::string sci(double v)
{
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

// Copy of the system with a cutoff small enough for the dense oracle.
SystemParams oracle_params(const SystemParams& p)
{
    constexpr int oracle_cutoff = 200;
    SystemParams q = p;
    q.cutoff = std::min(p.cutoff, oracle_cutoff);
    while (q.cutoff < p.cutoff && mode_frequency(q, q.cutoff) < 2.0 * q.epsilon)
        q.cutoff = std::min(p.cutoff, 2 * q.cutoff);
    return q;
}

int cmd_validate(const RunConfig& config, std::ostream& out)
{
    const auto start = std::chrono::steady_clock::now();
    const SystemParams& p = config.system;
    Checklist list(out);

    // Dense oracle on a reduced cutoff.
    const SystemParams q = oracle_params(p);
    for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric}) {
        const ArrowheadSector s = build_sector(q, label);
        const auto fast = solve_all(s);
        const auto dense = dense_oracle(s);
        double norm = 0.0;
        for (const EigenPair& e : dense)
            norm = std::max(norm, std::abs(e.energy));
        double worst = 0.0;
        for (std::size_t i = 0; i < fast.size(); ++i)
            worst = std::max(worst, std::abs(fast[i].energy - dense[i].energy));
        list.check(fast.size() == dense.size() && worst <= 1e-12 * norm,
                   std::string("dense oracle (") + std::string(to_string(label)) + ", K = " + std::to_string(q.cutoff) + ")",
                   "max |dE| = " + sci(worst) + ", bound " + sci(1e-12 * norm));

        double ortho = 0.0;
        for (std::size_t i = 0; i < fast.size(); ++i) {
            for (std::size_t j = i; j < fast.size(); ++j) {
                double dot = fast[i].apex_amplitude * fast[j].apex_amplitude;
                for (std::size_t k = 0; k < fast[i].mode_amplitudes.size(); ++k)
                    dot += fast[i].mode_amplitudes[k] * fast[j].mode_amplitudes[k];
                ortho = std::max(ortho, std::abs(dot - (i == j ? 1.0 : 0.0)));
            }
        }
        list.check(ortho <= 1e-10, std::string("orthonormality (") + std::string(to_string(label)) + ")",
                   "max |V^T V - I| = " + sci(ortho));
    }

    // Full cutoff: sector residuals, interlacing, physical-basis residuals, completeness.
    std::size_t count = 0;
    double worst_sector = 0.0;
    double worst_full = 0.0;
    bool interlaced = true;
    for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric}) {
        const ArrowheadSector s = build_sector(p, label);
        const auto pairs = solve_all(s);
        const auto poles = s.poles();
        count += pairs.size() + s.deflated().size();
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            const EigenPair& e = pairs[j];
            worst_sector = std::max(worst_sector, sector_residual(s, e) / std::max(1.0, std::abs(e.energy)));
            if ((j > 0 && !(e.energy > poles[j - 1].omega)) || (j < poles.size() && !(e.energy < poles[j].omega)))
                interlaced = false;
            worst_full = std::max(worst_full, full_residual(p, embed_full(e, s, p), e.energy));
        }
        for (const DeflatedMode& d : s.deflated())
            worst_full = std::max(worst_full, full_residual(p, embed_deflated(d, s, p), d.omega));
    }
    list.check(worst_sector <= 1e-12, "sector residuals", "max ||Mv - Ev|| / max(1,|E|) = " + sci(worst_sector));
    list.check(interlaced, "strict interlacing", interlaced ? "every root strictly between its poles" : "violated");
    list.check(worst_full <= 1e-12, "physical-basis residuals", "max ||Hv - Ev|| = " + sci(worst_full));
    list.check(count == p.full_dimension(), "completeness",
               std::to_string(count) + " eigenvectors for dimension " + std::to_string(p.full_dimension()));

    // Observables of the highest-P_e states.
    const ScanOptions options = config.scan_options();
    const LocalSpectrum spec = local_spectrum(p, options);
    for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric}) {
        const EigenPair& best = spec.best(label);
        const SingleExcitationState state = make_state(best, spec.sector(label), p);
        const double weight = photon_weight(photon_amplitude(state, p, config.n_grid));
        const double expected = 1.0 - best.emitter_probability();
        const double rel = std::abs(weight - expected) / std::max(expected, 1e-300);
        list.check(rel <= 1e-6, std::string("Parseval (") + std::string(to_string(label)) + ")",
                   "relative error " + sci(rel));

        constexpr double step = 1e-7;
        const auto energy_at = [&](double eps) {
            return solve_one(build_sector(at_epsilon(config, eps), label), best.root_index).energy;
        };
        const double slope = (energy_at(p.epsilon + step) - energy_at(p.epsilon - step)) / (2.0 * step);
        const double diff = std::abs(slope - best.emitter_probability());
        list.check(diff <= 1e-5, std::string("Hellmann-Feynman (") + std::string(to_string(label)) + ")",
                   "|dE/deps - P_e| = " + sci(diff));
    }

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << (list.failed() ? "validation FAILED" : "validation passed") << " in " << sci(seconds) << " s\n";
    return list.failed() ? static_cast<int>(ExitCode::numerical) : 0;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Single-excitation spectra and resonant doublets of two emitters on a ring waveguide",
                 "doubletscope"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<double> epsilon;
    int rank = 1;
    std::string out_dir;

    const auto common = [&](CLI::App* sub, bool with_epsilon, bool with_out) {
        sub->add_option("--config", config_path, "configuration file")->required();
        if (with_epsilon)
            sub->add_option("--epsilon", epsilon, "emitter energy (overrides the config)");
        if (with_out)
            sub->add_option("--out", out_dir, "output directory (overrides the config)");
        return sub;
    };
    CLI::App* spectrum = common(app.add_subcommand("spectrum", "full eigenvalue and P_e table at one epsilon"), true, true);
    CLI::App* scan = common(app.add_subcommand("scan", "sweep epsilon, track the highest-P_e states"), false, true);
    CLI::App* doublet = common(app.add_subcommand("doublet", "locate the sector crossing and fit the doublet"), false, true);
    CLI::App* amplitude = common(app.add_subcommand("amplitude", "photon amplitude profiles at one epsilon"), true, true);
    amplitude->add_option("--rank", rank, "1 = highest P_e in each sector")->check(CLI::PositiveNumber);
    CLI::App* validate_cmd = common(app.add_subcommand("validate", "run the numerical self-checks"), true, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
    }

    try {
        RunConfig config = parse_config(config_path);
        if (epsilon) {
            config.system.epsilon = *epsilon;
            validate_config(config);
        }
        if (!out_dir.empty())
            config.output_dir = out_dir;

        if (spectrum->parsed())
            return cmd_spectrum(config, out);
        if (scan->parsed())
            return cmd_scan(config, out);
        if (doublet->parsed())
            return cmd_doublet(config, out);
        if (amplitude->parsed())
            return cmd_amplitude(config, rank, out);
        if (validate_cmd->parsed())
            return cmd_validate(config, out);
        return static_cast<int>(ExitCode::usage);
    } catch (const Error& e) {
        err << "doubletscope: " << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        err << "doubletscope: internal error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::numerical);
    }
}

} // namespace doubletscope
