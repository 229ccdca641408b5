#include "doubletscope/doublet_scan.hpp"

#include "doubletscope/eigensolver.hpp"
#include "doubletscope/errors.hpp"
#include "doubletscope/observables.hpp"
#include "doubletscope/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace doubletscope {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double tie_tolerance = 1e-12;
constexpr int crossing_iteration_cap = 200;

using SkipList = std::vector<std::pair<SectorLabel, std::size_t>>;

bool skipped(const Level& level, const SkipList& skip)
{
    if (level.deflated)
        return false;
    return std::any_of(skip.begin(), skip.end(), [&](const auto& s) {
        return s.first == level.sector && s.second == level.root_index;
    });
}

double lower_spectral_bound(const ArrowheadSector& s)
{
    const double first = s.poles().empty() ? s.apex() : std::min(s.apex(), s.poles().front().omega);
    return first - std::sqrt(s.coupling_norm_squared());
}

double upper_spectral_bound(const ArrowheadSector& s)
{
    const double last = s.poles().empty() ? s.apex() : std::max(s.apex(), s.poles().back().omega);
    return last + std::sqrt(s.coupling_norm_squared());
}

std::size_t best_index(const std::vector<EigenPair>& pairs)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < pairs.size(); ++i)
        if (pairs[i].emitter_probability() > pairs[best].emitter_probability())
            best = i;
    return best;
}

std::string format_epsilon(double eps)
{
    std::ostringstream os;
    os.precision(17);
    os << eps;
    return os.str();
}

// The eigenpair on a given branch, from the window if present.
EigenPair branch_state(const LocalSpectrum& spectrum, SectorLabel label, std::size_t root)
{
    for (const auto& p : spectrum.pairs(label))
        if (p.root_index == root)
            return p;
    return solve_one(spectrum.sector(label), root);
}

DoubletSample sample_branches(const LocalSpectrum& spectrum, const EigenPair& sym, const EigenPair& anti)
{
    const SkipList skip{{SectorLabel::Symmetric, sym.root_index}, {SectorLabel::Antisymmetric, anti.root_index}};
    const double lo = std::min(sym.energy, anti.energy);
    const double hi = std::max(sym.energy, anti.energy);
    DoubletSample s{};
    s.epsilon = spectrum.epsilon;
    s.e_symmetric = sym.energy;
    s.e_antisymmetric = anti.energy;
    s.below = level_below(spectrum, lo, skip);
    s.above = level_above(spectrum, hi, skip);
    double gap = std::numeric_limits<double>::infinity();
    for (const Level& level : spectrum.levels) {
        if (skipped(level, skip))
            continue;
        gap = std::min({gap, std::abs(level.energy - sym.energy), std::abs(level.energy - anti.energy)});
    }
    s.neighbor_gap = gap;
    return s;
}

} // namespace

const EigenPair& LocalSpectrum::best(SectorLabel label) const
{
    const auto& p = pairs(label);
    return p[best_index(p)];
}

bool LocalSpectrum::best_is_tied(SectorLabel label) const
{
    const auto& p = pairs(label);
    const std::size_t b = best_index(p);
    const double pe = p[b].emitter_probability();
    for (std::size_t i = 0; i < p.size(); ++i)
        if (i != b && std::abs(p[i].emitter_probability() - pe) <= tie_tolerance)
            return true;
    return false;
}

LocalSpectrum local_spectrum(const SystemParams& params, const ScanOptions& options)
{
    validate(params);
    LocalSpectrum spec{params.epsilon, 0.0, 0.0, build_sector(params, SectorLabel::Symmetric),
                       build_sector(params, SectorLabel::Antisymmetric), {}, {}, {}};
    const double floor_e = std::min(lower_spectral_bound(spec.symmetric_sector),
                                    lower_spectral_bound(spec.antisymmetric_sector));
    const double ceil_e = std::max(upper_spectral_bound(spec.symmetric_sector),
                                   upper_spectral_bound(spec.antisymmetric_sector));
    const double eps = params.epsilon;

    for (double h = options.window_halfwidth; h <= options.max_window_halfwidth; h *= 2.0) {
        spec.e_min = eps - h;
        spec.e_max = eps + h;
        spec.symmetric = solve_window(spec.symmetric_sector, spec.e_min, spec.e_max);
        spec.antisymmetric = solve_window(spec.antisymmetric_sector, spec.e_min, spec.e_max);
        if (spec.symmetric.empty() || spec.antisymmetric.empty())
            continue;

        bool complete = true;
        for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric}) {
            const double g2 = spec.sector(label).coupling_norm_squared();
            const double outside_bound = g2 / (g2 + h * h);
            if (outside_bound >= spec.best(label).emitter_probability())
                complete = false;
        }
        if (!complete)
            continue;

        spec.levels.clear();
        for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric}) {
            for (const auto& p : spec.pairs(label))
                spec.levels.push_back({p.energy, label, p.root_index, false});
            for (const auto& d : spec.sector(label).deflated())
                if (d.omega >= spec.e_min && d.omega <= spec.e_max)
                    spec.levels.push_back({d.omega, label, static_cast<std::size_t>(d.mode), true});
        }
        std::sort(spec.levels.begin(), spec.levels.end(), [](const Level& a, const Level& b) {
            if (a.energy != b.energy)
                return a.energy < b.energy;
            return a.sector < b.sector;
        });

        const double lo = std::min(spec.best(SectorLabel::Symmetric).energy, spec.best(SectorLabel::Antisymmetric).energy);
        const double hi = std::max(spec.best(SectorLabel::Symmetric).energy, spec.best(SectorLabel::Antisymmetric).energy);
        const bool has_below = spec.e_min <= floor_e || spec.levels.front().energy < lo;
        const bool has_above = spec.e_max >= ceil_e || spec.levels.back().energy > hi;
        if (has_below && has_above)
            return spec;
    }
    throw NumericalError("spectral window around epsilon = " + format_epsilon(eps) +
                         " could not be widened enough to bracket the highest-P_e states");
}

double level_below(const LocalSpectrum& spectrum, double energy, const SkipList& skip)
{
    double found = nan;
    for (const Level& level : spectrum.levels) {
        if (level.energy >= energy)
            break;
        if (!skipped(level, skip))
            found = level.energy;
    }
    return found;
}

double level_above(const LocalSpectrum& spectrum, double energy, const SkipList& skip)
{
    for (const Level& level : spectrum.levels)
        if (level.energy > energy && !skipped(level, skip))
            return level.energy;
    return nan;
}

ScanRow scan_row(const SystemParams& params, const ScanOptions& options)
{
    const LocalSpectrum spec = local_spectrum(params, options);
    ScanRow row;
    row.epsilon = params.epsilon;
    for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric}) {
        const EigenPair& b = spec.best(label);
        BestState& out = label == SectorLabel::Symmetric ? row.symmetric : row.antisymmetric;
        out.energy = b.energy;
        out.emitter_probability = b.emitter_probability();
        out.root_index = b.root_index;
        out.tie = spec.best_is_tied(label);
        const SkipList self{{label, b.root_index}};
        out.below = level_below(spec, b.energy, self);
        out.above = level_above(spec, b.energy, self);
    }
    const SkipList both{{SectorLabel::Symmetric, row.symmetric.root_index},
                        {SectorLabel::Antisymmetric, row.antisymmetric.root_index}};
    row.below = level_below(spec, std::min(row.symmetric.energy, row.antisymmetric.energy), both);
    row.above = level_above(spec, std::max(row.symmetric.energy, row.antisymmetric.energy), both);
    return row;
}

std::vector<ScanRow> sweep(const SystemParams& base, const std::vector<double>& epsilon_grid,
                           const ScanOptions& options)
{
    for (std::size_t i = 1; i < epsilon_grid.size(); ++i)
        if (!(epsilon_grid[i - 1] < epsilon_grid[i]))
            throw InvalidArgument("sweep: epsilon grid must be strictly increasing");

    std::vector<ScanRow> rows(epsilon_grid.size());
    const std::size_t workers = options.workers == 0 ? worker_count() : options.workers;
    parallel_for(epsilon_grid.size(), workers, [&](std::size_t i) {
        SystemParams p = base;
        p.epsilon = epsilon_grid[i];
        try {
            rows[i] = scan_row(p, options);
        } catch (const Error& e) {
            throw Error(e.code(), "sweep failed at epsilon = " + format_epsilon(p.epsilon) + ": " + e.what());
        }
    });
    return rows;
}

Crossing find_crossing(const SystemParams& base, double eps_lo, double eps_hi,
                       std::pair<SectorLabel, SectorLabel> branches, const ScanOptions& options)
{
    if (branches.first == branches.second)
        throw InvalidArgument("find_crossing: branches must come from different sectors");
    if (!(eps_lo < eps_hi))
        throw InvalidArgument("find_crossing: bracket must satisfy eps_lo < eps_hi");

    struct Probe {
        double epsilon;
        double delta;
        double e1;
        double e2;
        std::size_t r1;
        std::size_t r2;
    };
    const auto probe = [&](double eps) {
        SystemParams p = base;
        p.epsilon = eps;
        const LocalSpectrum spec = local_spectrum(p, options);
        const EigenPair& a = spec.best(branches.first);
        const EigenPair& b = spec.best(branches.second);
        return Probe{eps, a.energy - b.energy, a.energy, b.energy, a.root_index, b.root_index};
    };
    const auto result = [&](const Probe& p, int iterations) {
        return Crossing{p.epsilon, 0.5 * (p.e1 + p.e2), std::abs(p.delta), branches.first, branches.second,
                        p.r1, p.r2, iterations};
    };

    Probe lo = probe(eps_lo);
    Probe hi = probe(eps_hi);
    const auto same_branches = [&](const Probe& p) { return p.r1 == lo.r1 && p.r2 == lo.r2; };
    if (!same_branches(hi))
        throw BranchDiscontinuity("find_crossing: highest-P_e states change branch between epsilon = " +
                                  format_epsilon(eps_lo) + " and " + format_epsilon(eps_hi) +
                                  "; shrink the bracket");
    if (std::abs(lo.delta) <= crossing_tolerance)
        return result(lo, 0);
    if (std::abs(hi.delta) <= crossing_tolerance)
        return result(hi, 0);
    if ((lo.delta > 0.0) == (hi.delta > 0.0))
        throw InvalidArgument("find_crossing: no sign change of the sector splitting in [" +
                              format_epsilon(eps_lo) + ", " + format_epsilon(eps_hi) + "]");

    Probe closest = std::abs(lo.delta) < std::abs(hi.delta) ? lo : hi;
    int iter = 0;
    while (iter < crossing_iteration_cap) {
        ++iter;
        const double mid = lo.epsilon + 0.5 * (hi.epsilon - lo.epsilon);
        if (!(mid > lo.epsilon && mid < hi.epsilon))
            break;
        const Probe m = probe(mid);
        if (!same_branches(m))
            throw BranchDiscontinuity("find_crossing: highest-P_e states change branch near epsilon = " +
                                      format_epsilon(mid) + "; shrink the bracket");
        if (std::abs(m.delta) < std::abs(closest.delta))
            closest = m;
        if (std::abs(m.delta) <= crossing_tolerance)
            break;
        ((m.delta > 0.0) == (lo.delta > 0.0) ? lo : hi) = m;
    }
    return result(closest, iter);
}

DoubletReport fit_doublet(const SystemParams& base, const Crossing& crossing, const ScanOptions& options)
{
    if (crossing.first == crossing.second)
        throw InvalidArgument("fit_doublet: crossing must pair the two sectors");
    if (!(options.fit_halfwidth > 0.0) || options.fit_points < 2)
        throw InvalidArgument("fit_doublet: fit window needs a positive half-width and at least two points");

    const std::size_t sym_root = crossing.first == SectorLabel::Symmetric ? crossing.first_root : crossing.second_root;
    const std::size_t anti_root = crossing.first == SectorLabel::Symmetric ? crossing.second_root : crossing.first_root;

    DoubletReport report;
    report.epsilon_bar = crossing.epsilon_bar;
    report.energy_cross = crossing.energy;
    report.crossing_splitting = crossing.splitting;
    report.fit_halfwidth = options.fit_halfwidth;
    report.fit_points = options.fit_points;
    report.quasi_degeneracy_ratio = options.quasi_degeneracy_ratio;

    const auto at = [&](double eps, bool track_best) {
        SystemParams p = base;
        p.epsilon = eps;
        const LocalSpectrum spec = local_spectrum(p, options);
        const EigenPair sym = branch_state(spec, SectorLabel::Symmetric, sym_root);
        const EigenPair anti = branch_state(spec, SectorLabel::Antisymmetric, anti_root);
        if (track_best && (spec.best(SectorLabel::Symmetric).root_index != sym_root ||
                           spec.best(SectorLabel::Antisymmetric).root_index != anti_root))
            report.branch_switch_warning = true;
        return sample_branches(spec, sym, anti);
    };

    // Linear fit with the intercept pinned at the crossing energy.
    const int n = options.fit_points;
    double sdd = 0.0;
    double sds = 0.0;
    double sda = 0.0;
    report.neighbor_gap_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double delta = -options.fit_halfwidth + 2.0 * options.fit_halfwidth * i / (n - 1);
        const DoubletSample s = at(crossing.epsilon_bar + delta, true);
        report.fit_samples.push_back(s);
        sdd += delta * delta;
        sds += delta * (s.e_symmetric - crossing.energy);
        sda += delta * (s.e_antisymmetric - crossing.energy);
        report.neighbor_gap_min = std::min(report.neighbor_gap_min, s.neighbor_gap);
        report.splitting_max = std::max(report.splitting_max, std::abs(s.e_symmetric - s.e_antisymmetric));
    }
    report.slope_symmetric = sds / sdd;
    report.slope_antisymmetric = sda / sdd;

    double sq = 0.0;
    double e_lo = std::numeric_limits<double>::infinity();
    double e_hi = -e_lo;
    for (const DoubletSample& s : report.fit_samples) {
        const double delta = s.epsilon - crossing.epsilon_bar;
        const double rs = s.e_symmetric - crossing.energy - report.slope_symmetric * delta;
        const double ra = s.e_antisymmetric - crossing.energy - report.slope_antisymmetric * delta;
        sq += rs * rs + ra * ra;
        e_lo = std::min({e_lo, s.e_symmetric, s.e_antisymmetric});
        e_hi = std::max({e_hi, s.e_symmetric, s.e_antisymmetric});
    }
    report.fit_residual = std::sqrt(sq / (2.0 * n));
    report.nonlinear_warning = report.fit_residual > 1e-3 * (e_hi - e_lo);

    // Branch states at the crossing: P_e and where their photon sits.
    {
        SystemParams p = base;
        p.epsilon = crossing.epsilon_bar;
        const LocalSpectrum spec = local_spectrum(p, options);
        const EigenPair sym = branch_state(spec, SectorLabel::Symmetric, sym_root);
        const EigenPair anti = branch_state(spec, SectorLabel::Antisymmetric, anti_root);
        report.pe_symmetric = sym.emitter_probability();
        report.pe_antisymmetric = anti.emitter_probability();
        const auto ratio = [&](const EigenPair& pair) {
            const auto state = make_state(pair, spec.sector(pair.sector), p);
            return confinement_ratio(photon_amplitude(state, p, options.n_grid), p).value_or(nan);
        };
        report.confinement_symmetric = ratio(sym);
        report.confinement_antisymmetric = ratio(anti);
    }
    report.short_sector = report.confinement_symmetric >= report.confinement_antisymmetric
                              ? SectorLabel::Symmetric
                              : SectorLabel::Antisymmetric;
    const double s_short = report.short_sector == SectorLabel::Symmetric ? report.slope_symmetric
                                                                          : report.slope_antisymmetric;
    const double s_long = report.short_sector == SectorLabel::Symmetric ? report.slope_antisymmetric
                                                                         : report.slope_symmetric;
    report.c_m = 0.5 * (s_short + s_long);
    report.c_d = 0.5 * (s_short - s_long);

    // The double resonance this doublet sits on.
    const ResonanceLadder ladder = resonances_in_window(base, std::max(1.0, crossing.energy - 0.01), crossing.energy + 0.01);
    DoublePoint point = fundamental_double_point(base);
    for (const DoublePoint& dp : ladder.double_points)
        if (std::abs(dp.energy - crossing.energy) < std::abs(point.energy - crossing.energy))
            point = dp;
    report.nu = point.nu;
    report.nu_prime = point.nu_prime;
    report.resonance_energy = point.energy;
    report.resonance_offset = std::abs(crossing.energy - point.energy);

    // Walk outwards until the splitting is no longer small against the neighbor gap.
    const double step = 2.0 * options.fit_halfwidth / (n - 1);
    const auto quasi = [&](const DoubletSample& s) {
        return std::abs(s.e_symmetric - s.e_antisymmetric) * options.quasi_degeneracy_ratio <= s.neighbor_gap;
    };
    report.quasi_lo = report.quasi_hi = crossing.epsilon_bar;
    std::vector<DoubletSample> lower;
    std::vector<DoubletSample> upper;
    const DoubletSample centre = at(crossing.epsilon_bar, false);
    for (int side : {-1, 1}) {
        for (int m = 1; m * step <= options.quasi_degeneracy_max_halfwidth * (1.0 + 1e-12); ++m) {
            const double eps = crossing.epsilon_bar + side * m * step;
            const DoubletSample s = at(eps, false);
            (side < 0 ? lower : upper).push_back(s);
            if (!quasi(s))
                break;
            (side < 0 ? report.quasi_lo : report.quasi_hi) = eps;
        }
    }
    std::reverse(lower.begin(), lower.end());
    report.quasi_samples = std::move(lower);
    report.quasi_samples.push_back(centre);
    report.quasi_samples.insert(report.quasi_samples.end(), upper.begin(), upper.end());
    return report;
}

AnnotatedScan classify_resonances(std::vector<ScanRow> rows, const ResonanceLadder& ladder)
{
    struct Target {
        Branch branch;
        int index;
        int partner;
        double energy;
        bool double_point;
    };
    std::vector<Target> targets;
    for (const LadderEntry& e : ladder.entries) {
        const auto dp = std::find_if(ladder.double_points.begin(), ladder.double_points.end(), [&](const DoublePoint& d) {
            return e.branch == Branch::Short ? d.nu == e.index : d.nu_prime == e.index;
        });
        if (dp == ladder.double_points.end())
            targets.push_back({e.branch, e.index, 0, e.energy, false});
        else if (e.branch == Branch::Short)
            targets.push_back({Branch::Short, dp->nu, dp->nu_prime, dp->energy, true});
    }

    AnnotatedScan out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric}) {
            const BestState& prev = rows[i - 1].best(label);
            const BestState& cur = rows[i].best(label);
            for (const Target& t : targets) {
                const bool below_before = prev.energy < t.energy;
                const bool below_after = cur.energy < t.energy;
                if (below_before == below_after)
                    continue;
                ResonanceCrossing c;
                c.row = i;
                c.sector = label;
                c.branch = t.branch;
                c.index = t.index;
                c.partner_index = t.partner;
                c.energy = t.energy;
                c.double_point = t.double_point;
                c.compatible = resonance_sector(t.index) == label ||
                               (t.double_point && resonance_sector(t.partner) == label);
                c.continuous = prev.root_index == cur.root_index;
                out.crossings.push_back(c);

                std::string token{to_string(label)};
                token += ':';
                if (t.double_point)
                    token += "S" + std::to_string(t.index) + "=L" + std::to_string(t.partner);
                else
                    token += (t.branch == Branch::Short ? "S" : "L") + std::to_string(t.index);
                if (!c.compatible)
                    token += '?';
                if (!c.continuous)
                    token += '!';
                std::string& flags = rows[i].res_flags;
                if (!flags.empty())
                    flags += '|';
                flags += token;
            }
        }
    }
    out.rows = std::move(rows);
    return out;
}

} // namespace doubletscope
