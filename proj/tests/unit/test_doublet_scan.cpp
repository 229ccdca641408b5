#include "doubletscope/doublet_scan.hpp"
#include "doubletscope/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace doubletscope;

namespace {

SystemParams case_params(int d_pi, double eps)
{
    SystemParams p;
    p.distance_pi = Rational(d_pi);
    p.epsilon = eps;
    return p;
}

struct Reference {
    int d_pi;
    double eps;
    double e_sym, pe_sym, e_anti, pe_anti;
};

// Dense complex diagonalization of the full Hamiltonian at K = 2000 (tests/oracle).
constexpr Reference references[] = {
    {8, 1.008, 1.0079977643571219, 0.864619029150644, 1.0079345222159195, 0.6119716651991147},
    {8, 1.011, 1.0104452622078666, 0.6140079030836134, 1.0128103164895697, 0.46261419726810077},
    {8, 1.0077, 1.0077390898383232, 0.859470049394301, 1.0077518315536111, 0.6051801691835601},
    {16, 1.0077, 1.0077485143527658, 0.6713026514641609, 1.0077443819058107, 0.7537529470864475},
};

} // namespace

TEST_CASE("highest-P_e states match the dense reference")
{
    for (const Reference& r : references) {
        CAPTURE(r.d_pi);
        CAPTURE(r.eps);
        const LocalSpectrum spec = local_spectrum(case_params(r.d_pi, r.eps));
        const EigenPair& s = spec.best(SectorLabel::Symmetric);
        const EigenPair& a = spec.best(SectorLabel::Antisymmetric);
        CHECK(std::abs(s.energy - r.e_sym) <= 1e-10);
        CHECK(std::abs(s.emitter_probability() - r.pe_sym) <= 1e-8);
        CHECK(std::abs(a.energy - r.e_anti) <= 1e-10);
        CHECK(std::abs(a.emitter_probability() - r.pe_anti) <= 1e-8);
        CHECK_FALSE(spec.best_is_tied(SectorLabel::Symmetric));

        // Every level in the window is accounted for and sorted.
        for (std::size_t i = 1; i < spec.levels.size(); ++i)
            CHECK(spec.levels[i - 1].energy <= spec.levels[i].energy);
        CHECK(spec.levels.front().energy >= spec.e_min);
        CHECK(spec.levels.back().energy <= spec.e_max);
    }
}

TEST_CASE("scan rows: neighbours exclude the tracked states")
{
    const SystemParams p = case_params(8, 1.008);
    const ScanRow row = scan_row(p);
    const LocalSpectrum spec = local_spectrum(p);
    CHECK(row.symmetric.energy == spec.best(SectorLabel::Symmetric).energy);
    CHECK(row.antisymmetric.energy == spec.best(SectorLabel::Antisymmetric).energy);
    const double lo = std::min(row.symmetric.energy, row.antisymmetric.energy);
    const double hi = std::max(row.symmetric.energy, row.antisymmetric.energy);
    CHECK(row.below < lo);
    CHECK(row.above > hi);
    CHECK(row.symmetric.below < row.symmetric.energy);
    CHECK(row.symmetric.above > row.symmetric.energy);
    // No level sits strictly between the pair-level neighbours except the pair itself.
    for (const Level& l : spec.levels) {
        const bool is_pair = (l.sector == SectorLabel::Symmetric && !l.deflated && l.root_index == row.symmetric.root_index)
                             || (l.sector == SectorLabel::Antisymmetric && !l.deflated
                                 && l.root_index == row.antisymmetric.root_index);
        if (!is_pair)
            CHECK((l.energy <= row.below || l.energy >= row.above));
    }
}

TEST_CASE("sweep is deterministic and independent of the worker count")
{
    SystemParams p = case_params(8, 1.008);
    p.cutoff = 600;
    std::vector<double> grid;
    for (int i = 0; i < 12; ++i)
        grid.push_back(1.005 + 0.002 * i);
    ScanOptions one;
    one.workers = 1;
    ScanOptions many;
    many.workers = 5;
    const auto a = sweep(p, grid, one);
    const auto b = sweep(p, grid, many);
    REQUIRE(a.size() == grid.size());
    REQUIRE(b.size() == grid.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].epsilon == grid[i]);
        CHECK(a[i].symmetric.energy == b[i].symmetric.energy);
        CHECK(a[i].antisymmetric.emitter_probability == b[i].antisymmetric.emitter_probability);
        CHECK(a[i].below == b[i].below);
    }
    SystemParams at = p;
    at.epsilon = grid[3];
    CHECK(scan_row(at).symmetric.energy == a[3].symmetric.energy);

    CHECK_THROWS_AS(sweep(p, {1.01, 1.01}), InvalidArgument);
    CHECK_THROWS_AS(sweep(p, {1.02, 1.01}), InvalidArgument);
}

TEST_CASE("Hellmann-Feynman: dE*/d eps equals P_e")
{
    for (int d_pi : {8, 16}) {
        for (double eps : {1.0077, 1.008, 1.011}) {
            const double h = 1e-7;
            const ScanRow mid = scan_row(case_params(d_pi, eps));
            const ScanRow lo = scan_row(case_params(d_pi, eps - h));
            const ScanRow hi = scan_row(case_params(d_pi, eps + h));
            for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric}) {
                REQUIRE(lo.best(label).root_index == hi.best(label).root_index);
                const double slope = (hi.best(label).energy - lo.best(label).energy) / (2 * h);
                CHECK(std::abs(slope - mid.best(label).emitter_probability) <= 1e-5);
            }
        }
    }
}

TEST_CASE("crossing of the fundamental doublet")
{
    const SystemParams p = case_params(8, 1.008);
    const Crossing c = find_crossing(p, 1.0072, 1.0082);
    CHECK(c.splitting <= crossing_tolerance);
    CHECK(c.epsilon_bar > 1.0072);
    CHECK(c.epsilon_bar < 1.0082);
    CHECK(std::abs(c.energy - std::sqrt(65.0) / 8.0) <= 5e-4);

    CHECK_THROWS_AS(find_crossing(p, 1.0072, 1.0074), InvalidArgument);
    CHECK_THROWS_AS(find_crossing(p, 1.0082, 1.0072), InvalidArgument);
    CHECK_THROWS_AS(find_crossing(p, 1.0072, 1.0082, {SectorLabel::Symmetric, SectorLabel::Symmetric}),
                    InvalidArgument);
}

TEST_CASE("doublet fit")
{
    const SystemParams p = case_params(8, 1.008);
    const Crossing c = find_crossing(p, 1.0072, 1.0082);
    ScanOptions o;
    o.fit_halfwidth = 1e-4;
    o.fit_points = 5;
    o.quasi_degeneracy_max_halfwidth = 5e-4;
    const DoubletReport r = fit_doublet(p, c, o);
    CHECK(r.nu == 1);
    CHECK(r.nu_prime == 4);
    CHECK(r.short_sector == SectorLabel::Symmetric);
    CHECK(r.c_d > 0.0);
    CHECK(r.c_m == doctest::Approx((r.slope_symmetric + r.slope_antisymmetric) / 2));
    // Slopes follow P_e at the crossing.
    CHECK(std::abs(r.slope_symmetric - r.pe_symmetric) <= 1e-3);
    CHECK(std::abs(r.slope_antisymmetric - r.pe_antisymmetric) <= 1e-3);
    CHECK(r.confinement_symmetric > 0.85);
    CHECK(r.confinement_antisymmetric < 0.15);
    CHECK(r.fit_samples.size() == 5);
    CHECK(r.neighbor_gap_min > 10 * r.splitting_max);
    CHECK(r.quasi_lo <= r.epsilon_bar);
    CHECK(r.quasi_hi >= r.epsilon_bar);

    ScanOptions zero = o;
    zero.fit_halfwidth = 0.0;
    CHECK_THROWS_AS(fit_doublet(p, c, zero), InvalidArgument);
    ScanOptions single = o;
    single.fit_points = 1;
    CHECK_THROWS_AS(fit_doublet(p, c, single), InvalidArgument);
}

TEST_CASE("resonance annotations")
{
    const SystemParams p = case_params(8, 1.008);
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i)
        grid.push_back(1.006 + 0.0005 * i);
    auto rows = sweep(p, grid);

    const AnnotatedScan none = classify_resonances(rows, ResonanceLadder{});
    CHECK(none.crossings.empty());
    for (const ScanRow& r : none.rows)
        CHECK(r.res_flags.empty());

    const AnnotatedScan scan = classify_resonances(rows, resonances_in_window(p, 1.0, 1.02));
    bool saw_double = false;
    for (const ResonanceCrossing& x : scan.crossings) {
        if (x.double_point) {
            saw_double = true;
            CHECK(x.index == 1);
            CHECK(x.partner_index == 4);
            CHECK(scan.rows[x.row].res_flags.find("S1=L4") != std::string::npos);
        }
        CHECK(x.row > 0);
    }
    CHECK(saw_double);
}
