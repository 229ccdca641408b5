#pragma once

// Sweeps of the emitter energy: highest-P_e eigenstate per sector, exact sector
// crossings, the linear doublet model E_+-(eps_bar + delta) = E_cross + (c_m +- c_d) delta,
// and the distance of the doublet from the rest of the spectrum.

#include "doubletscope/eigen_pair.hpp"
#include "doubletscope/model.hpp"
#include "doubletscope/sector_hamiltonian.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace doubletscope {

struct ScanOptions {
    double window_halfwidth = 0.02;        // initial half-width of the spectral window around eps
    double max_window_halfwidth = 4.0;
    int n_grid = 4096;                     // amplitude grid used for confinement ratios
    double fit_halfwidth = 1e-3;
    int fit_points = 21;
    double quasi_degeneracy_ratio = 10.0;  // doublet splitting must stay below gap / ratio
    double quasi_degeneracy_max_halfwidth = 5e-3;
    std::size_t workers = 0;               // 0: DOUBLETSCOPE_THREADS or hardware concurrency
};

// One level of the merged two-sector spectrum (deflated modes included).
struct Level {
    double energy;
    SectorLabel sector;
    std::size_t root_index;  // position in the sector's arrowhead spectrum; unused if deflated
    bool deflated;
};

// Spectrum near eps. The window is widened until it provably contains the highest-P_e
// state of each sector (P_e <= G / (G + (E - eps)^2) for any eigenvalue, with
// G = sum g_k^2) and at least one level on either side of both of them.
struct LocalSpectrum {
    double epsilon;
    double e_min;
    double e_max;
    ArrowheadSector symmetric_sector;
    ArrowheadSector antisymmetric_sector;
    std::vector<EigenPair> symmetric;
    std::vector<EigenPair> antisymmetric;
    std::vector<Level> levels;             // merged and sorted by energy, then sector

    const std::vector<EigenPair>& pairs(SectorLabel label) const
    {
        return label == SectorLabel::Symmetric ? symmetric : antisymmetric;
    }
    const ArrowheadSector& sector(SectorLabel label) const
    {
        return label == SectorLabel::Symmetric ? symmetric_sector : antisymmetric_sector;
    }
    // Highest-P_e pair of a sector; ties resolve to the lower energy.
    const EigenPair& best(SectorLabel label) const;
    bool best_is_tied(SectorLabel label) const;
};

LocalSpectrum local_spectrum(const SystemParams& params, const ScanOptions& options = {});

// Nearest level strictly below / above `energy`, skipping the listed sector states.
// NaN if none exists in the spectrum.
double level_below(const LocalSpectrum& spectrum, double energy,
                   const std::vector<std::pair<SectorLabel, std::size_t>>& skip);
double level_above(const LocalSpectrum& spectrum, double energy,
                   const std::vector<std::pair<SectorLabel, std::size_t>>& skip);

struct BestState {
    double energy = 0.0;
    double emitter_probability = 0.0;
    std::size_t root_index = 0;
    bool tie = false;
    double below = 0.0;   // nearest other level in the merged spectrum
    double above = 0.0;
};

struct ScanRow {
    double epsilon = 0.0;
    BestState symmetric;
    BestState antisymmetric;
    double below = 0.0;   // nearest level under both best states, excluding them
    double above = 0.0;   // nearest level over both best states, excluding them
    std::string res_flags;

    const BestState& best(SectorLabel label) const
    {
        return label == SectorLabel::Symmetric ? symmetric : antisymmetric;
    }
};

ScanRow scan_row(const SystemParams& params, const ScanOptions& options = {});

// One row per epsilon, rows ordered as the grid. The grid must be strictly increasing.
std::vector<ScanRow> sweep(const SystemParams& base, const std::vector<double>& epsilon_grid,
                           const ScanOptions& options = {});

struct Crossing {
    double epsilon_bar = 0.0;
    double energy = 0.0;      // common eigenvalue at the crossing
    double splitting = 0.0;   // |E_first - E_second| left at epsilon_bar
    SectorLabel first = SectorLabel::Symmetric;
    SectorLabel second = SectorLabel::Antisymmetric;
    std::size_t first_root = 0;
    std::size_t second_root = 0;
    int iterations = 0;
};

inline constexpr double crossing_tolerance = 1e-13;

// Bisection on Delta(eps) = E*_first(eps) - E*_second(eps) until |Delta| <= 1e-13.
// Throws InvalidArgument without a sign change and BranchDiscontinuity if either
// highest-P_e state changes identity inside the bracket.
Crossing find_crossing(const SystemParams& base, double eps_lo, double eps_hi,
                       std::pair<SectorLabel, SectorLabel> branches = {SectorLabel::Symmetric,
                                                                       SectorLabel::Antisymmetric},
                       const ScanOptions& options = {});

struct DoubletSample {
    double epsilon;
    double e_symmetric;
    double e_antisymmetric;
    double below;
    double above;
    double neighbor_gap;   // distance from either branch to the nearest other level
};

struct DoubletReport {
    int nu = 0;
    int nu_prime = 0;
    double resonance_energy = 0.0;
    double epsilon_bar = 0.0;
    double energy_cross = 0.0;
    double resonance_offset = 0.0;      // |E_cross - resonance_energy|
    double crossing_splitting = 0.0;
    SectorLabel short_sector = SectorLabel::Symmetric;
    double slope_symmetric = 0.0;
    double slope_antisymmetric = 0.0;
    double c_m = 0.0;
    double c_d = 0.0;                   // + on the short-path branch
    double pe_symmetric = 0.0;          // at epsilon_bar
    double pe_antisymmetric = 0.0;
    double confinement_symmetric = 0.0; // at epsilon_bar
    double confinement_antisymmetric = 0.0;
    double fit_halfwidth = 0.0;
    int fit_points = 0;
    double fit_residual = 0.0;          // rms over both branches
    bool nonlinear_warning = false;
    double neighbor_gap_min = 0.0;      // over the fit window
    double splitting_max = 0.0;         // over the fit window
    double quasi_degeneracy_ratio = 0.0;
    double quasi_lo = 0.0;
    double quasi_hi = 0.0;
    bool branch_switch_warning = false; // a tracked branch stopped being highest-P_e
    std::vector<DoubletSample> fit_samples;
    std::vector<DoubletSample> quasi_samples;
};

// Requires a symmetric/antisymmetric crossing. Rejects a fit window of zero width or
// fewer than two points.
DoubletReport fit_doublet(const SystemParams& base, const Crossing& crossing, const ScanOptions& options = {});

struct ResonanceCrossing {
    std::size_t row = 0;       // the row after the sign change
    SectorLabel sector = SectorLabel::Symmetric;
    Branch branch = Branch::Short;
    int index = 0;
    int partner_index = 0;     // long-path index for a double point
    double energy = 0.0;
    bool double_point = false;
    bool compatible = false;   // the sector matches the parity of the resonance
    bool continuous = false;   // same eigenvalue branch on both rows
};

struct AnnotatedScan {
    std::vector<ScanRow> rows;
    std::vector<ResonanceCrossing> crossings;
};

// Marks sign changes of E* - E_res between adjacent rows for every ladder energy and
// fills ScanRow::res_flags with tokens "<sector>:<label>" joined by '|', where label is
// S<nu>, L<nu'> or S<nu>=L<nu'> for a double point, followed by '?' when the sector does
// not match the resonance parity and '!' when the highest-P_e state jumped branch.
AnnotatedScan classify_resonances(std::vector<ScanRow> rows, const ResonanceLadder& ladder);

} // namespace doubletscope
