#pragma once

#include "doubletscope/sector_label.hpp"

#include <cstddef>
#include <vector>

namespace doubletscope {

// One eigenpair of an arrowhead sector, in sector coordinates.
// Unit norm: apex^2 + sum(modes^2) = 1. Sign fixed so apex > 0, or the first
// nonzero mode amplitude > 0 when the apex amplitude vanishes.
struct EigenPair {
    double energy = 0.0;
    double apex_amplitude = 0.0;
    std::vector<double> mode_amplitudes;   // aligned with the sector's poles
    SectorLabel sector = SectorLabel::Symmetric;
    std::size_t root_index = 0;            // position in the sector's sorted spectrum

    // Emitter excitation probability P_e = |a1|^2 + |a2|^2 = apex^2.
    double emitter_probability() const noexcept { return apex_amplitude * apex_amplitude; }
};

} // namespace doubletscope
