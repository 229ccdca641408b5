#pragma once

// CSV tables used by the commands but not part of the public interface.

#include "doubletscope/eigen_pair.hpp"
#include "doubletscope/model.hpp"
#include "doubletscope/observables.hpp"
#include "doubletscope/sector_hamiltonian.hpp"

#include <iosfwd>
#include <vector>

namespace doubletscope {

struct SpectrumEntry {
    double energy;
    SectorLabel sector;
    double emitter_probability;
    bool deflated;
    std::size_t index;   // root index, or mode k when deflated
};

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumEntry>& entries);

// k, omega, g_sym, g_anti, deflated (which sector lost the mode: none, sym, anti).
void write_modes_csv(std::ostream& out, const ArrowheadSector& sym, const ArrowheadSector& anti,
                     const SystemParams& params);

void write_amplitude_csv(std::ostream& out, const AmplitudeProfile& profile);

} // namespace doubletscope
