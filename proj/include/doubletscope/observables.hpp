#pragma once

// Physical-basis states and their figures of merit: emitter excitation probability,
// the photon spatial amplitude zeta(x) and the share of photon density on the short path.
//
// zeta is reported in state-normalized units, zeta(x) = sum_k xi_k e^{2 pi i k x / L} / sqrt(L),
// so that the integral of |zeta|^2 over the ring equals 1 - P_e.

#include "doubletscope/eigen_pair.hpp"
#include "doubletscope/model.hpp"
#include "doubletscope/sector_hamiltonian.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace doubletscope {

struct SingleExcitationState {
    SectorLabel sector = SectorLabel::Symmetric;
    double energy = 0.0;
    std::complex<double> a1;
    std::complex<double> a2;
    std::vector<std::complex<double>> xi;   // index k + K, k = -K..K
    std::uint64_t params_hash = 0;

    int cutoff() const noexcept { return static_cast<int>(xi.size() / 2); }
    std::complex<double> mode(int k) const { return xi[static_cast<std::size_t>(k + cutoff())]; }
    double norm_squared() const;
};

SingleExcitationState make_state(const EigenPair& pair, const ArrowheadSector& sector, const SystemParams& params);
SingleExcitationState make_deflated_state(const DeflatedMode& mode, const ArrowheadSector& sector,
                                          const SystemParams& params);

// P_e = |a1|^2 + |a2|^2.
double emitter_probability(const SingleExcitationState& state);

struct AmplitudeProfile {
    std::vector<double> grid;                  // uniform, x_j = j L / N on [0, L)
    std::vector<std::complex<double>> values;
    double energy = 0.0;
    double length = 0.0;
};

// zeta on an n_grid-point uniform grid by the mode sum. Requires n_grid >= 2K.
AmplitudeProfile photon_amplitude(const SingleExcitationState& state, const SystemParams& params, int n_grid);

// zeta at arbitrary positions by the mode sum.
std::vector<std::complex<double>> amplitude_at(const SingleExcitationState& state, const SystemParams& params,
                                               std::span<const double> positions);

// zeta at arbitrary positions through the resolvent kernel
//   xi1(x) = (sqrt(gamma)/L) sum_k e^{2 pi i k x / L} / (sqrt(omega_k) (E - omega_k)),
//   zeta(x) = a1 xi1(x - x1) + a2 xi1(x - x2).
// Only valid for eigenstates with nonzero emitter amplitude.
std::vector<std::complex<double>> amplitude_by_resolvent(const SingleExcitationState& state,
                                                         const SystemParams& params,
                                                         std::span<const double> positions);

// Fits zeta_a ~ c zeta_b for one complex c by least squares and returns
// max_j |zeta_a - c zeta_b| / max_j |zeta_a|.
double mismatch_up_to_factor(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b);

// integral_0^d |zeta|^2 / integral_0^L |zeta|^2 by the trapezoidal rule on the profile grid.
// std::nullopt when the profile carries no photon density.
std::optional<double> confinement_ratio(const AmplitudeProfile& profile, const SystemParams& params);

// Trapezoidal integral of |zeta|^2 over the full ring.
double photon_weight(const AmplitudeProfile& profile);

} // namespace doubletscope
