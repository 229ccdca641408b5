#pragma once

// Reduction of the single-excitation Hamiltonian to one real symmetric arrowhead
// matrix per modular-reflection sector.
//
// Full basis (dimension 2K+3), in this order:
//   0      |e1, vac>
//   1      |e2, vac>
//   2+k+K  |G> (x) |k>,  k = -K..K
//
// The reflection swaps the emitters and maps b_k -> exp(2 pi i k (x1+x2)/L) b_{-k};
// with x1 = 0, x2 = d and phi_k = pi k d / L the sector basis is
//   Symmetric:      (|e1> + |e2>)/sqrt2,  |0>,  s_k (e^{-i phi_k}|k> + e^{i phi_k}|-k>)/sqrt2
//   Antisymmetric:  (|e1> - |e2>)/sqrt2,        s_k i(e^{-i phi_k}|k> - e^{i phi_k}|-k>)/sqrt2
// with couplings to the emitter vector g_0 = sqrt2 F_0, g_k = 2 F_k |cos phi_k| (Symmetric)
// and g_k = 2 F_k |sin phi_k| (Antisymmetric). The signs s_k = +-1 make every g_k >= 0.

#include "doubletscope/eigen_pair.hpp"
#include "doubletscope/model.hpp"
#include "doubletscope/sector_label.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace doubletscope {

using FullVector = std::vector<std::complex<double>>;

struct Pole {
    int mode;            // k >= 0
    double omega;
    double coupling;     // g_k > 0
    double phase_sign;   // s_k, +1 or -1
};

// A photon mode whose coupling to the sector's emitter vector vanishes exactly.
struct DeflatedMode {
    int mode;
    double omega;
};

class ArrowheadSector {
public:
    // Checks: poles strictly increasing in omega, couplings finite and nonzero.
    ArrowheadSector(SectorLabel label, double apex, std::vector<Pole> poles,
                    std::vector<DeflatedMode> deflated = {}, std::uint64_t params_hash = 0);

    SectorLabel label() const noexcept { return label_; }
    double apex() const noexcept { return apex_; }
    std::span<const Pole> poles() const noexcept { return poles_; }
    std::span<const DeflatedMode> deflated() const noexcept { return deflated_; }
    std::uint64_t params_hash() const noexcept { return params_hash_; }

    // Arrowhead matrix dimension (apex + poles); deflated modes excluded.
    std::size_t dimension() const noexcept { return poles_.size() + 1; }
    double coupling_norm_squared() const noexcept { return coupling_norm2_; }

    // Row-major dense matrix, apex first.
    std::vector<double> dense_matrix() const;

private:
    SectorLabel label_;
    double apex_;
    std::vector<Pole> poles_;
    std::vector<DeflatedMode> deflated_;
    std::uint64_t params_hash_;
    double coupling_norm2_ = 0.0;
};

ArrowheadSector build_sector(const SystemParams& params, SectorLabel label);

// Physical-basis amplitudes of a sector eigenpair. Norm is preserved.
FullVector embed_full(const EigenPair& state, const ArrowheadSector& sector, const SystemParams& params);

// Physical-basis vector of a deflated mode of `sector`; an exact eigenvector with energy omega_k.
FullVector embed_deflated(const DeflatedMode& mode, const ArrowheadSector& sector, const SystemParams& params);

// ||H v - E v||_2 with H applied term by term in the physical basis; O(K), no matrix formed.
double full_residual(const SystemParams& params, std::span<const std::complex<double>> v, double energy);

} // namespace doubletscope
