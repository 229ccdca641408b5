#pragma once

// Physical parameters of two identical emitters on a ring waveguide, the mode
// dispersion, the coupling form factor and the ladders of path-resonance energies.
//
// Units: the transverse cutoff m is the energy unit (m = 1, hbar = v = 1), so
// lengths are in 1/m. The ring length L and the emitter distance d are carried as
// exact rational multiples of pi, which keeps d/L exact for deflation and for
// double-resonance detection.

#include "doubletscope/sector_label.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace doubletscope {

using Rational = boost::rational<std::int64_t>;

struct SystemParams {
    double gamma = 1e-4;        // coupling constant
    Rational length_pi{40};     // L / pi
    Rational distance_pi{8};    // d / pi, emitters at x1 = 0 and x2 = d
    double epsilon = 1.008;     // emitter excitation energy
    int cutoff = 2000;          // retained modes k = -K..K

    double length() const;
    double distance() const;
    // d / L in lowest terms.
    Rational distance_ratio() const;
    std::size_t full_dimension() const { return 2 * static_cast<std::size_t>(cutoff) + 3; }
};

// Throws InvalidArgument naming the first violated invariant.
void validate(const SystemParams& params);

// Identifies a parameter set; sectors and states carry it so they cannot be mixed up.
std::uint64_t params_hash(const SystemParams& params);

double to_double(const Rational& r);

// omega_k = sqrt((2 pi k / L)^2 + 1).
double mode_frequency(const SystemParams& params, int k);

// F_k = sqrt(gamma / (L omega_k)).
double form_factor(const SystemParams& params, int k);

// E_nu = sqrt((nu pi / d)^2 + 1), a standing wave with nu half-wavelengths on the short path.
double short_resonance(const SystemParams& params, int nu);

// E~_nu' = sqrt((nu' pi / (L - d))^2 + 1), the same on the long path.
double long_resonance(const SystemParams& params, int nu_prime);

enum class Branch { Short, Long };

constexpr const char* to_string(Branch b) noexcept { return b == Branch::Short ? "short" : "long"; }

// Sector that hosts a resonance with `index` half-wavelengths on either path: a standing
// wave with nodes at both emitters is even about the path midpoint for odd index.
constexpr SectorLabel resonance_sector(int index) noexcept
{
    return index % 2 != 0 ? SectorLabel::Symmetric : SectorLabel::Antisymmetric;
}

struct LadderEntry {
    Branch branch;
    int index;
    double energy;
};

// E_nu = E~_nu', i.e. nu (L - d) = nu' d exactly.
struct DoublePoint {
    int nu;
    int nu_prime;
    double energy;
    bool fundamental; // (nu, nu') is the irreducible pair
};

struct ResonanceLadder {
    std::vector<LadderEntry> entries;   // sorted by energy, Short before Long on ties
    std::vector<DoublePoint> double_points;

    std::optional<DoublePoint> fundamental() const;
};

// The lowest double resonance: (nu, nu') = (p, q - p) for d/L = p/q in lowest terms.
DoublePoint fundamental_double_point(const SystemParams& params);

// All short- and long-path resonances with energy in [e_min, e_max]. Independent of the cutoff.
ResonanceLadder resonances_in_window(const SystemParams& params, double e_min, double e_max);

} // namespace doubletscope
