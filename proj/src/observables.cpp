#include "doubletscope/observables.hpp"

#include "doubletscope/errors.hpp"
#include "doubletscope/summation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace doubletscope {

namespace {

using cplx = std::complex<double>;

SingleExcitationState from_full(const FullVector& v, SectorLabel label, double energy, std::uint64_t hash)
{
    SingleExcitationState s;
    s.sector = label;
    s.energy = energy;
    s.a1 = v[0];
    s.a2 = v[1];
    s.xi.assign(v.begin() + 2, v.end());
    s.params_hash = hash;
    return s;
}

void check_state(const SingleExcitationState& state, const SystemParams& params)
{
    if (state.params_hash != params_hash(params) || state.cutoff() != params.cutoff)
        throw InvalidArgument("state was built from different system parameters");
}

// e^{2 pi i k x / L}, reducing k x / L to [0, 1) first.
cplx plane_wave(int k, double x_over_l)
{
    double turns = static_cast<double>(k) * x_over_l;
    turns -= std::floor(turns);
    return std::polar(1.0, 2.0 * std::numbers::pi * turns);
}

class ComplexSum {
public:
    void add(cplx z)
    {
        re_.add(z.real());
        im_.add(z.imag());
    }
    cplx value() const { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_;
    CompensatedSum im_;
};

} // namespace

double SingleExcitationState::norm_squared() const
{
    CompensatedSum s;
    s.add(std::norm(a1));
    s.add(std::norm(a2));
    for (const cplx& z : xi)
        s.add(std::norm(z));
    return s.value();
}

SingleExcitationState make_state(const EigenPair& pair, const ArrowheadSector& sector, const SystemParams& params)
{
    return from_full(embed_full(pair, sector, params), sector.label(), pair.energy, sector.params_hash());
}

SingleExcitationState make_deflated_state(const DeflatedMode& mode, const ArrowheadSector& sector,
                                          const SystemParams& params)
{
    return from_full(embed_deflated(mode, sector, params), sector.label(), mode.omega, sector.params_hash());
}

double emitter_probability(const SingleExcitationState& state)
{
    return std::norm(state.a1) + std::norm(state.a2);
}

AmplitudeProfile photon_amplitude(const SingleExcitationState& state, const SystemParams& params, int n_grid)
{
    check_state(state, params);
    const int K = params.cutoff;
    if (n_grid < 2 * K)
        throw InvalidArgument("photon_amplitude: grid of " + std::to_string(n_grid) +
                              " points is too coarse for cutoff K = " + std::to_string(K) + " (need >= 2K)");

    const auto n = static_cast<std::size_t>(n_grid);
    const double length = params.length();
    std::vector<cplx> roots(n);
    for (std::size_t m = 0; m < n; ++m)
        roots[m] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));

    AmplitudeProfile profile;
    profile.energy = state.energy;
    profile.length = length;
    profile.grid.resize(n);
    profile.values.assign(n, cplx{});
    for (std::size_t j = 0; j < n; ++j)
        profile.grid[j] = length * static_cast<double>(j) / static_cast<double>(n);

    const double norm = 1.0 / std::sqrt(length);
    const auto nn = static_cast<std::int64_t>(n);
    for (int k = -K; k <= K; ++k) {
        const cplx amp = state.mode(k) * norm;
        if (amp == cplx{})
            continue;
        const std::int64_t step = ((k % nn) + nn) % nn;
        std::int64_t idx = 0;
        for (std::size_t j = 0; j < n; ++j) {
            profile.values[j] += amp * roots[static_cast<std::size_t>(idx)];
            idx += step;
            if (idx >= nn)
                idx -= nn;
        }
    }
    return profile;
}

std::vector<cplx> amplitude_at(const SingleExcitationState& state, const SystemParams& params,
                               std::span<const double> positions)
{
    check_state(state, params);
    const int K = params.cutoff;
    const double length = params.length();
    const double norm = 1.0 / std::sqrt(length);
    std::vector<cplx> out;
    out.reserve(positions.size());
    for (double x : positions) {
        ComplexSum sum;
        for (int k = -K; k <= K; ++k)
            sum.add(state.mode(k) * plane_wave(k, x / length));
        out.push_back(sum.value() * norm);
    }
    return out;
}

std::vector<cplx> amplitude_by_resolvent(const SingleExcitationState& state, const SystemParams& params,
                                         std::span<const double> positions)
{
    check_state(state, params);
    const int K = params.cutoff;
    const double length = params.length();
    const double d_over_l = to_double(params.distance_ratio());
    const double prefactor = std::sqrt(params.gamma) / length;

    std::vector<double> kernel(static_cast<std::size_t>(2 * K + 1));
    for (int k = -K; k <= K; ++k) {
        const double omega = mode_frequency(params, k);
        kernel[static_cast<std::size_t>(k + K)] = 1.0 / (std::sqrt(omega) * (state.energy - omega));
    }

    std::vector<cplx> out;
    out.reserve(positions.size());
    for (double x : positions) {
        ComplexSum first;
        ComplexSum second;
        for (int k = -K; k <= K; ++k) {
            const double w = kernel[static_cast<std::size_t>(k + K)];
            first.add(w * plane_wave(k, x / length));
            second.add(w * plane_wave(k, x / length - d_over_l));
        }
        out.push_back(prefactor * (state.a1 * first.value() + state.a2 * second.value()));
    }
    return out;
}

double mismatch_up_to_factor(std::span<const cplx> a, std::span<const cplx> b)
{
    if (a.size() != b.size() || a.empty())
        throw InvalidArgument("mismatch_up_to_factor: profiles must be nonempty and of equal length");
    ComplexSum cross;
    CompensatedSum bb;
    double amax = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        cross.add(std::conj(b[j]) * a[j]);
        bb.add(std::norm(b[j]));
        amax = std::max(amax, std::abs(a[j]));
    }
    if (amax == 0.0)
        throw InvalidArgument("mismatch_up_to_factor: reference profile is identically zero");
    const cplx c = bb.value() > 0.0 ? cross.value() / bb.value() : cplx{};
    double worst = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        worst = std::max(worst, std::abs(a[j] - c * b[j]));
    return worst / amax;
}

double photon_weight(const AmplitudeProfile& profile)
{
    // Periodic trapezoid: every node carries full weight.
    CompensatedSum s;
    for (const cplx& z : profile.values)
        s.add(std::norm(z));
    return s.value() * profile.length / static_cast<double>(profile.values.size());
}

std::optional<double> confinement_ratio(const AmplitudeProfile& profile, const SystemParams& params)
{
    const std::size_t n = profile.values.size();
    if (n < 2)
        throw InvalidArgument("confinement_ratio: profile needs at least two grid points");
    const double total = photon_weight(profile);
    if (!(total > 0.0))
        return std::nullopt;

    const double dx = profile.length / static_cast<double>(n);
    const double d = params.distance();
    const auto density = [&](std::size_t j) { return std::norm(profile.values[j % n]); };

    const auto m = static_cast<std::size_t>(std::floor(d / dx));
    CompensatedSum inner;
    for (std::size_t j = 0; j < m; ++j)
        inner.add(0.5 * dx * (density(j) + density(j + 1)));
    const double rest = d - static_cast<double>(m) * dx;
    const double at_d = density(m) + (density(m + 1) - density(m)) * rest / dx;
    inner.add(0.5 * rest * (density(m) + at_d));
    return inner.value() / total;
}

} // namespace doubletscope
