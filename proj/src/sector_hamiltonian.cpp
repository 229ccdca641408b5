#include "doubletscope/sector_hamiltonian.hpp"

#include "doubletscope/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace doubletscope {

namespace {

using cplx = std::complex<double>;

constexpr double inv_sqrt2 = 0.70710678118654752440;

// pi * k * d / L reduced to [0, 2 pi) in integer arithmetic: with d/L = p/q the
// angle is pi * r / q for r = (k p) mod 2q.
double reflection_half_angle(const Rational& ratio, int k)
{
    const std::int64_t p = ratio.numerator();
    const std::int64_t q = ratio.denominator();
    std::int64_t r = (static_cast<std::int64_t>(k) * p) % (2 * q);
    if (r < 0)
        r += 2 * q;
    return std::numbers::pi * static_cast<double>(r) / static_cast<double>(q);
}

// sin(pi k p / q) == 0  <=>  q | k p
bool sine_vanishes(const Rational& ratio, int k)
{
    return (static_cast<std::int64_t>(k) * ratio.numerator()) % ratio.denominator() == 0;
}

// cos(pi k p / q) == 0  <=>  2 k p / q is an odd integer
bool cosine_vanishes(const Rational& ratio, int k)
{
    const std::int64_t twice = 2 * static_cast<std::int64_t>(k) * ratio.numerator();
    const std::int64_t q = ratio.denominator();
    return twice % q == 0 && (twice / q) % 2 != 0;
}

// Coefficients of the sector photon vector for |k| on |+k> and |-k> (k >= 1).
std::pair<cplx, cplx> photon_pair(SectorLabel label, double phi, double sign)
{
    const cplx down = std::polar(sign * inv_sqrt2, -phi);
    const cplx up = std::polar(sign * inv_sqrt2, phi);
    if (label == SectorLabel::Symmetric)
        return {down, up};
    const cplx i{0.0, 1.0};
    return {i * down, -i * up};
}

std::size_t mode_slot(int k, int cutoff) { return 2 + static_cast<std::size_t>(k + cutoff); }

void check_binding(const ArrowheadSector& sector, const SystemParams& params)
{
    if (sector.params_hash() != params_hash(params))
        throw InvalidArgument("sector was built from different system parameters");
}

} // namespace

ArrowheadSector::ArrowheadSector(SectorLabel label, double apex, std::vector<Pole> poles,
                                 std::vector<DeflatedMode> deflated, std::uint64_t params_hash)
    : label_(label), apex_(apex), poles_(std::move(poles)), deflated_(std::move(deflated)),
      params_hash_(params_hash)
{
    if (!std::isfinite(apex_))
        throw InvalidArgument("arrowhead apex must be finite");
    for (std::size_t i = 0; i < poles_.size(); ++i) {
        const Pole& p = poles_[i];
        if (!std::isfinite(p.omega) || !std::isfinite(p.coupling))
            throw InvalidArgument("arrowhead pole " + std::to_string(i) + " is not finite");
        if (p.coupling == 0.0)
            throw InvalidArgument("arrowhead coupling " + std::to_string(i) + " is zero; deflate it");
        if (i > 0 && !(poles_[i - 1].omega < p.omega))
            throw InvalidArgument("arrowhead poles must be strictly increasing");
        coupling_norm2_ += p.coupling * p.coupling;
    }
}

std::vector<double> ArrowheadSector::dense_matrix() const
{
    const std::size_t n = dimension();
    std::vector<double> m(n * n, 0.0);
    m[0] = apex_;
    for (std::size_t i = 0; i < poles_.size(); ++i) {
        m[(i + 1) * n + (i + 1)] = poles_[i].omega;
        m[i + 1] = poles_[i].coupling;
        m[(i + 1) * n] = poles_[i].coupling;
    }
    return m;
}

ArrowheadSector build_sector(const SystemParams& params, SectorLabel label)
{
    validate(params);
    const Rational ratio = params.distance_ratio();
    const int K = params.cutoff;

    std::vector<Pole> poles;
    std::vector<DeflatedMode> deflated;
    poles.reserve(static_cast<std::size_t>(K) + 1);

    if (label == SectorLabel::Symmetric)
        poles.push_back({0, mode_frequency(params, 0), std::sqrt(2.0) * form_factor(params, 0), 1.0});

    for (int k = 1; k <= K; ++k) {
        const double omega = mode_frequency(params, k);
        const bool zero = label == SectorLabel::Symmetric ? cosine_vanishes(ratio, k) : sine_vanishes(ratio, k);
        if (zero) {
            deflated.push_back({k, omega});
            continue;
        }
        const double phi = reflection_half_angle(ratio, k);
        const double shape = label == SectorLabel::Symmetric ? std::cos(phi) : std::sin(phi);
        const double g = 2.0 * form_factor(params, k) * shape;
        poles.push_back({k, omega, std::abs(g), g < 0.0 ? -1.0 : 1.0});
    }
    return ArrowheadSector(label, params.epsilon, std::move(poles), std::move(deflated), params_hash(params));
}

FullVector embed_full(const EigenPair& state, const ArrowheadSector& sector, const SystemParams& params)
{
    check_binding(sector, params);
    if (state.sector != sector.label())
        throw InvalidArgument("embed_full: eigenpair belongs to the other sector");
    if (state.mode_amplitudes.size() != sector.poles().size())
        throw InvalidArgument("embed_full: eigenpair does not match sector dimension");

    const int K = params.cutoff;
    const Rational ratio = params.distance_ratio();
    FullVector v(params.full_dimension(), cplx{});
    v[0] = state.apex_amplitude * inv_sqrt2;
    v[1] = emitter_sign(sector.label()) * state.apex_amplitude * inv_sqrt2;

    const auto poles = sector.poles();
    for (std::size_t i = 0; i < poles.size(); ++i) {
        const Pole& p = poles[i];
        const double u = state.mode_amplitudes[i];
        if (p.mode == 0) {
            v[mode_slot(0, K)] = p.phase_sign * u;
            continue;
        }
        const auto [plus, minus] = photon_pair(sector.label(), reflection_half_angle(ratio, p.mode), p.phase_sign);
        v[mode_slot(p.mode, K)] = plus * u;
        v[mode_slot(-p.mode, K)] = minus * u;
    }
    return v;
}

FullVector embed_deflated(const DeflatedMode& mode, const ArrowheadSector& sector, const SystemParams& params)
{
    check_binding(sector, params);
    const int K = params.cutoff;
    if (mode.mode < 1 || mode.mode > K)
        throw InvalidArgument("embed_deflated: mode id out of range");
    FullVector v(params.full_dimension(), cplx{});
    const auto [plus, minus] =
        photon_pair(sector.label(), reflection_half_angle(params.distance_ratio(), mode.mode), 1.0);
    v[mode_slot(mode.mode, K)] = plus;
    v[mode_slot(-mode.mode, K)] = minus;
    return v;
}

double full_residual(const SystemParams& params, std::span<const std::complex<double>> v, double energy)
{
    const int K = params.cutoff;
    if (v.size() != params.full_dimension())
        throw InvalidArgument("full_residual: vector length must be 2K+3");

    const Rational ratio = params.distance_ratio();
    const cplx e1 = v[0];
    const cplx e2 = v[1];
    cplx w1 = params.epsilon * e1;
    cplx w2 = params.epsilon * e2;
    double sq = 0.0;

    for (int k = -K; k <= K; ++k) {
        const double F = form_factor(params, k);
        // exp(2 pi i k x2 / L) with x2 = d
        const cplx phase = std::polar(1.0, 2.0 * reflection_half_angle(ratio, k));
        const cplx xk = v[mode_slot(k, K)];
        w1 += F * xk;
        w2 += F * phase * xk;
        const cplx wk = mode_frequency(params, k) * xk + F * (e1 + std::conj(phase) * e2);
        sq += std::norm(wk - energy * xk);
    }
    sq += std::norm(w1 - energy * e1) + std::norm(w2 - energy * e2);
    return std::sqrt(sq);
}

} // namespace doubletscope
