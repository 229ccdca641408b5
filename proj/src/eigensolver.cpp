#include "doubletscope/eigensolver.hpp"

#include "doubletscope/errors.hpp"
#include "doubletscope/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace doubletscope {

namespace {

constexpr double machine_eps = std::numeric_limits<double>::epsilon();
constexpr int iteration_cap = 200;
constexpr double bisection_fraction = 1e-3;
constexpr double near_pole_tolerance = 1e-13;

// The secular function in coordinates shifted to one pole: E = omega_o + tau.
class ShiftedSecular {
public:
    ShiftedSecular(const ArrowheadSector& sector, std::size_t origin)
        : poles_(sector.poles()), origin_(origin), origin_omega_(poles_[origin].omega),
          apex_offset_(sector.apex() - origin_omega_)
    {
        offsets_.reserve(poles_.size());
        for (const Pole& p : poles_)
            offsets_.push_back(p.omega - origin_omega_);
    }

    struct Value {
        double f;
        double df;
        double noise;   // rounding bound on f
    };

    // Terms are accumulated from the farthest pole inwards.
    Value operator()(double tau) const
    {
        CompensatedSum f;
        double df = 0.0;
        double magnitude = std::abs(apex_offset_) + std::abs(tau);
        f.add(apex_offset_);
        f.add(-tau);
        std::size_t lo = 0;
        std::size_t hi = poles_.size();
        while (lo < hi) {
            std::size_t k;
            if (std::abs(tau - offsets_[lo]) >= std::abs(tau - offsets_[hi - 1]))
                k = lo++;
            else
                k = --hi;
            const double diff = tau - offsets_[k];
            if (diff == 0.0)
                throw PoleHit("secular function evaluated on a pole", poles_[k].omega);
            const double g = poles_[k].coupling;
            const double term = g * g / diff;
            f.add(term);
            df += term / diff;
            magnitude += std::abs(term);
        }
        return {f.value(), -1.0 - df, 4.0 * machine_eps * magnitude};
    }

    double origin_omega() const noexcept { return origin_omega_; }
    double apex_offset() const noexcept { return apex_offset_; }
    std::size_t origin() const noexcept { return origin_; }
    double offset(std::size_t k) const noexcept { return offsets_[k]; }

private:
    std::span<const Pole> poles_;
    std::size_t origin_;
    double origin_omega_;
    double apex_offset_;
    std::vector<double> offsets_;
};

[[noreturn]] void fail_convergence(const ArrowheadSector& sector, std::size_t j, double lower, double upper)
{
    std::ostringstream msg;
    msg.precision(17);
    msg << "secular root " << j << " in sector " << to_string(sector.label())
        << " did not converge within " << iteration_cap << " iterations; interval (" << lower << ", "
        << upper << ")";
    throw ConvergenceError(msg.str(), lower, upper);
}

void fix_sign(EigenPair& pair)
{
    double pivot = pair.apex_amplitude;
    if (pivot == 0.0) {
        for (double u : pair.mode_amplitudes) {
            if (u != 0.0) {
                pivot = u;
                break;
            }
        }
    }
    if (pivot < 0.0) {
        pair.apex_amplitude = -pair.apex_amplitude;
        for (double& u : pair.mode_amplitudes)
            u = -u;
    }
}

EigenPair assemble(const ArrowheadSector& sector, const ShiftedSecular& shifted, double tau, std::size_t j)
{
    const auto poles = sector.poles();
    const std::size_t n = poles.size();
    const std::size_t o = shifted.origin();
    // tau lies strictly inside the root's pole interval, but omega + tau can round onto a
    // pole when tau is below half an ulp. Keep the nearest double strictly inside.
    double energy = shifted.origin_omega() + tau;
    if (j > 0)
        energy = std::max(energy, std::nextafter(poles[j - 1].omega, std::numeric_limits<double>::infinity()));
    if (j < n)
        energy = std::min(energy, std::nextafter(poles[j].omega, -std::numeric_limits<double>::infinity()));

    EigenPair pair;
    pair.energy = energy;
    pair.sector = sector.label();
    pair.root_index = j;
    pair.mode_amplitudes.resize(n);

    if (std::abs(tau) < near_pole_tolerance * std::max(1.0, shifted.origin_omega())) {
        // Mode-dominant form: unit amplitude on the origin mode, the apex amplitude taken
        // from the apex row with all other modes slaved to it.
        CompensatedSum rest;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == o)
                continue;
            const double g = poles[k].coupling;
            rest.add(g * g / (tau - shifted.offset(k)));
        }
        const double a = poles[o].coupling / (tau - shifted.apex_offset() - rest.value());
        pair.apex_amplitude = a;
        for (std::size_t k = 0; k < n; ++k)
            pair.mode_amplitudes[k] = k == o ? 1.0 : poles[k].coupling * a / (tau - shifted.offset(k));
    } else {
        pair.apex_amplitude = 1.0;
        for (std::size_t k = 0; k < n; ++k)
            pair.mode_amplitudes[k] = poles[k].coupling / (tau - shifted.offset(k));
    }

    CompensatedSum norm2;
    norm2.add(pair.apex_amplitude * pair.apex_amplitude);
    for (double u : pair.mode_amplitudes)
        norm2.add(u * u);
    const double scale = 1.0 / std::sqrt(norm2.value());
    pair.apex_amplitude *= scale;
    for (double& u : pair.mode_amplitudes)
        u *= scale;
    fix_sign(pair);
    return pair;
}

// Root j lies between pole j-1 and pole j (with the outer intervals unbounded).
EigenPair solve_root(const ArrowheadSector& sector, std::size_t j)
{
    const auto poles = sector.poles();
    const std::size_t n = poles.size();
    if (n == 0) {
        EigenPair pair;
        pair.energy = sector.apex();
        pair.apex_amplitude = 1.0;
        pair.sector = sector.label();
        return pair;
    }

    const double spread = std::sqrt(sector.coupling_norm_squared());
    std::size_t origin;
    double lo; // tau bracket; f(lo) > 0 > f(hi). A bracket end at 0 is the origin pole.
    double hi;

    if (j == 0) {
        origin = 0;
        ShiftedSecular s(sector, origin);
        lo = std::min(s.apex_offset(), 0.0) - spread;
        for (;;) {
            const double f = s(lo).f;
            if (f > 0.0)
                break;
            if (f == 0.0)
                return assemble(sector, s, lo, j);
            lo *= 2.0;
        }
        hi = 0.0;
    } else if (j == n) {
        origin = n - 1;
        ShiftedSecular s(sector, origin);
        hi = std::max(s.apex_offset(), 0.0) + spread;
        for (;;) {
            const double f = s(hi).f;
            if (f < 0.0)
                break;
            if (f == 0.0)
                return assemble(sector, s, hi, j);
            hi *= 2.0;
        }
        lo = 0.0;
    } else {
        const double gap = poles[j].omega - poles[j - 1].omega;
        const double half = 0.5 * gap;
        ShiftedSecular left(sector, j - 1);
        const double f_mid = left(half).f;
        if (f_mid == 0.0)
            return assemble(sector, left, half, j);
        if (f_mid < 0.0) {
            origin = j - 1;
            lo = 0.0;
            hi = half;
        } else {
            origin = j;
            ShiftedSecular right(sector, j);
            const double f_right = right(-half).f;
            if (f_right == 0.0)
                return assemble(sector, right, -half, j);
            lo = f_right > 0.0 ? -half : -gap;
            hi = 0.0;
        }
    }

    const ShiftedSecular s(sector, origin);
    const double omega_o = s.origin_omega();
    const double target_width = bisection_fraction * (hi - lo);
    int iter = 0;

    while (hi - lo > target_width) {
        if (++iter > iteration_cap)
            fail_convergence(sector, j, omega_o + lo, omega_o + hi);
        const double mid = lo + 0.5 * (hi - lo);
        const double f = s(mid).f;
        if (f == 0.0)
            return assemble(sector, s, mid, j);
        (f > 0.0 ? lo : hi) = mid;
    }

    double tau = lo + 0.5 * (hi - lo);
    for (;;) {
        if (++iter > iteration_cap)
            fail_convergence(sector, j, omega_o + lo, omega_o + hi);
        const auto [f, df, noise] = s(tau);
        // f is at rounding level: tau is as good as the arithmetic allows.
        if (std::abs(f) <= noise)
            break;
        (f > 0.0 ? lo : hi) = tau;
        double next = tau - f / df;
        if (!(next > lo && next < hi))
            next = lo + 0.5 * (hi - lo);
        const double step = std::abs(next - tau);
        tau = next;
        if (step <= machine_eps * std::abs(tau) || hi - lo <= 2.0 * machine_eps * std::abs(tau))
            break;
    }
    return assemble(sector, s, tau, j);
}

// Index range [first, last) of roots whose interval meets [e_min, e_max].
std::pair<std::size_t, std::size_t> candidate_roots(const ArrowheadSector& sector, double e_min, double e_max)
{
    const auto poles = sector.poles();
    const std::size_t n = poles.size();
    // Root j lies in (omega_{j-1}, omega_j); it can be >= e_min only if omega_j > e_min.
    const auto first = static_cast<std::size_t>(
        std::upper_bound(poles.begin(), poles.end(), e_min, [](double e, const Pole& p) { return e < p.omega; }) -
        poles.begin());
    // ...and <= e_max only if omega_{j-1} < e_max.
    const auto below = static_cast<std::size_t>(
        std::lower_bound(poles.begin(), poles.end(), e_max, [](const Pole& p, double e) { return p.omega < e; }) -
        poles.begin());
    return {std::min(first, n), std::min(below + 1, n + 1)};
}

} // namespace

double secular_value(const ArrowheadSector& sector, double energy)
{
    CompensatedSum f;
    f.add(sector.apex());
    f.add(-energy);
    for (const Pole& p : sector.poles()) {
        const double diff = energy - p.omega;
        if (diff == 0.0)
            throw PoleHit("secular function evaluated on a pole", p.omega);
        f.add(p.coupling * p.coupling / diff);
    }
    return f.value();
}

std::vector<EigenPair> solve_all(const ArrowheadSector& sector)
{
    std::vector<EigenPair> pairs;
    pairs.reserve(sector.dimension());
    for (std::size_t j = 0; j < sector.dimension(); ++j)
        pairs.push_back(solve_root(sector, j));
    return pairs;
}

std::vector<EigenPair> solve_window(const ArrowheadSector& sector, double e_min, double e_max)
{
    if (!(e_min < e_max))
        throw InvalidArgument("solve_window: e_min must be below e_max");
    const auto [first, last] = candidate_roots(sector, e_min, e_max);
    std::vector<EigenPair> pairs;
    for (std::size_t j = first; j < last; ++j) {
        EigenPair pair = solve_root(sector, j);
        if (pair.energy >= e_min && pair.energy <= e_max)
            pairs.push_back(std::move(pair));
    }
    return pairs;
}

EigenPair solve_one(const ArrowheadSector& sector, std::size_t root_index)
{
    if (root_index >= sector.dimension())
        throw InvalidArgument("solve_one: root index out of range");
    return solve_root(sector, root_index);
}

double sector_residual(const ArrowheadSector& sector, const EigenPair& pair)
{
    const auto poles = sector.poles();
    if (pair.mode_amplitudes.size() != poles.size())
        throw InvalidArgument("sector_residual: eigenpair does not match sector dimension");
    CompensatedSum apex_row;
    apex_row.add((sector.apex() - pair.energy) * pair.apex_amplitude);
    double sq = 0.0;
    for (std::size_t k = 0; k < poles.size(); ++k) {
        const double u = pair.mode_amplitudes[k];
        apex_row.add(poles[k].coupling * u);
        const double r = poles[k].coupling * pair.apex_amplitude + (poles[k].omega - pair.energy) * u;
        sq += r * r;
    }
    const double r0 = apex_row.value();
    return std::sqrt(sq + r0 * r0);
}

} // namespace doubletscope
