#include "doubletscope/model.hpp"

#include "doubletscope/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

namespace doubletscope {

namespace {

constexpr std::uint64_t fnv_offset = 1469598103934665603ULL;
constexpr std::uint64_t fnv_prime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t value)
{
    for (int i = 0; i < 8; ++i) {
        h ^= (value >> (8 * i)) & 0xffU;
        h *= fnv_prime;
    }
}

std::string rational_text(const Rational& r)
{
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

} // namespace

double to_double(const Rational& r)
{
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

double SystemParams::length() const { return std::numbers::pi * to_double(length_pi); }

double SystemParams::distance() const { return std::numbers::pi * to_double(distance_pi); }

Rational SystemParams::distance_ratio() const { return distance_pi / length_pi; }

void validate(const SystemParams& params)
{
    if (!(params.gamma > 0.0) || !std::isfinite(params.gamma))
        throw InvalidArgument("gamma must be positive and finite");
    if (!(params.epsilon > 0.0) || !std::isfinite(params.epsilon))
        throw InvalidArgument("epsilon must be positive and finite");
    if (params.cutoff < 1)
        throw InvalidArgument("cutoff K must be at least 1");
    if (params.length_pi <= 0)
        throw InvalidArgument("waveguide length L_pi must be positive");
    if (params.distance_pi <= 0 || params.distance_pi >= params.length_pi)
        throw InvalidArgument("emitter distance must satisfy 0 < d < L (got d_pi = " +
                              rational_text(params.distance_pi) + ", L_pi = " +
                              rational_text(params.length_pi) + ")");
    if (params.distance_pi * 2 == params.length_pi)
        throw InvalidArgument("emitter distance d = L/2 is the excluded doubly symmetric case");
    if (mode_frequency(params, params.cutoff) < 2.0 * params.epsilon)
        throw InvalidArgument("cutoff K too small: omega_K must be at least 2*epsilon");
}

std::uint64_t params_hash(const SystemParams& params)
{
    std::uint64_t h = fnv_offset;
    fnv_mix(h, std::bit_cast<std::uint64_t>(params.gamma));
    fnv_mix(h, static_cast<std::uint64_t>(params.length_pi.numerator()));
    fnv_mix(h, static_cast<std::uint64_t>(params.length_pi.denominator()));
    fnv_mix(h, static_cast<std::uint64_t>(params.distance_pi.numerator()));
    fnv_mix(h, static_cast<std::uint64_t>(params.distance_pi.denominator()));
    fnv_mix(h, std::bit_cast<std::uint64_t>(params.epsilon));
    fnv_mix(h, static_cast<std::uint64_t>(params.cutoff));
    return h;
}

double mode_frequency(const SystemParams& params, int k)
{
    // 2 pi k / L = 2 k / L_pi
    const double q = 2.0 * static_cast<double>(k) / to_double(params.length_pi);
    return std::sqrt(q * q + 1.0);
}

double form_factor(const SystemParams& params, int k)
{
    return std::sqrt(params.gamma / (params.length() * mode_frequency(params, k)));
}

double short_resonance(const SystemParams& params, int nu)
{
    if (nu < 1)
        throw InvalidArgument("short_resonance: nu must be a positive integer");
    const double q = static_cast<double>(nu) / to_double(params.distance_pi);
    return std::sqrt(q * q + 1.0);
}

double long_resonance(const SystemParams& params, int nu_prime)
{
    if (nu_prime < 1)
        throw InvalidArgument("long_resonance: nu_prime must be a positive integer");
    const double q = static_cast<double>(nu_prime) / to_double(params.length_pi - params.distance_pi);
    return std::sqrt(q * q + 1.0);
}

std::optional<DoublePoint> ResonanceLadder::fundamental() const
{
    for (const auto& dp : double_points)
        if (dp.fundamental)
            return dp;
    return std::nullopt;
}

DoublePoint fundamental_double_point(const SystemParams& params)
{
    const Rational ratio = params.distance_ratio();
    const auto p = ratio.numerator();
    const auto q = ratio.denominator();
    const int nu = static_cast<int>(p);
    return DoublePoint{nu, static_cast<int>(q - p), short_resonance(params, nu), true};
}

ResonanceLadder resonances_in_window(const SystemParams& params, double e_min, double e_max)
{
    if (!(e_min <= e_max))
        throw InvalidArgument("resonances_in_window: e_min must not exceed e_max");

    ResonanceLadder ladder;
    std::vector<int> short_indices;
    std::vector<int> long_indices;
    for (int nu = 1;; ++nu) {
        const double e = short_resonance(params, nu);
        if (e > e_max)
            break;
        if (e >= e_min) {
            ladder.entries.push_back({Branch::Short, nu, e});
            short_indices.push_back(nu);
        }
    }
    for (int nu = 1;; ++nu) {
        const double e = long_resonance(params, nu);
        if (e > e_max)
            break;
        if (e >= e_min) {
            ladder.entries.push_back({Branch::Long, nu, e});
            long_indices.push_back(nu);
        }
    }
    std::stable_sort(ladder.entries.begin(), ladder.entries.end(),
                     [](const LadderEntry& a, const LadderEntry& b) { return a.energy < b.energy; });

    const Rational long_path = params.length_pi - params.distance_pi;
    for (int nu : short_indices) {
        for (int nu_prime : long_indices) {
            if (Rational(nu) * long_path != Rational(nu_prime) * params.distance_pi)
                continue;
            const bool irreducible = std::gcd(nu, nu_prime) == 1;
            ladder.double_points.push_back({nu, nu_prime, short_resonance(params, nu), irreducible});
        }
    }
    return ladder;
}

} // namespace doubletscope
