#include "doubletscope/eigensolver.hpp"
#include "doubletscope/errors.hpp"
#include "doubletscope/sector_hamiltonian.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace doubletscope;

namespace {

SystemParams with_distance(Rational d_pi, int cutoff = 2000)
{
    SystemParams p;
    p.distance_pi = d_pi;
    p.cutoff = cutoff;
    return p;
}

std::vector<double> merged_spectrum(const SystemParams& p)
{
    std::vector<double> all;
    for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric}) {
        const ArrowheadSector s = build_sector(p, label);
        for (const EigenPair& e : solve_all(s))
            all.push_back(e.energy);
        for (const DeflatedMode& d : s.deflated())
            all.push_back(d.omega);
    }
    std::sort(all.begin(), all.end());
    return all;
}

} // namespace

TEST_CASE("sector structure, case A")
{
    const SystemParams p = with_distance(Rational(8));
    const ArrowheadSector sym = build_sector(p, SectorLabel::Symmetric);
    const ArrowheadSector anti = build_sector(p, SectorLabel::Antisymmetric);

    CHECK(sym.apex() == p.epsilon);
    CHECK(sym.deflated().empty());
    CHECK(sym.poles().size() == 2001);
    CHECK(sym.poles().front().mode == 0);
    CHECK(sym.poles().front().coupling == doctest::Approx(std::sqrt(2.0) * form_factor(p, 0)).epsilon(1e-15));

    CHECK(anti.deflated().size() == 400);
    for (const DeflatedMode& d : anti.deflated())
        CHECK(d.mode % 5 == 0);
    for (const Pole& pole : anti.poles()) {
        CHECK(pole.mode != 0);
        CHECK(pole.mode % 5 != 0);
    }
    CHECK(sym.dimension() + anti.dimension() + sym.deflated().size() + anti.deflated().size() == p.full_dimension());
}

TEST_CASE("poles increase strictly and couplings are positive")
{
    for (Rational d : {Rational(8), Rational(16), Rational(25, 3)}) {
        const SystemParams p = with_distance(d, 300);
        for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric}) {
            const ArrowheadSector s = build_sector(p, label);
            for (std::size_t i = 0; i < s.poles().size(); ++i) {
                CHECK(s.poles()[i].coupling > 0.0);
                if (i > 0)
                    CHECK(s.poles()[i - 1].omega < s.poles()[i].omega);
            }
        }
    }
}

TEST_CASE("case B couplings")
{
    const SystemParams p = with_distance(Rational(16));
    const ArrowheadSector sym = build_sector(p, SectorLabel::Symmetric);
    const ArrowheadSector anti = build_sector(p, SectorLabel::Antisymmetric);
    // cos(2 pi / 5) = (sqrt5 - 1)/4.
    CHECK(sym.poles()[1].mode == 1);
    CHECK(sym.poles()[1].coupling == doctest::Approx(2.0 * form_factor(p, 1) * 0.30901699437494742).epsilon(1e-14));
    // d/L = 2/5: sin(2 pi k / 5) vanishes for k = 0 mod 5; cos never does.
    CHECK(sym.deflated().empty());
    CHECK(anti.deflated().size() == 400);
}

TEST_CASE("symmetric deflation when 2kd/L is an odd integer")
{
    // d/L = 1/6: cos(pi k / 6) = 0 for k = 3 mod 6.
    SystemParams p;
    p.distance_pi = Rational(20, 3);
    p.cutoff = 60;
    const ArrowheadSector sym = build_sector(p, SectorLabel::Symmetric);
    REQUIRE(sym.deflated().size() == 10);
    for (const DeflatedMode& d : sym.deflated())
        CHECK(d.mode % 6 == 3);
}

TEST_CASE("coupling sum rule")
{
    for (Rational d : {Rational(8), Rational(16), Rational(25, 3)}) {
        const SystemParams p = with_distance(d, 500);
        double sectors = 0.0;
        for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric})
            sectors += build_sector(p, label).coupling_norm_squared();
        double full = 0.0;
        for (int k = -p.cutoff; k <= p.cutoff; ++k)
            full += form_factor(p, k) * form_factor(p, k);
        CHECK(sectors == doctest::Approx(2.0 * full).epsilon(1e-13));
    }
}

TEST_CASE("arrowhead construction checks")
{
    CHECK_THROWS_AS(ArrowheadSector(SectorLabel::Symmetric, 1.0, {{0, 1.0, 0.1, 1.0}, {1, 1.0, 0.1, 1.0}}),
                    InvalidArgument);
    CHECK_THROWS_AS(ArrowheadSector(SectorLabel::Symmetric, 1.0, {{0, 1.0, 0.0, 1.0}}), InvalidArgument);
    CHECK_THROWS_AS(ArrowheadSector(SectorLabel::Symmetric, NAN, {{0, 1.0, 0.1, 1.0}}), InvalidArgument);
    const ArrowheadSector ok(SectorLabel::Symmetric, 1.0, {{0, 1.0, 0.5, 1.0}, {1, 2.0, 0.25, 1.0}});
    CHECK(ok.dimension() == 3);
    CHECK(ok.coupling_norm_squared() == doctest::Approx(0.3125));
    const std::vector<double> m = ok.dense_matrix();
    REQUIRE(m.size() == 9);
    CHECK(m == std::vector<double>{1.0, 0.5, 0.25, 0.5, 1.0, 0.0, 0.25, 0.0, 2.0});
}

TEST_CASE("build_sector rejects d = L/2")
{
    CHECK_THROWS_AS(build_sector(with_distance(Rational(20)), SectorLabel::Symmetric), InvalidArgument);
}

TEST_CASE("embedding of pure emitter states")
{
    const SystemParams p = with_distance(Rational(8), 40);
    for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric}) {
        const ArrowheadSector s = build_sector(p, label);
        EigenPair pure;
        pure.sector = label;
        pure.apex_amplitude = 1.0;
        pure.mode_amplitudes.assign(s.poles().size(), 0.0);
        const FullVector v = embed_full(pure, s, p);
        REQUIRE(v.size() == p.full_dimension());
        CHECK(v[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(v[1].real() == doctest::Approx(emitter_sign(label) / std::sqrt(2.0)));
        for (std::size_t i = 2; i < v.size(); ++i)
            CHECK(std::abs(v[i]) == 0.0);
    }
}

TEST_CASE("embedding checks its inputs")
{
    const SystemParams p = with_distance(Rational(8), 40);
    const ArrowheadSector sym = build_sector(p, SectorLabel::Symmetric);
    const ArrowheadSector anti = build_sector(p, SectorLabel::Antisymmetric);
    const EigenPair e = solve_one(sym, 3);
    SystemParams other = p;
    other.epsilon = 1.1;
    CHECK_THROWS_AS(embed_full(e, sym, other), InvalidArgument);
    CHECK_THROWS_AS(embed_full(e, anti, p), InvalidArgument);
    EigenPair wrong = e;
    wrong.mode_amplitudes.pop_back();
    CHECK_THROWS_AS(embed_full(wrong, sym, p), InvalidArgument);
}

TEST_CASE("physical-basis residuals")
{
    for (Rational d : {Rational(8), Rational(16), Rational(25, 3)}) {
        const SystemParams p = with_distance(d, 2000);
        for (SectorLabel label : {SectorLabel::Symmetric, SectorLabel::Antisymmetric}) {
            const ArrowheadSector s = build_sector(p, label);
            double worst = 0.0;
            for (const EigenPair& e : solve_all(s)) {
                const FullVector v = embed_full(e, s, p);
                double norm2 = 0.0;
                for (const auto& z : v)
                    norm2 += std::norm(z);
                CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-13));
                worst = std::max(worst, full_residual(p, v, e.energy));
            }
            for (const DeflatedMode& m : s.deflated())
                worst = std::max(worst, full_residual(p, embed_deflated(m, s, p), m.omega));
            CHECK(worst <= 1e-12);
        }
    }
}

TEST_CASE("full_residual sanity")
{
    // Decoupled mode is an exact eigenvector.
    SystemParams zero = with_distance(Rational(8), 20);
    zero.gamma = 0.0;
    FullVector v(zero.full_dimension());
    v[2 + 7 + 20] = 1.0;
    CHECK(full_residual(zero, v, mode_frequency(zero, 7)) == 0.0);

    // Random unit vector at E = 0 sees the diagonal, which is at least 1.
    const SystemParams p = with_distance(Rational(8));
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    FullVector r(p.full_dimension());
    double n2 = 0.0;
    for (auto& z : r) {
        z = {normal(rng), normal(rng)};
        n2 += std::norm(z);
    }
    for (auto& z : r)
        z /= std::sqrt(n2);
    CHECK(full_residual(p, r, 0.0) > 0.5);
}

TEST_CASE("sector spectra reproduce the dense full-basis spectrum")
{
    // Oracle: tests/oracle/generate.py, dense complex Hamiltonian with gamma = 0.05,
    // L = 4 pi, eps = 1, K = 4, diagonalized without symmetry reduction.
    struct Case {
        Rational d_pi;
        std::vector<double> expected;
    };
    const std::vector<Case> cases{
        {Rational(1), {0.8879447521962633, 0.9330568330735832, 1.0487338877163925, 1.1530976518456764, 1.1700317873515256, 1.414213562373095, 1.440357859111249, 1.8082608375094862, 1.8085108448244782, 2.2360679774997902, 2.2419063392080125}},
        {Rational(3, 2), {0.8954043202364419, 0.9202879582911009, 1.06279382973845, 1.1369164354350496, 1.1762583125920634, 1.427539030419486, 1.4282344846304038, 1.804414722411127, 1.8123695730255585, 2.236067977499792, 2.2418956884300822}},
        {Rational(5, 6), {0.8853206411027358, 0.9384618878498019, 1.0451405109159133, 1.144827953375583, 1.1795722035004355, 1.4162137438720475, 1.4378499804567801, 1.8044082737048803, 1.8124039190222465, 2.2375474256503636, 2.240435793258765}},
    };
    for (const Case& c : cases) {
        SystemParams p;
        p.gamma = 0.05;
        p.length_pi = Rational(4);
        p.epsilon = 1.0;
        p.cutoff = 4;
        p.distance_pi = c.d_pi;
        const std::vector<double> got = merged_spectrum(p);
        REQUIRE(got.size() == c.expected.size());
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(got[i] == doctest::Approx(c.expected[i]).epsilon(1e-12));
    }
}
