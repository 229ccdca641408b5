#include "writers.hpp"

#include "doubletscope/cli_io.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <ostream>

namespace doubletscope {

std::string format_number(double value)
{
    if (std::isnan(value))
        return {};
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ec == std::errc{} ? ptr : buf);
}

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows)
{
    out << "epsilon,E_sym,Pe_sym,E_anti,Pe_anti,E_below,E_above,res_flags\n";
    for (const ScanRow& r : rows)
        out << format_number(r.epsilon) << ',' << format_number(r.symmetric.energy) << ','
            << format_number(r.symmetric.emitter_probability) << ',' << format_number(r.antisymmetric.energy) << ','
            << format_number(r.antisymmetric.emitter_probability) << ',' << format_number(r.below) << ','
            << format_number(r.above) << ',' << r.res_flags << '\n';
}

void write_doublet_report(std::ostream& out, const DoubletReport& r)
{
    const auto kv = [&](const char* key, const std::string& value) { out << key << " = " << value << '\n'; };
    const auto num = [&](const char* key, double value) { kv(key, format_number(value)); };
    kv("nu", std::to_string(r.nu));
    kv("nu_prime", std::to_string(r.nu_prime));
    num("resonance_energy", r.resonance_energy);
    num("epsilon_bar", r.epsilon_bar);
    num("E_cross", r.energy_cross);
    num("resonance_offset", r.resonance_offset);
    num("crossing_splitting", r.crossing_splitting);
    kv("short_sector", std::string(to_string(r.short_sector)));
    num("c_m", r.c_m);
    num("c_d", r.c_d);
    num("slope_sym", r.slope_symmetric);
    num("slope_anti", r.slope_antisymmetric);
    num("Pe_sym", r.pe_symmetric);
    num("Pe_anti", r.pe_antisymmetric);
    num("confinement_sym", r.confinement_symmetric);
    num("confinement_anti", r.confinement_antisymmetric);
    num("fit_delta_min", -r.fit_halfwidth);
    num("fit_delta_max", r.fit_halfwidth);
    kv("fit_points", std::to_string(r.fit_points));
    num("fit_residual", r.fit_residual);
    kv("nonlinear_warning", r.nonlinear_warning ? "true" : "false");
    num("neighbor_gap_min", r.neighbor_gap_min);
    num("splitting_max", r.splitting_max);
    num("quasi_degeneracy_ratio", r.quasi_degeneracy_ratio);
    num("quasi_degenerate_min", r.quasi_lo);
    num("quasi_degenerate_max", r.quasi_hi);
    kv("branch_switch_warning", r.branch_switch_warning ? "true" : "false");
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumEntry>& entries)
{
    out << "energy,sector,Pe,kind,index\n";
    for (const SpectrumEntry& e : entries)
        out << format_number(e.energy) << ',' << to_string(e.sector) << ',' << format_number(e.emitter_probability)
            << ',' << (e.deflated ? "deflated" : "coupled") << ',' << e.index << '\n';
}

void write_modes_csv(std::ostream& out, const ArrowheadSector& sym, const ArrowheadSector& anti,
                     const SystemParams& params)
{
    struct Row {
        double g_sym = 0.0;
        double g_anti = 0.0;
        std::string deflated = "none";
    };
    std::map<int, Row> rows;
    for (int k = 0; k <= params.cutoff; ++k)
        rows[k];
    for (const Pole& p : sym.poles())
        rows[p.mode].g_sym = p.coupling;
    for (const Pole& p : anti.poles())
        rows[p.mode].g_anti = p.coupling;
    for (const DeflatedMode& d : sym.deflated())
        rows[d.mode].deflated = "sym";
    for (const DeflatedMode& d : anti.deflated())
        rows[d.mode].deflated = "anti";
    out << "k,omega,g_sym,g_anti,deflated\n";
    for (const auto& [k, r] : rows)
        out << k << ',' << format_number(mode_frequency(params, k)) << ',' << format_number(r.g_sym) << ','
            << format_number(r.g_anti) << ',' << r.deflated << '\n';
}

void write_amplitude_csv(std::ostream& out, const AmplitudeProfile& profile)
{
    out << "x,re_zeta,im_zeta,abs2_zeta\n";
    for (std::size_t j = 0; j < profile.grid.size(); ++j) {
        const auto z = profile.values[j];
        out << format_number(profile.grid[j]) << ',' << format_number(z.real()) << ',' << format_number(z.imag()) << ','
            << format_number(std::norm(z)) << '\n';
    }
}

} // namespace doubletscope
