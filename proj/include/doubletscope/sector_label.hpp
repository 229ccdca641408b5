#pragma once

#include <string_view>

namespace doubletscope {

// Modular-reflection symmetry sector. Symmetric: a2 = a1; Antisymmetric: a2 = -a1.
enum class SectorLabel { Symmetric, Antisymmetric };

constexpr std::string_view to_string(SectorLabel label) noexcept
{
    return label == SectorLabel::Symmetric ? "sym" : "anti";
}

// +1 for Symmetric, -1 for Antisymmetric: the relative sign of the two emitter amplitudes.
constexpr double emitter_sign(SectorLabel label) noexcept
{
    return label == SectorLabel::Symmetric ? 1.0 : -1.0;
}

} // namespace doubletscope
