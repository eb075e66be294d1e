#pragma once

#include "geovag/thermo/eos.hpp"
#include "geovag/thermo/state.hpp"

namespace geovag {

struct FlashResult {
    double T = 0.0;
    double sl = 1.0;
    double sg = 0.0;
    double cl = 1.0;  // liquid mass fraction of the mixture (clamped to [0,1])
    PhaseContext state = PhaseContext::Liquid;
};

/// Thermodynamic equilibrium of a flowing mixture at fixed pressure p with
/// mass rate q_mass > 0 and energy rate q_energy, assuming zero slip between
/// phases. Throws FlashError if no temperature in the EOS range matches.
FlashResult flash_p_qm_qe(const FluidEos& eos, double p, double q_mass, double q_energy);

}  // namespace geovag
