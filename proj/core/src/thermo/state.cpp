#include "geovag/thermo/state.hpp"

#include <algorithm>
#include <string>

#include "geovag/error.hpp"

namespace geovag {

std::string_view to_string(PhaseContext c) {
    switch (c) {
        case PhaseContext::Liquid: return "liquid";
        case PhaseContext::Gas: return "gas";
        case PhaseContext::TwoPhase: return "two-phase";
    }
    return "?";
}

PhaseContext context_from_string(std::string_view s) {
    if (s == "liquid") return PhaseContext::Liquid;
    if (s == "gas") return PhaseContext::Gas;
    if (s == "two-phase" || s == "twophase") return PhaseContext::TwoPhase;
    throw ConfigError("unknown phase context '" + std::string(s) + "'");
}

ClosureResiduals closure_residuals(const DofState& x, const FluidEos& eos) {
    ClosureResiduals r;
    r.r1 = x.cg * x.p - eos.p_sat_unchecked(x.T) * x.cl;
    r.r2 = std::min(x.sl, 1.0 - x.cl);
    r.r3 = std::min(x.sg, 1.0 - x.cg);
    r.r4 = x.sl + x.sg - 1.0;
    return r;
}

void complete_state(DofState& x, const FluidEos& eos) {
    switch (x.context) {
        case PhaseContext::TwoPhase:
            x.T = eos.t_sat(x.p);
            x.cl = 1.0;
            x.cg = 1.0;
            x.sl = 1.0 - x.sg;
            break;
        case PhaseContext::Liquid:
            x.sl = 1.0;
            x.sg = 0.0;
            x.cl = 1.0;
            x.cg = eos.p_sat_unchecked(x.T) / x.p;
            break;
        case PhaseContext::Gas:
            x.sl = 0.0;
            x.sg = 1.0;
            x.cg = 1.0;
            x.cl = x.p / eos.p_sat_unchecked(x.T);
            break;
    }
}

PhaseContext classify_fresh(double p, double T, const FluidEos& eos) {
    const double ps = eos.p_sat_unchecked(T);
    if (p > ps) return PhaseContext::Liquid;
    if (p < ps) return PhaseContext::Gas;
    return PhaseContext::TwoPhase;
}

bool update_context(DofState& x, const FluidEos& eos) {
    const PhaseContext before = x.context;
    switch (x.context) {
        case PhaseContext::Liquid:
            // min(s^g, 1 - c^g) with s^g = 0: gas appears when 1 - c^g < 0, i.e. p < p_sat(T)
            if (x.p < eos.p_sat_unchecked(x.T)) {
                x.context = PhaseContext::TwoPhase;
                x.sg = 0.0;
            }
            break;
        case PhaseContext::Gas:
            if (x.p > eos.p_sat_unchecked(x.T)) {
                x.context = PhaseContext::TwoPhase;
                x.sg = 1.0;
            }
            break;
        case PhaseContext::TwoPhase:
            if (x.sg < 0.0) {
                x.context = PhaseContext::Liquid;
                x.sg = 0.0;
            } else if (x.sg > 1.0) {
                x.context = PhaseContext::Gas;
                x.sg = 1.0;
            }
            break;
    }
    if (x.context == before) return false;
    complete_state(x, eos);
    return true;
}

}  // namespace geovag
